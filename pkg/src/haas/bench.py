"""Benchmark battery programs, calibration search, and table export.

Each program expands to an explicit grid of run configs, executes them
(optionally in parallel), and aggregates cross-seed means into a
SummaryTable. Aggregation order is fixed by the grid, not by completion
order, so reruns of the same spec produce byte-identical tables.
"""

from __future__ import annotations

import concurrent.futures
import csv
import io
import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .catalog import DEFAULT_WEIGHTS, load_default_scenarios
from .config import SimConfig
from .engine import RunConfig, RunResult, run
from .errors import ConfigError, ValidationError
from .metrics import wilcoxon_signed_rank
from .policy import LEVELS

# first 30 primes from 11 upward; ten-seed sweeps reuse the prefix
PRIME_SEEDS = (11, 13, 17, 19, 23, 29, 31, 37, 41, 43,
               47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
               97, 101, 103, 107, 109, 113, 127, 131, 137, 139)
SEEDS_30 = PRIME_SEEDS
SEEDS_10 = PRIME_SEEDS[:10]

PROGRAMS = ("strategy_table", "ladder", "portability", "long_horizon",
            "ablation", "contract", "weight_sensitivity", "dispersion")

STANDARD_SCENARIOS = {"software": "standard_sprint",
                      "manufacturing": "standard_production"}

# (strategy, policies) conditions for the main strategy table
STRATEGY_TABLE_CONDITIONS = (
    ("ai_only", False), ("oracle", False),
    ("linucb", False), ("linucb", True),
    ("ucb1", False), ("ucb1", True),
    ("thompson", True),
    ("affinity_heuristic", False),
    ("human_scheduler", False),
    ("random", False),
    ("fixed_human", False),
)

SENSITIVITY_STRATEGIES = (("ai_only", False), ("linucb", False),
                          ("random", False), ("fixed_human", False))

MEAN_COLUMNS = ("objective", "lead_time", "quality", "cost", "fatigue",
                "cum_regret", "human_participation_pct", "hybrid_pct",
                "human_only_share_pct", "supervised_share_pct",
                "autonomous_share_pct", "policy_cap_pct", "policy_forced_pct")


def condition_label(strategy: str, policies: bool) -> str:
    return f"{strategy}+{'on' if policies else 'off'}"


@dataclass(frozen=True)
class BatterySpec:
    program: str
    seeds: tuple[int, ...] = SEEDS_30
    domains: tuple[str, ...] = ("software", "manufacturing")
    scenarios: tuple[str, ...] = ()      # empty: program default
    strategies: tuple = ()               # empty: program default
    levels: tuple[str, ...] = tuple(LEVELS)
    cycles: int | None = None
    reward_profile: str = "four_outcome"
    out: str | None = None
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.program not in PROGRAMS:
            raise ConfigError(f"unknown battery program {self.program!r}")
        if not self.seeds:
            raise ConfigError("seed list must be non-empty")
        for level in self.levels:
            if level not in LEVELS:
                raise ConfigError(f"unknown governance level {level!r}")


@dataclass
class SummaryTable:
    program: str
    columns: tuple[str, ...]
    rows: list[dict]
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"program": self.program, "columns": list(self.columns),
                "rows": self.rows, "notes": self.notes}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "SummaryTable":
        data = json.loads(text)
        return cls(program=data["program"], columns=tuple(data["columns"]),
                   rows=data["rows"], notes=data.get("notes", {}))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(self.columns),
                                extrasaction="ignore", lineterminator="\r\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow(row)
        return buf.getvalue()


@dataclass
class BatteryResult:
    spec: BatterySpec
    table: SummaryTable
    run_aggregates: list[dict]


def _execute_grid(configs: list[RunConfig], sim_cfg: SimConfig | None,
                  jobs: int) -> list[RunResult]:
    if jobs <= 1:
        return [run(cfg, sim_cfg) for cfg in configs]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(run, cfg, sim_cfg) for cfg in configs]
        return [f.result() for f in futures]


def _mean_over(results: list[RunResult], columns=MEAN_COLUMNS) -> dict:
    out = {}
    for col in columns:
        values = [r.aggregate[col] for r in results if col in r.aggregate]
        out[col] = sum(values) / len(values) if values else None
    return out


def _seed_block(base: RunConfig, seeds) -> list[RunConfig]:
    from dataclasses import replace
    return [replace(base, seed=s) for s in seeds]


def _domain_scenarios(spec: BatterySpec, domain: str) -> list[str]:
    if spec.scenarios:
        known = {sc.key for sc in load_default_scenarios(domain)}
        return [s for s in spec.scenarios if s in known]
    return [STANDARD_SCENARIOS[domain]]


def run_battery(spec: BatterySpec, sim_cfg: SimConfig | None = None) -> BatteryResult:
    """Execute one benchmark program and aggregate its summary table."""
    builder = {
        "strategy_table": _program_strategy_table,
        "ladder": _program_ladder,
        "portability": _program_portability,
        "long_horizon": _program_long_horizon,
        "ablation": _program_ablation,
        "contract": _program_contract,
        "weight_sensitivity": _program_weight_sensitivity,
        "dispersion": _program_dispersion,
    }[spec.program]
    result = builder(spec, sim_cfg)
    if spec.out:
        write_battery_outputs(result, Path(spec.out))
    return result


def _collect(spec: BatterySpec, groups: list[tuple[dict, list[RunConfig]]],
             sim_cfg: SimConfig | None, columns: tuple[str, ...],
             extra_stats=None) -> BatteryResult:
    """Run every group's configs and emit one mean row per group."""
    flat: list[RunConfig] = []
    offsets = []
    for _, configs in groups:
        offsets.append((len(flat), len(configs)))
        flat.extend(configs)
    results = _execute_grid(flat, sim_cfg, spec.jobs)
    rows, aggregates = [], []
    per_group_results = []
    for (meta, _), (start, count) in zip(groups, offsets):
        group_results = results[start:start + count]
        per_group_results.append((meta, group_results))
        row = dict(meta)
        row.update(_mean_over(group_results))
        if extra_stats:
            row.update(extra_stats(meta, group_results))
        rows.append(row)
        for res in group_results:
            agg = {"seed": res.config["seed"], **meta}
            agg.update({k: v for k, v in res.aggregate.items()})
            aggregates.append(agg)
    table = SummaryTable(program=spec.program, columns=columns, rows=rows)
    result = BatteryResult(spec=spec, table=table, run_aggregates=aggregates)
    result.per_group = per_group_results  # type: ignore[attr-defined]
    return result


def _program_strategy_table(spec: BatterySpec, sim_cfg) -> BatteryResult:
    conditions = spec.strategies or STRATEGY_TABLE_CONDITIONS
    groups = []
    for domain in spec.domains:
        for scenario in _domain_scenarios(spec, domain):
            for strategy, policies in conditions:
                meta = {"domain": domain, "scenario": scenario,
                        "condition": condition_label(strategy, policies),
                        "strategy": strategy, "policies": policies}
                base = RunConfig(domain=domain, scenario=scenario, strategy=strategy,
                                 policies=policies, cycles=spec.cycles,
                                 reward_profile=spec.reward_profile)
                groups.append((meta, _seed_block(base, spec.seeds)))
    columns = ("domain", "scenario", "condition") + MEAN_COLUMNS
    result = _collect(spec, groups, sim_cfg, columns)

    # pre-specified two-sided comparison: linucb+off vs ai_only on regret
    per_group = {(m["domain"], m["scenario"], m["condition"]): rs
                 for m, rs in result.per_group}  # type: ignore[attr-defined]
    tests = {}
    for domain in spec.domains:
        for scenario in _domain_scenarios(spec, domain):
            a = per_group.get((domain, scenario, "linucb+off"))
            b = per_group.get((domain, scenario, "ai_only+off"))
            if not a or not b:
                continue
            pairs = [(x.aggregate["cum_regret"], y.aggregate["cum_regret"])
                     for x, y in zip(a, b)]
            try:
                t = wilcoxon_signed_rank(pairs)
                tests[f"{domain}/{scenario}"] = {
                    "comparison": "linucb+off vs ai_only", "metric": "cum_regret",
                    "w": t.w, "z": t.z, "p_value": t.p_value,
                    "effect_size_r": t.effect_size_r, "n": t.n_used,
                }
            except ValidationError:
                pass
    result.table.notes["wilcoxon"] = tests
    return result


def _program_ladder(spec: BatterySpec, sim_cfg) -> BatteryResult:
    groups = []
    for domain in spec.domains:
        for scenario in _domain_scenarios(spec, domain):
            for level in spec.levels:
                meta = {"domain": domain, "scenario": scenario, "level": level}
                base = RunConfig(domain=domain, scenario=scenario, strategy="linucb",
                                 governance_level=level, cycles=spec.cycles,
                                 reward_profile=spec.reward_profile)
                groups.append((meta, _seed_block(base, spec.seeds)))
    columns = ("domain", "scenario", "level") + MEAN_COLUMNS
    return _collect(spec, groups, sim_cfg, columns)


def _program_portability(spec: BatterySpec, sim_cfg) -> BatteryResult:
    seeds = spec.seeds if spec.seeds != SEEDS_30 else SEEDS_10
    groups = []
    for domain in spec.domains:
        scenario_keys = (spec.scenarios
                         or [sc.key for sc in load_default_scenarios(domain)])
        for scenario in scenario_keys:
            for level in spec.levels:
                meta = {"domain": domain, "scenario": scenario, "level": level}
                base = RunConfig(domain=domain, scenario=scenario, strategy="linucb",
                                 governance_level=level, cycles=spec.cycles,
                                 reward_profile=spec.reward_profile)
                groups.append((meta, _seed_block(base, seeds)))
    columns = ("domain", "scenario", "level", "best") + MEAN_COLUMNS
    result = _collect(spec, groups, sim_cfg, columns)
    best: dict[tuple[str, str], dict] = {}
    for row in result.table.rows:
        key = (row["domain"], row["scenario"])
        if key not in best or row["objective"] < best[key]["objective"]:
            best[key] = row
    for row in result.table.rows:
        row["best"] = row is best[(row["domain"], row["scenario"])]
    result.table.notes["winners"] = {
        f"{d}/{s}": row["level"] for (d, s), row in sorted(best.items())}
    return result


def _program_long_horizon(spec: BatterySpec, sim_cfg) -> BatteryResult:
    levels = spec.levels if spec.levels != tuple(LEVELS) else ("L0", "L2", "L4")
    cycles = spec.cycles or 16
    groups = []
    for domain in spec.domains:
        for scenario in _domain_scenarios(spec, domain):
            for level in levels:
                meta = {"domain": domain, "scenario": scenario, "level": level,
                        "cycles": cycles}
                base = RunConfig(domain=domain, scenario=scenario, strategy="linucb",
                                 governance_level=level, cycles=cycles,
                                 reward_profile=spec.reward_profile)
                groups.append((meta, _seed_block(base, spec.seeds)))
    columns = ("domain", "scenario", "level", "cycles") + MEAN_COLUMNS
    return _collect(spec, groups, sim_cfg, columns)


ABLATION_VARIANTS = (
    ("full", {}),
    ("no_policy", {"no_policy": True}),
    ("no_fatigue", {"no_fatigue": True}),
    ("no_trust", {"no_trust": True}),
    ("no_deskilling", {"no_deskilling": True}),
)


def _program_ablation(spec: BatterySpec, sim_cfg) -> BatteryResult:
    seeds = spec.seeds if spec.seeds != SEEDS_30 else SEEDS_10
    groups = []
    for domain in spec.domains:
        for scenario in _domain_scenarios(spec, domain):
            for name, flags in ABLATION_VARIANTS:
                meta = {"domain": domain, "scenario": scenario, "variant": name}
                base = RunConfig(domain=domain, scenario=scenario, strategy="linucb",
                                 policies=True, cycles=spec.cycles,
                                 reward_profile=spec.reward_profile, **flags)
                groups.append((meta, _seed_block(base, seeds)))
    columns = ("domain", "scenario", "variant") + MEAN_COLUMNS
    return _collect(spec, groups, sim_cfg, columns)


CONTRACT_PROFILES = ("four_outcome", "cost_time", "quality_cost_time")
CONTRACT_CONDITIONS = (("ai_only", False), ("linucb", False),
                       ("linucb", True), ("affinity_heuristic", False))


def _program_contract(spec: BatterySpec, sim_cfg) -> BatteryResult:
    domains = tuple(d for d in spec.domains if d == "manufacturing") or ("manufacturing",)
    conditions = spec.strategies or CONTRACT_CONDITIONS
    groups = []
    for domain in domains:
        for scenario in _domain_scenarios(spec, domain):
            for profile in CONTRACT_PROFILES:
                for strategy, policies in conditions:
                    meta = {"domain": domain, "scenario": scenario,
                            "reward_profile": profile,
                            "condition": condition_label(strategy, policies)}
                    base = RunConfig(domain=domain, scenario=scenario,
                                     strategy=strategy, policies=policies,
                                     cycles=spec.cycles, reward_profile=profile)
                    groups.append((meta, _seed_block(base, spec.seeds)))

    def screen_rates(meta, results):
        n = len(results)
        return {
            "acceptable_rate": sum(r.screen_flags["acceptable"] for r in results) / n,
            "reasonable_rate": sum(r.screen_flags["reasonable"] for r in results) / n,
            "responsible_rate": sum(r.screen_flags["responsible"] for r in results) / n,
        }

    columns = (("domain", "scenario", "reward_profile", "condition") + MEAN_COLUMNS
               + ("acceptable_rate", "reasonable_rate", "responsible_rate"))
    return _collect(spec, groups, sim_cfg, columns, extra_stats=screen_rates)


def weight_variants(fraction: float = 0.30):
    """Baseline plus each single affinity weight perturbed up and down."""
    variants = [("baseline", None)]
    names = ("w_r", "w_tau", "w_c", "w_a", "w_h")
    for i, name in enumerate(names):
        for sign, tag in ((fraction, "up"), (-fraction, "down")):
            fracs = [0.0] * 5
            fracs[i] = sign
            from .catalog import perturb_weights
            weights = perturb_weights(DEFAULT_WEIGHTS, fracs)
            variants.append((f"{name}_{tag}", weights.as_tuple()))
    return variants


def _program_weight_sensitivity(spec: BatterySpec, sim_cfg) -> BatteryResult:
    seeds = spec.seeds if spec.seeds != SEEDS_30 else SEEDS_10
    conditions = spec.strategies or SENSITIVITY_STRATEGIES
    groups = []
    for domain in spec.domains:
        for scenario in _domain_scenarios(spec, domain):
            for variant, weights in weight_variants():
                for strategy, policies in conditions:
                    meta = {"domain": domain, "scenario": scenario,
                            "variant": variant,
                            "condition": condition_label(strategy, policies)}
                    base = RunConfig(domain=domain, scenario=scenario,
                                     strategy=strategy, policies=policies,
                                     cycles=spec.cycles,
                                     reward_profile=spec.reward_profile,
                                     affinity_weights=weights)
                    groups.append((meta, _seed_block(base, seeds)))
    columns = ("domain", "scenario", "variant", "condition") + MEAN_COLUMNS
    result = _collect(spec, groups, sim_cfg, columns)

    # regret rank-order per variant, and whether it matches the baseline order
    orders: dict[tuple[str, str, str], list[str]] = {}
    for row in result.table.rows:
        orders.setdefault((row["domain"], row["scenario"], row["variant"]), []).append(
            (row["cum_regret"], row["condition"]))
    ranking = {key: [c for _, c in sorted(vals)] for key, vals in orders.items()}
    invariant = {}
    for (domain, scenario, variant), order in sorted(ranking.items()):
        base_order = ranking[(domain, scenario, "baseline")]
        invariant[f"{domain}/{scenario}/{variant}"] = {
            "order": order, "matches_baseline": order == base_order}
    result.table.notes["rank_invariance"] = invariant
    result.table.notes["all_invariant"] = all(
        v["matches_baseline"] for v in invariant.values())
    return result


def _program_dispersion(spec: BatterySpec, sim_cfg) -> BatteryResult:
    conditions = spec.strategies or (("ai_only", False), ("linucb", False))
    groups = []
    for domain in spec.domains:
        for scenario in _domain_scenarios(spec, domain):
            for strategy, policies in conditions:
                meta = {"domain": domain, "scenario": scenario,
                        "condition": condition_label(strategy, policies)}
                base = RunConfig(domain=domain, scenario=scenario, strategy=strategy,
                                 policies=policies, cycles=spec.cycles,
                                 reward_profile=spec.reward_profile)
                groups.append((meta, _seed_block(base, spec.seeds)))

    def quartiles(meta, results):
        out = {}
        for col in ("lead_time", "quality", "fatigue", "cum_regret"):
            values = sorted(r.aggregate[col] for r in results)
            q1, med, q3 = (statistics.quantiles(values, n=4) if len(values) >= 4
                           else (values[0], values[len(values) // 2], values[-1]))
            out[f"{col}_median"] = med
            out[f"{col}_q1"] = q1
            out[f"{col}_q3"] = q3
        return out

    columns = (("domain", "scenario", "condition") + MEAN_COLUMNS
               + tuple(f"{c}_{s}" for c in ("lead_time", "quality", "fatigue", "cum_regret")
                       for s in ("median", "q1", "q3")))
    return _collect(spec, groups, sim_cfg, columns, extra_stats=quartiles)


# ---------------------------------------------------------------------------
# Calibration search
# ---------------------------------------------------------------------------

GAMMA_ALLOWED = (0.90, 0.97)
ALPHA_ALLOWED = (0.35, 1.60)


@dataclass(frozen=True)
class SearchSpec:
    candidates: int = 20
    rng_seed: int = 0
    seeds: tuple[int, ...] = PRIME_SEEDS[:5]
    domain: str = "manufacturing"
    scenario: str = "standard_production"
    strategy: str = "linucb"
    policies: bool = True
    affinity_jitter: float = 0.28
    reward_jitter: float = 0.35
    wellbeing_jitter: float = 0.35
    threshold_jitter: float = 0.20
    gamma_range: tuple[float, float] = GAMMA_ALLOWED
    alpha_range: tuple[float, float] = ALPHA_ALLOWED

    def __post_init__(self) -> None:
        if self.candidates < 1:
            raise ConfigError("need at least one candidate")
        if not (GAMMA_ALLOWED[0] <= self.gamma_range[0] <= self.gamma_range[1] <= GAMMA_ALLOWED[1]):
            raise ConfigError(f"gamma range must lie within {GAMMA_ALLOWED}")
        if not (ALPHA_ALLOWED[0] <= self.alpha_range[0] <= self.alpha_range[1] <= ALPHA_ALLOWED[1]):
            raise ConfigError(f"alpha range must lie within {ALPHA_ALLOWED}")


def _jitter_simplex(rng: np.random.Generator, base: tuple[float, ...],
                    magnitude: float) -> tuple[float, ...]:
    if magnitude == 0.0:
        return tuple(base)
    factors = 1.0 + rng.uniform(-magnitude, magnitude, size=len(base))
    scaled = np.maximum(0.0, np.array(base) * factors)
    return tuple(float(x) for x in scaled / scaled.sum())


def _sample_candidate(rng: np.random.Generator, spec: SearchSpec,
                      index: int) -> dict:
    screen_defaults = SimConfig().screens
    thresholds = {}
    for name in ("q_min", "f_max", "desk_max", "participation_min", "monotony_max",
                 "shared_min", "autonomous_highvalue_max", "highvalue_human_min",
                 "risky_shared_min"):
        base = getattr(screen_defaults, name)
        if spec.threshold_jitter:
            factor = 1.0 + float(rng.uniform(-spec.threshold_jitter, spec.threshold_jitter))
        else:
            factor = 1.0
        thresholds[name] = min(1.0, max(0.0, base * factor))
    return {
        "index": index,
        "affinity_weights": _jitter_simplex(rng, DEFAULT_WEIGHTS.as_tuple(),
                                            spec.affinity_jitter),
        "reward_weights": _jitter_simplex(rng, (0.30, 0.20, 0.10, 0.40),
                                          spec.reward_jitter),
        "wellbeing_jitter_applied": spec.wellbeing_jitter,
        "screen_thresholds": thresholds,
        "ducb_gamma": float(rng.uniform(*spec.gamma_range)) if spec.gamma_range[0] != spec.gamma_range[1] else spec.gamma_range[0],
        "linucb_alpha": float(rng.uniform(*spec.alpha_range)) if spec.alpha_range[0] != spec.alpha_range[1] else spec.alpha_range[0],
    }


def calibrate(spec: SearchSpec, sim_cfg: SimConfig | None = None) -> dict:
    """Feasible-first random search over jittered simulator candidates.

    A candidate is feasible when every seed passes the acceptable screen;
    feasible candidates rank above infeasible ones, then by lower objective.
    """
    rng = np.random.default_rng(spec.rng_seed)
    base_cfg = sim_cfg or SimConfig()
    report = []
    for i in range(spec.candidates):
        cand = _sample_candidate(rng, spec, i)
        cfg = base_cfg.copy()
        cfg.bandit.ducb_gamma = cand["ducb_gamma"]
        cfg.bandit.linucb_alpha = cand["linucb_alpha"]
        for name, value in cand["screen_thresholds"].items():
            setattr(cfg.screens, name, value)
        results = []
        for seed in spec.seeds:
            config = RunConfig(domain=spec.domain, scenario=spec.scenario,
                               strategy=spec.strategy, policies=spec.policies,
                               seed=seed,
                               affinity_weights=cand["affinity_weights"],
                               reward_weights=cand["reward_weights"])
            results.append(run(config, cfg))
        objective = sum(r.aggregate["objective"] for r in results) / len(results)
        flags = [r.screen_flags for r in results]
        feasible = all(f["acceptable"] for f in flags)
        violated = sorted({name for r in results
                           for name, ok in _screen_conditions(r, cfg).items() if not ok})
        report.append({
            "candidate": cand, "objective": objective, "feasible": feasible,
            "acceptable_rate": sum(f["acceptable"] for f in flags) / len(flags),
            "violated_conditions": violated if not feasible else [],
        })
    ranked = sorted(report, key=lambda r: (not r["feasible"], r["objective"]))
    best = ranked[0]
    return {
        "best": best,
        "feasible_count": sum(1 for r in report if r["feasible"]),
        "candidates": report,
    }


def _screen_conditions(result: RunResult, cfg: SimConfig) -> dict[str, bool]:
    agg = result.aggregate
    t = cfg.screens
    return {
        "quality": agg["quality"] >= t.q_min,
        "fatigue": agg["fatigue"] <= t.f_max,
        "deskilling": agg["cum_deskilling"] <= t.desk_max,
        "participation": agg["human_participation_pct"] / 100.0 >= t.participation_min,
        "governance": agg["governance_violations"] == 0,
    }


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

def export(table: SummaryTable, fmt: str, path: str | Path) -> Path:
    """Write a summary table as RFC-4180 CSV or round-trippable JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        path.write_text(table.to_csv(), encoding="utf-8", newline="")
    elif fmt == "json":
        path.write_text(table.to_json(), encoding="utf-8")
    else:
        raise ValidationError(f"unknown export format {fmt!r}")
    return path


def write_battery_outputs(result: BatteryResult, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    export(result.table, "json", out_dir / "summary.json")
    export(result.table, "csv", out_dir / "summary.csv")
    with (out_dir / "runs.ndjson").open("w", encoding="utf-8") as fh:
        for agg in result.run_aggregates:
            fh.write(json.dumps(agg, sort_keys=True, separators=(",", ":")) + "\n")
    index = {"program": result.spec.program,
             "seeds": list(result.spec.seeds),
             "domains": list(result.spec.domains),
             "rows": len(result.table.rows)}
    (out_dir / "battery.json").write_text(
        json.dumps(index, sort_keys=True, indent=2), encoding="utf-8")
