"""Acceptance suite: one test per release criterion, at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS line per
criterion. Heavy run grids are shared through module-scoped fixtures.
"""

from __future__ import annotations

import itertools
import time

import numpy as np
import pytest

from haas.bench import (BatterySpec, PRIME_SEEDS, SEEDS_10, run_battery)
from haas.catalog import CognitiveProfile, ai_affinity, load_default_catalog
from haas.engine import RunConfig, _candidate_evaluator, _resolve, run
from haas.humanstate import HumanState
from haas.learners import oracle_select
from haas.metrics import wilcoxon_signed_rank
from haas.modes import ALL_MODES, copilot_ai_share, supervised_human_share
from haas.outcomes import NoiseDraws
from haas.policy import LEVELS
from haas.streams import make_stream

from conftest import make_profile
from test_catalog import REPRESENTATIVE_ROWS
from test_metrics import brute_force_min_ranksum_p

DOMAIN_SCENARIO = (("software", "standard_sprint"),
                   ("manufacturing", "standard_production"))

STRATEGY_CONDITIONS = (
    ("ai_only", False), ("oracle", False), ("linucb", False), ("linucb", True),
    ("ucb1", False), ("ucb1", True), ("thompson", True),
    ("affinity_heuristic", False), ("human_scheduler", False),
    ("random", False), ("fixed_human", False),
)

DEPLOYABLE = tuple(c for c in STRATEGY_CONDITIONS if c[0] != "oracle")


def _mean(results, key):
    return sum(r.aggregate[key] for r in results) / len(results)


@pytest.fixture(scope="module")
def ladder_results():
    started = time.time()
    grid = {}
    for domain, scenario in DOMAIN_SCENARIO:
        for level in LEVELS:
            grid[(domain, level)] = [
                run(RunConfig(domain=domain, scenario=scenario, strategy="linucb",
                              governance_level=level, seed=s))
                for s in PRIME_SEEDS]
    grid["elapsed"] = time.time() - started
    return grid


@pytest.fixture(scope="module")
def strategy_results():
    grid = {}
    for domain, scenario in DOMAIN_SCENARIO:
        for strategy, policies in STRATEGY_CONDITIONS:
            grid[(domain, strategy, policies)] = [
                run(RunConfig(domain=domain, scenario=scenario, strategy=strategy,
                              policies=policies, seed=s))
                for s in PRIME_SEEDS]
    return grid


def test_affinity_table_reproduction():
    started = time.time()
    for name, scores, expected in REPRESENTATIVE_ROWS:
        alpha = ai_affinity(CognitiveProfile(*scores))
        assert alpha == pytest.approx(expected, abs=0.01), name
    elapsed = time.time() - started
    assert elapsed < 1.0
    print(f"\nACCEPTANCE affinity-table: PASS "
          f"({len(REPRESENTATIVE_ROWS)} reference rows within ±0.01, {elapsed:.3f}s)")


def test_share_equations_exact_and_bounded():
    mid = make_profile(tau=0.55, a=0.55)
    assert copilot_ai_share(mid, 0.50) == pytest.approx(0.20, abs=1e-12)
    assert copilot_ai_share(mid, 0.80) == pytest.approx(0.38, abs=1e-12)
    grid = [i / 100.0 for i in range(101)]
    for kappa, f in itertools.product(grid, grid):
        v = copilot_ai_share(make_profile(tau=kappa, a=kappa), f)
        assert 0.20 - 1e-12 <= v <= 0.55 + 1e-12
        w = supervised_human_share(make_profile(a=kappa, h=kappa), f)
        assert 0.10 - 1e-12 <= w <= 0.40 + 1e-12
    print("ACCEPTANCE share-equations: PASS (worked examples exact; "
          "101x101 grid within clip bounds)")


def test_statistics_protocol():
    pairs = [(float(i + 1), 0.0) for i in range(30)]
    result = wilcoxon_signed_rank(pairs)
    assert result.w == 0.0
    assert result.effect_size_r == pytest.approx(0.873, abs=0.005)
    assert result.p_value < 0.001

    rng = np.random.default_rng(23)
    for _ in range(12):
        n = int(rng.integers(5, 11))
        diffs = [round(float(rng.normal()), 2) or 0.31 for _ in range(n)]
        ours = wilcoxon_signed_rank([(d, 0.0) for d in diffs])
        _, oracle_p = brute_force_min_ranksum_p(diffs)
        assert ours.p_value == pytest.approx(oracle_p, abs=1e-9)
    print("ACCEPTANCE statistics: PASS (unanimous 30 pairs: W=0, r=0.873, p<0.001; "
          "small-N p-values match the exhaustive sign-flip oracle)")


def test_objective_identity(ladder_results):
    # arithmetic consistency of the KPI definition against reference table pairs
    assert abs(645.91 / 4 - 161.48) <= 0.005
    assert abs(588.54 / 4 - 147.13) <= 0.005
    for (key, results) in ladder_results.items():
        if key == "elapsed":
            continue
        for r in results:
            assert r.aggregate["objective"] == pytest.approx(
                r.aggregate["cost"] / 4, abs=1e-9)
    print("ACCEPTANCE objective-identity: PASS (cost per feature = sprint cost / 4 "
          "in every run; reference table pairs consistent)")


def test_ladder_structure(ladder_results):
    for domain, _ in DOMAIN_SCENARIO:
        autos = [_mean(ladder_results[(domain, lvl)], "autonomous_share_pct")
                 for lvl in LEVELS]
        for earlier, later in zip(autos, autos[1:]):
            assert later <= earlier + 1e-9, (domain, autos)
        sup_l0 = _mean(ladder_results[(domain, "L0")], "supervised_share_pct")
        sup_l3 = _mean(ladder_results[(domain, "L3")], "supervised_share_pct")
        assert sup_l3 - sup_l0 >= 30.0, (domain, sup_l0, sup_l3)
        ho_off = _mean(ladder_results[(domain, "L0")], "human_only_share_pct")
        ho_on = _mean(ladder_results[(domain, "L2")], "human_only_share_pct")
        assert abs(ho_on - ho_off) < 5.0, (domain, ho_off, ho_on)
    assert ladder_results["elapsed"] < 300.0
    print(f"ACCEPTANCE ladder-structure: PASS (Autonomous monotone L0..L4, "
          f"Supervised L3-L0 >= 30pp, Human-Only drift < 5pp; "
          f"{ladder_results['elapsed']:.1f}s for 300 runs)")


def test_strategy_ordering(strategy_results):
    for domain, _ in DOMAIN_SCENARIO:
        regret = {c: _mean(strategy_results[(domain, *c)], "cum_regret")
                  for c in DEPLOYABLE}
        fatigue = {c: _mean(strategy_results[(domain, *c)], "fatigue")
                   for c in DEPLOYABLE}
        lead = {c: _mean(strategy_results[(domain, *c)], "lead_time")
                for c in DEPLOYABLE}
        quality = {c: _mean(strategy_results[(domain, *c)], "quality")
                   for c in DEPLOYABLE}
        ai = ("ai_only", False)
        fh = ("fixed_human", False)
        assert regret[ai] == min(regret.values()), (domain, regret)
        assert fatigue[ai] == min(fatigue.values()), (domain, fatigue)
        assert lead[fh] == max(lead.values()), (domain, lead)
        assert quality[fh] == min(quality.values()), (domain, quality)
        assert regret[fh] == max(regret.values()), (domain, regret)

        pairs = [(a.aggregate["cum_regret"], b.aggregate["cum_regret"])
                 for a, b in zip(strategy_results[(domain, "linucb", False)],
                                 strategy_results[(domain, "ai_only", False)])]
        t = wilcoxon_signed_rank(pairs)
        assert t.p_value < 0.05
        assert t.effect_size_r >= 0.5
    print("ACCEPTANCE strategy-ordering: PASS (ai_only best regret+fatigue, "
          "fixed_human worst lead/quality/regret; Wilcoxon rejects with r >= 0.5)")


def test_ablation_directions():
    for domain, scenario in DOMAIN_SCENARIO:
        full = [run(RunConfig(domain=domain, scenario=scenario, strategy="linucb",
                              policies=True, seed=s)) for s in SEEDS_10]
        no_policy = [run(RunConfig(domain=domain, scenario=scenario,
                                   strategy="linucb", policies=True, no_policy=True,
                                   seed=s)) for s in SEEDS_10]
        no_fatigue = [run(RunConfig(domain=domain, scenario=scenario,
                                    strategy="linucb", policies=True, no_fatigue=True,
                                    seed=s)) for s in SEEDS_10]
        assert _mean(no_policy, "cum_regret") < _mean(full, "cum_regret"), domain
        for r in no_fatigue:
            assert r.aggregate["fatigue"] == 0.0
    print("ACCEPTANCE ablation-direction: PASS (removing the policy layer strictly "
          "reduces LinUCB+on regret in both domains; no-fatigue keeps f at its "
          "initial value exactly)")


def test_determinism_byte_identical():
    config = RunConfig(domain="manufacturing", scenario="quality_crisis",
                       strategy="thompson", policies=True, seed=101)
    assert run(config).to_json() == run(config).to_json()
    spec = BatterySpec(program="ladder", seeds=(11, 13, 17),
                       domains=("software",), levels=("L0", "L2"))
    assert run_battery(spec).table.to_json() == run_battery(spec).table.to_json()
    print("ACCEPTANCE determinism: PASS (byte-identical RunResult and SummaryTable "
          "on replay)")


def test_oracle_dominance_brute_force():
    checked = 0
    rng = make_stream(999, "acceptance_oracle")
    for domain, scenario in DOMAIN_SCENARIO:
        ctx = _resolve(RunConfig(domain=domain, scenario=scenario,
                                 strategy="oracle", policies=False, seed=11), None)
        catalog = ctx.catalog
        while checked < 500 * (1 if domain == "software" else 2):
            sub = catalog[int(rng.integers(len(catalog)))]
            state = HumanState(fatigue=float(rng.uniform(0, 1)),
                               skill=float(rng.uniform(0, 1)))
            draws = NoiseDraws(float(rng.normal()), float(rng.normal()))
            evaluate_mode = _candidate_evaluator(ctx, sub, state, draws, (), ())
            feasible = tuple(m for m in ALL_MODES
                             if (sub.constraint == "none")
                             or (sub.constraint == "human_only" and m.value == "HumanOnly")
                             or (sub.constraint == "ai_only" and m.value == "Autonomous"))
            best = oracle_select(feasible, lambda m: evaluate_mode(m)[4])
            best_reward = evaluate_mode(best)[4]
            for mode in feasible:
                assert best_reward >= evaluate_mode(mode)[4] - 1e-12
            checked += 1
    assert checked >= 1000
    print(f"ACCEPTANCE oracle-dominance: PASS (argmax verified against all five "
          f"modes on {checked} sampled subtasks under common draws)")


def test_regret_floor_across_battery(strategy_results):
    entries = 0
    for key, results in strategy_results.items():
        for result in results:
            running = 0.0
            for rec in result.records:
                assert rec.regret >= 0.0, key
                running += rec.regret
                entries += 1
            assert running == pytest.approx(result.aggregate["cum_regret"])
    print(f"ACCEPTANCE regret-floor: PASS ({entries} per-subtask entries, all "
          f"non-negative with non-decreasing cumulative sums)")


def test_weight_sensitivity_rank_invariance():
    spec = BatterySpec(program="weight_sensitivity")
    result = run_battery(spec)
    notes = result.table.notes
    assert notes["all_invariant"] is True, notes["rank_invariance"]
    n_variants = len({row["variant"] for row in result.table.rows})
    assert n_variants == 11
    print("ACCEPTANCE weight-sensitivity: PASS (regret rank order unchanged under "
          "each single-weight ±30% perturbation, 10 seeds, both domains)")
