"""Domain KPIs, regret accounting, governance screens, and the paired test.

KPI computation consumes the engine's per-subtask allocation records by
attribute name, so any record-like object with the documented fields works.
Exported column names are stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .config import KpiConfig, ScreenConfig, SimConfig
from .errors import DegenerateInputError, ValidationError
from .modes import CollaborationMode

SOFTWARE_SPRINT_COLUMNS = (
    "sprint", "lead_time", "defect_escape_pct", "rework_pct", "cost_per_feature",
    "hybrid_pct", "fatigue_avoided", "fatigue", "trust", "cum_deskilling",
    "human_participation_pct",
)
MANUFACTURING_SPRINT_COLUMNS = (
    "sprint", "oee_proxy", "scrap_pct", "safety_incidents", "cost_per_batch",
    "stockouts", "overload_hours", "hybrid_pct", "fatigue_avoided", "fatigue",
    "trust", "cum_deskilling", "human_participation_pct",
)
AGGREGATE_COLUMNS = (
    "objective", "lead_time", "quality", "cost", "fatigue", "trust",
    "cum_regret", "cum_deskilling", "human_participation_pct", "hybrid_pct",
    "human_only_share_pct", "copilot_share_pct", "peer_share_pct",
    "supervised_share_pct", "autonomous_share_pct",
    "policy_cap_pct", "policy_forced_pct", "constraint_forced_pct",
    "monotony", "shared_share", "autonomous_highvalue_share",
    "highvalue_human_share", "risky_shared_share", "governance_violations",
    "wellbeing_mean",
)


@dataclass
class RegretLedger:
    """Per-subtask non-negative regret entries with a running total."""

    entries: list[float] = field(default_factory=list)

    def add(self, value: float) -> None:
        if value < 0:
            raise ValidationError(f"regret entries must be >= 0, got {value!r}")
        self.entries.append(value)

    @property
    def total(self) -> float:
        return sum(self.entries)

    def cumulative(self) -> list[float]:
        out, running = [], 0.0
        for v in self.entries:
            running += v
            out.append(running)
        return out


def subtask_regret(realised_reward: float, cf_human_reward: float,
                   cf_ai_reward: float) -> float:
    """Reward gap to the better pure counterfactual, floored at zero."""
    return max(0.0, max(cf_human_reward, cf_ai_reward) - realised_reward)


def _share(records, predicate) -> float:
    if not records:
        return 0.0
    return sum(1 for r in records if predicate(r)) / len(records)


def compute_kpis(records: Sequence, scenario, cfg: SimConfig | None = None):
    """Per-sprint KPI rows plus a run-level aggregate for one event log.

    Returns (per_sprint, aggregate) where both contain stable column names.
    """
    cfg = cfg or SimConfig()
    kpi = cfg.kpi
    if not records:
        raise ValidationError("cannot compute KPIs over an empty event log")
    domain = scenario.domain
    per_cycle: dict[int, list] = {}
    for rec in records:
        per_cycle.setdefault(rec.cycle, []).append(rec)

    time_budget = scenario.effective_time_budget
    per_sprint: list[dict] = []
    for cycle in sorted(per_cycle):
        group = per_cycle[cycle]
        sprint_time = sum(r.time_taken for r in group)
        sprint_cost = sum(r.cost for r in group)
        human_hours = sum(r.human_hours for r in group)
        ai_hours = sum(r.ai_hours for r in group)
        total_hours = human_hours + ai_hours
        shared = [r for r in group if r.shared]
        fatigue_avoided = sum(r.pure_human_increment - r.fatigue_increment for r in shared)
        last = group[-1]
        row = {
            "sprint": cycle,
            "hybrid_pct": 100.0 * _share(group, lambda r: r.shared),
            "fatigue_avoided": fatigue_avoided,
            "fatigue": last.fatigue_after,
            "trust": last.trust_after,
            "cum_deskilling": last.cum_deskilling_after,
            "human_participation_pct": (100.0 * human_hours / total_hours
                                        if total_hours > 0 else 0.0),
        }
        if domain == "software":
            row.update({
                "lead_time": sprint_time,
                "defect_escape_pct": 100.0 * _share(
                    group, lambda r: r.quality < kpi.defect_threshold),
                "rework_pct": 100.0 * _share(
                    group, lambda r: kpi.defect_threshold <= r.quality < kpi.rework_upper),
                "cost_per_feature": sprint_cost / len(group),
            })
        else:
            mean_q = sum(r.quality for r in group) / len(group)
            mean_util = sum(1.0 - min(1.0, r.time_taken / (r.baseline_duration
                                                           * cfg.outcome.time_norm_factor))
                            for r in group) / len(group)
            row.update({
                "oee_proxy": mean_q * mean_util,
                "scrap_pct": 100.0 * _share(group, lambda r: r.quality < kpi.scrap_threshold),
                "safety_incidents": sum(
                    1 for r in group
                    if r.task_type == "Safety Supervision" and r.sigma_ai >= 1.0 - 1e-9
                    and r.quality < kpi.safety_quality_threshold),
                "cost_per_batch": sprint_cost / len(group),
                "stockouts": 1 if sprint_time > time_budget else 0,
                "overload_hours": max(0.0, ai_hours - kpi.ai_capacity_hours_per_sprint),
            })
        per_sprint.append(row)

    n = len(records)
    sprint_costs = [sum(r.cost for r in per_cycle[c]) for c in sorted(per_cycle)]
    sprint_times = [sum(r.time_taken for r in per_cycle[c]) for c in sorted(per_cycle)]
    mean_sprint_cost = sum(sprint_costs) / len(sprint_costs)
    human_hours_total = sum(r.human_hours for r in records)
    hours_total = human_hours_total + sum(r.ai_hours for r in records)
    last = records[-1]

    high_value = [r for r in records if r.high_value]
    risky = [r for r in records if r.risk >= cfg.screens.risky_risk_min]
    mode_share = {mode: _share(records, lambda r, m=mode: r.mode is m)
                  for mode in CollaborationMode}

    aggregate = {
        "objective": mean_sprint_cost / scenario.subtasks_per_cycle,
        "lead_time": sum(sprint_times) / len(sprint_times),
        "quality": sum(r.quality for r in records) / n,
        "cost": mean_sprint_cost,
        "fatigue": last.fatigue_after,
        "trust": last.trust_after,
        "cum_regret": sum(r.regret for r in records),
        "cum_deskilling": last.cum_deskilling_after,
        "human_participation_pct": (100.0 * human_hours_total / hours_total
                                    if hours_total > 0 else 0.0),
        "hybrid_pct": 100.0 * _share(records, lambda r: r.shared),
        "human_only_share_pct": 100.0 * mode_share[CollaborationMode.HUMAN_ONLY],
        "copilot_share_pct": 100.0 * mode_share[CollaborationMode.COPILOT],
        "peer_share_pct": 100.0 * mode_share[CollaborationMode.PEER],
        "supervised_share_pct": 100.0 * mode_share[CollaborationMode.SUPERVISED],
        "autonomous_share_pct": 100.0 * mode_share[CollaborationMode.AUTONOMOUS],
        "policy_cap_pct": 100.0 * _share(records, lambda r: r.directive_kind == "cap"),
        "policy_forced_pct": 100.0 * _share(
            records, lambda r: r.directive_kind in ("forced_assignment", "forced_mode")
            and not r.constraint_forced),
        "constraint_forced_pct": 100.0 * _share(records, lambda r: r.constraint_forced),
        "monotony": sum(r.monotony for r in records) / n,
        "shared_share": _share(records, lambda r: r.shared),
        "autonomous_highvalue_share": (
            _share(high_value, lambda r: r.mode is CollaborationMode.AUTONOMOUS)
            if high_value else 0.0),
        "highvalue_human_share": (
            _share(high_value, lambda r: r.sigma_h > 1e-9) if high_value else 1.0),
        "risky_shared_share": (_share(risky, lambda r: r.shared) if risky else 1.0),
        "governance_violations": sum(1 for r in records if r.violation),
        "wellbeing_mean": sum(r.wellbeing for r in records) / n,
    }
    if domain == "software":
        aggregate.update({
            "defect_escape_pct": 100.0 * _share(
                records, lambda r: r.quality < kpi.defect_threshold),
            "rework_pct": 100.0 * _share(
                records, lambda r: kpi.defect_threshold <= r.quality < kpi.rework_upper),
        })
    else:
        aggregate.update({
            "oee_proxy": sum(row["oee_proxy"] for row in per_sprint) / len(per_sprint),
            "scrap_pct": 100.0 * _share(records, lambda r: r.quality < kpi.scrap_threshold),
            "safety_incidents": sum(row["safety_incidents"] for row in per_sprint),
            "stockouts": sum(row["stockouts"] for row in per_sprint),
            "overload_hours": sum(row["overload_hours"] for row in per_sprint),
        })
    return per_sprint, aggregate


def screens(aggregate: dict, thresholds: ScreenConfig | None = None) -> dict:
    """Nested diagnostic gates over a run aggregate."""
    t = thresholds or ScreenConfig()
    acceptable = (
        aggregate["quality"] >= t.q_min
        and aggregate["fatigue"] <= t.f_max
        and aggregate["cum_deskilling"] <= t.desk_max
        and aggregate["human_participation_pct"] / 100.0 >= t.participation_min
        and aggregate["governance_violations"] == 0
    )
    reasonable = (
        acceptable
        and aggregate["monotony"] <= t.monotony_max
        and aggregate["shared_share"] >= t.shared_min
        and aggregate["autonomous_highvalue_share"] <= t.autonomous_highvalue_max
    )
    responsible = (
        reasonable
        and aggregate["highvalue_human_share"] >= t.highvalue_human_min
        and aggregate["risky_shared_share"] >= t.risky_shared_min
    )
    return {"acceptable": acceptable, "reasonable": reasonable, "responsible": responsible}


# ---------------------------------------------------------------------------
# Wilcoxon signed-rank test
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WilcoxonResult:
    w: float
    z: float
    p_value: float
    effect_size_r: float
    n_used: int
    exact: bool


def _rank_abs(values: Sequence[float]) -> list[float]:
    """Average ranks of absolute values (ties share their mean rank)."""
    order = sorted(range(len(values)), key=lambda i: abs(values[i]))
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and abs(values[order[j + 1]]) == abs(values[order[i]]):
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _exact_min_ranksum_p(ranks: Sequence[float], w_obs: float) -> float:
    """P(min(R+, R-) <= w_obs) under uniform random signs, by counting.

    Works on doubled ranks so tied (half-integer) average ranks stay integral.
    """
    doubled = [int(round(2.0 * r)) for r in ranks]
    total = sum(doubled)
    ways = [0] * (total + 1)
    ways[0] = 1
    for d in doubled:
        for s in range(total, d - 1, -1):
            ways[s] += ways[s - d]
    w2 = int(round(2.0 * w_obs))
    low = sum(ways[s] for s in range(0, min(w2, total) + 1))
    high = sum(ways[s] for s in range(max(0, total - w2), total + 1))
    overlap = ways[total // 2] if (2 * w2 == total and total % 2 == 0) else 0
    return (low + high - overlap) / float(2 ** len(ranks))


def wilcoxon_signed_rank(pairs: Sequence[tuple[float, float]],
                         exact_threshold: int = 12) -> WilcoxonResult:
    """Two-sided Wilcoxon signed-rank test over paired values.

    Zero differences are dropped. W is the smaller signed-rank sum; Z uses
    the tie-corrected normal approximation and the effect size is |Z|/sqrt(N).
    For N at or below `exact_threshold` the p-value is exact (full sign-flip
    distribution); otherwise the normal approximation is used.
    """
    diffs = [float(a) - float(b) for a, b in pairs]
    diffs = [d for d in diffs if d != 0.0]
    n = len(diffs)
    if n < 5:
        raise DegenerateInputError(
            f"need at least 5 non-zero differences, got {n}")
    ranks = _rank_abs(diffs)
    r_plus = sum(r for r, d in zip(ranks, diffs) if d > 0)
    r_minus = sum(r for r, d in zip(ranks, diffs) if d < 0)
    w = min(r_plus, r_minus)

    mu = n * (n + 1) / 4.0
    tie_counts: dict[float, int] = {}
    for d in diffs:
        tie_counts[abs(d)] = tie_counts.get(abs(d), 0) + 1
    tie_term = sum(t ** 3 - t for t in tie_counts.values())
    var = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term / 48.0
    if var <= 0:
        raise DegenerateInputError("zero variance: all differences identical in rank")
    z = (w - mu) / math.sqrt(var)

    if n <= exact_threshold:
        p = _exact_min_ranksum_p(ranks, w)
        exact = True
    else:
        p = math.erfc(abs(z) / math.sqrt(2.0))
        exact = False
    p = min(1.0, p)
    return WilcoxonResult(w=w, z=z, p_value=p, effect_size_r=abs(z) / math.sqrt(n),
                          n_used=n, exact=exact)
