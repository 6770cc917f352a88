"""Stochastic execution model, reward, and well-being composition.

All randomness enters through explicit noise draws so realised and
counterfactual executions of the same subtask can share identical draws
(common random numbers).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .catalog import AffinityWeights, DEFAULT_WEIGHTS, ScenarioSpec, Subtask, ai_affinity
from .config import OutcomeModelConfig
from .errors import ValidationError
from .humanstate import HumanState, predicted_fatigue_increment
from .modes import AllocationSpec, CollaborationMode


@dataclass(frozen=True)
class NoiseDraws:
    """One standard-normal draw per agent, shared across counterfactuals."""

    z_human: float
    z_ai: float


@dataclass(frozen=True)
class ExecutionOutcome:
    quality: float
    time_taken: float
    cost: float
    human_hours: float
    ai_hours: float
    success: bool
    fatigue_increment: float
    relief: bool


@dataclass(frozen=True)
class RewardProfile:
    w_q: float = 0.30
    w_t: float = 0.20
    w_co: float = 0.10
    w_w: float = 0.40

    def __post_init__(self) -> None:
        vals = (self.w_q, self.w_t, self.w_co, self.w_w)
        if any(w < 0 for w in vals):
            raise ValidationError("reward weights must be non-negative")
        if abs(sum(vals) - 1.0) > 1e-9:
            raise ValidationError(f"reward weights must sum to 1, got {sum(vals)!r}")


REWARD_PROFILES = {
    "four_outcome": RewardProfile(0.30, 0.20, 0.10, 0.40),
    "cost_time": RewardProfile(0.0, 0.55, 0.45, 0.0),
    "quality_cost_time": RewardProfile(0.40, 0.30, 0.30, 0.0),
}


@dataclass(frozen=True)
class WellbeingWeights:
    fatigue: float = 0.35
    monotony: float = 0.20
    deskilling: float = 0.25
    exclusion: float = 0.10
    relief: float = 0.10


@dataclass(frozen=True)
class WellbeingSignals:
    fatigue_burden: float
    monotony: float
    deskilling: float
    exclusion: float
    relief: float

    def __post_init__(self) -> None:
        for name in ("fatigue_burden", "monotony", "deskilling", "exclusion", "relief"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"wellbeing signal {name}={v!r} outside [0, 1]")


@dataclass(frozen=True)
class Normalisers:
    time_norm: float
    cost_norm: float

    def __post_init__(self) -> None:
        if self.time_norm <= 0 or self.cost_norm <= 0:
            raise ValidationError("normalisers must be positive")


def normalisers_for(subtask: Subtask, scenario: ScenarioSpec,
                    cfg: OutcomeModelConfig | None = None) -> Normalisers:
    """Scale-free per-subtask normalisers: twice the baseline for time, the
    pure-human cost for money."""
    cfg = cfg or OutcomeModelConfig()
    return Normalisers(
        time_norm=subtask.baseline_duration * cfg.time_norm_factor,
        cost_norm=subtask.baseline_duration * scenario.human_agent.hourly_rate,
    )


def _clamp01(x: float) -> float:
    return max(0.0, min(1.0, x))


def quality_means(subtask: Subtask, state: HumanState,
                  weights: AffinityWeights = DEFAULT_WEIGHTS,
                  cfg: OutcomeModelConfig | None = None) -> tuple[float, float]:
    """Expected quality for (human, ai) on this subtask given the human state.

    The AI tracks the subtask's AI affinity; the human tracks the complement,
    modulated by current skill and fatigue.
    """
    cfg = cfg or OutcomeModelConfig()
    alpha = ai_affinity(subtask.profile, weights)
    mean_ai = alpha
    mean_h = ((1.0 - alpha)
              * (cfg.skill_quality_base + cfg.skill_quality_span * state.skill)
              * (1.0 - cfg.fatigue_quality_penalty * state.fatigue))
    return mean_h, mean_ai


def execute(subtask: Subtask, alloc: AllocationSpec, state: HumanState,
            scenario: ScenarioSpec, draws: NoiseDraws,
            weights: AffinityWeights = DEFAULT_WEIGHTS,
            cfg: OutcomeModelConfig | None = None,
            fatigue_rate_multiplier: float | None = None) -> ExecutionOutcome:
    """Simulate one subtask execution under an allocation.

    Pure modes use the single agent's quality draw; shared modes blend both
    draws by participation share plus a synergy bonus scaled by technical
    depth, and benefit from a partial-overlap factor on wall-clock time.
    """
    cfg = cfg or OutcomeModelConfig()
    mean_h, mean_ai = quality_means(subtask, state, weights, cfg)
    q_h = _clamp01(mean_h + scenario.human_agent.quality_noise * draws.z_human)
    q_ai = _clamp01(mean_ai + scenario.ai_agent.quality_noise * draws.z_ai)

    if alloc.mode is CollaborationMode.HUMAN_ONLY:
        quality = q_h
    elif alloc.mode is CollaborationMode.AUTONOMOUS:
        quality = q_ai
    else:
        synergy = (cfg.synergy_coefficient * alloc.sigma_h * alloc.sigma_ai
                   * subtask.profile.technical_depth)
        quality = _clamp01(alloc.sigma_h * q_h + alloc.sigma_ai * q_ai + synergy)

    effort = subtask.baseline_duration * (0.5 + subtask.profile.complexity)
    human_hours = alloc.sigma_h * effort
    ai_hours = alloc.sigma_ai * effort * cfg.ai_speed_factor
    if alloc.is_shared:
        time_taken = cfg.shared_overlap * (human_hours + ai_hours)
    else:
        time_taken = human_hours + ai_hours
    cost = (human_hours * scenario.human_agent.hourly_rate
            + ai_hours * scenario.ai_agent.hourly_rate)

    rate_mult = (fatigue_rate_multiplier if fatigue_rate_multiplier is not None
                 else scenario.pressure.fatigue_multiplier)
    increment = predicted_fatigue_increment(
        human_hours, subtask.profile.complexity,
        scenario.human_profile.fatigue_resistance, rate_mult)
    pure_increment = predicted_fatigue_increment(
        effort, subtask.profile.complexity,
        scenario.human_profile.fatigue_resistance, rate_mult)
    relief = alloc.is_shared and increment < pure_increment

    return ExecutionOutcome(
        quality=quality,
        time_taken=time_taken,
        cost=cost,
        human_hours=human_hours,
        ai_hours=ai_hours,
        success=quality >= cfg.success_threshold,
        fatigue_increment=increment,
        relief=relief,
    )


def counterfactual_pure(subtask: Subtask, agent_kind: str, state: HumanState,
                        scenario: ScenarioSpec, draws: NoiseDraws,
                        weights: AffinityWeights = DEFAULT_WEIGHTS,
                        cfg: OutcomeModelConfig | None = None) -> ExecutionOutcome:
    """Outcome had the subtask been executed purely by one agent.

    Uses the same noise draws and the pre-decision human state, bypassing
    constraint checks: the counterfactual is hypothetical by definition.
    """
    if agent_kind == "human":
        alloc = AllocationSpec(CollaborationMode.HUMAN_ONLY, 1.0, 0.0, "human")
    elif agent_kind == "ai":
        alloc = AllocationSpec(CollaborationMode.AUTONOMOUS, 0.0, 1.0, "ai")
    else:
        raise ValidationError(f"agent_kind must be 'human' or 'ai', got {agent_kind!r}")
    return execute(subtask, alloc, state, scenario, draws, weights, cfg)


def wellbeing(signals: WellbeingSignals,
              weights: WellbeingWeights = WellbeingWeights()) -> float:
    """Composite well-being: penalises fatigue, monotony, deskilling and
    exclusion; credits shared-mode relief. Clamped to [0, 1]."""
    value = (1.0
             - weights.fatigue * signals.fatigue_burden
             - weights.monotony * signals.monotony
             - weights.deskilling * signals.deskilling
             - weights.exclusion * signals.exclusion
             + weights.relief * signals.relief)
    return _clamp01(value)


def reward(outcome: ExecutionOutcome, wellbeing_value: float,
           profile: RewardProfile, norms: Normalisers) -> float:
    """Scalar reward blending quality, normalised time and cost, and well-being."""
    t_bar = _clamp01(outcome.time_taken / norms.time_norm)
    c_bar = _clamp01(outcome.cost / norms.cost_norm)
    return (profile.w_q * outcome.quality
            + profile.w_t * (1.0 - t_bar)
            + profile.w_co * (1.0 - c_bar)
            + profile.w_w * wellbeing_value)


# ---------------------------------------------------------------------------
# Well-being sub-signals from run history
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubtaskEvent:
    """Minimal trace of one executed subtask, for signal computation."""

    mode: CollaborationMode
    executing_agent: str        # human | ai | shared
    high_value: bool
    shared: bool
    relief: bool


def executing_agent_for(mode: CollaborationMode) -> str:
    if mode is CollaborationMode.HUMAN_ONLY:
        return "human"
    if mode is CollaborationMode.AUTONOMOUS:
        return "ai"
    return "shared"


def is_high_value(subtask: Subtask, score_min: float = 0.6) -> bool:
    return (subtask.profile.technical_depth >= score_min
            or subtask.profile.creativity >= score_min)


def wellbeing_signals(current: SubtaskEvent, prior_events: Sequence[SubtaskEvent],
                      sprint_events: Sequence[SubtaskEvent], fatigue: float,
                      cumulative_deskilling: float,
                      monotony_window: int = 5) -> WellbeingSignals:
    """Compute the five sub-signals for the subtask just executed.

    Monotony looks at up to the last `monotony_window` prior subtasks and is
    zero at the start of a run. Exclusion and relief are fractions over the
    current sprint including the current subtask.
    """
    window = list(prior_events)[-monotony_window:]
    if window:
        matches = sum(1 for e in window
                      if e.mode is current.mode and e.executing_agent == current.executing_agent)
        monotony = matches / len(window)
    else:
        monotony = 0.0

    sprint = list(sprint_events) + [current]
    exclusion_hits = sum(1 for e in sprint
                         if e.high_value and e.mode is CollaborationMode.AUTONOMOUS)
    exclusion = exclusion_hits / len(sprint)

    shared = [e for e in sprint if e.shared]
    relief = (sum(1 for e in shared if e.relief) / len(shared)) if shared else 0.0

    return WellbeingSignals(
        fatigue_burden=_clamp01(fatigue),
        monotony=monotony,
        deskilling=_clamp01(cumulative_deskilling),
        exclusion=exclusion,
        relief=relief,
    )
