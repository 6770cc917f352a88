"""Fatigue, trust, and deskilling dynamics for the single human agent."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .config import HumanDynamicsConfig
from .errors import ValidationError


@dataclass
class HumanState:
    fatigue: float = 0.0
    trust: float = 0.80
    skill: float = 0.5
    peak_fatigue: float = 0.0
    consecutive_high_ai_sprints: int = 0
    cumulative_deskilling: float = 0.0
    last_executing_agent: str = "none"      # human | ai | shared | none
    switch_accrued_this_cycle: float = 0.0
    tutor_mode_active: bool = False

    def __post_init__(self) -> None:
        for name in ("fatigue", "trust", "skill", "peak_fatigue"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name}={v!r} outside [0, 1]")

    def snapshot(self) -> "HumanState":
        return replace(self)


@dataclass(frozen=True)
class FatigueParams:
    """Bundled dynamics constants; mirrors the config section."""

    beta_f: float = 0.07
    switch_penalty: float = 0.015
    switch_cap_per_cycle: float = 0.08
    beta_r: float = 0.12
    lambda_chronic: float = 0.18

    @classmethod
    def from_config(cls, cfg: HumanDynamicsConfig) -> "FatigueParams":
        return cls(beta_f=cfg.beta_f, switch_penalty=cfg.switch_penalty,
                   switch_cap_per_cycle=cfg.switch_cap_per_cycle,
                   beta_r=cfg.beta_r, lambda_chronic=cfg.lambda_chronic)


def predicted_fatigue_increment(human_hours: float, complexity: float,
                                resistance: float, rate_multiplier: float = 1.0,
                                cfg: HumanDynamicsConfig | None = None) -> float:
    """Base fatigue accrual for a block of human work, before switch penalties."""
    cfg = cfg or HumanDynamicsConfig()
    if human_hours < 0:
        raise ValidationError("human_hours must be >= 0")
    return cfg.beta_f * human_hours * (0.5 + complexity) * rate_multiplier / resistance


def accrue_fatigue(state: HumanState, human_hours: float, complexity: float,
                   switched: bool, resistance: float = 1.0,
                   rate_multiplier: float = 1.0,
                   cfg: HumanDynamicsConfig | None = None) -> HumanState:
    """Accumulate fatigue from executed work plus any context-switch penalty.

    The switch penalty is capped per cycle; callers reset the per-cycle
    accumulator via `start_cycle`.
    """
    cfg = cfg or HumanDynamicsConfig()
    increment = predicted_fatigue_increment(human_hours, complexity, resistance,
                                            rate_multiplier, cfg)
    if switched:
        room = cfg.switch_cap_per_cycle - state.switch_accrued_this_cycle
        penalty = min(cfg.switch_penalty, max(0.0, room))
        increment += penalty
        state.switch_accrued_this_cycle += penalty
    state.fatigue = min(1.0, state.fatigue + increment)
    state.peak_fatigue = max(state.peak_fatigue, state.fatigue)
    return state


def recover(state: HumanState, rest_hours: float,
            cfg: HumanDynamicsConfig | None = None) -> HumanState:
    """Rest lowers fatigue, but a chronic residual keyed to the historical
    peak prevents full within-session recovery."""
    cfg = cfg or HumanDynamicsConfig()
    if rest_hours < 0:
        raise ValidationError("rest_hours must be >= 0")
    if rest_hours == 0:
        return state
    recovered = state.fatigue - cfg.beta_r * rest_hours
    if cfg.chronic_model == "floor":
        floor = cfg.lambda_chronic * state.peak_fatigue
        state.fatigue = max(recovered, floor)
    else:  # additive: recovery slows proportionally to the chronic load
        state.fatigue = max(0.0, recovered + cfg.lambda_chronic * state.peak_fatigue * min(
            1.0, cfg.beta_r * rest_hours))
    state.fatigue = min(1.0, max(0.0, state.fatigue))
    return state


def update_trust(state: HumanState, outcome: str,
                 cfg: HumanDynamicsConfig | None = None) -> HumanState:
    """Trust decays on errors and grows on successes, damped, floored at 0.35."""
    cfg = cfg or HumanDynamicsConfig()
    if outcome == "error":
        state.trust = max(cfg.trust_floor, state.trust - cfg.trust_decay * cfg.trust_damping)
    elif outcome == "success":
        state.trust = min(1.0, state.trust + cfg.trust_growth * cfg.trust_damping)
    else:
        raise ValidationError(f"outcome must be 'success' or 'error', got {outcome!r}")
    return state


def update_deskilling(state: HumanState, sprint_ai_fraction: float,
                      cycles_in_sprint: int = 1,
                      cfg: HumanDynamicsConfig | None = None) -> HumanState:
    """Sustained high AI execution erodes skill and triggers tutor mode.

    The counter increments when the sprint's AI-execution fraction exceeds
    the threshold; once it reaches the consecutive-sprint minimum, skill
    decays and tutor mode activates. A below-threshold sprint resets both.
    """
    cfg = cfg or HumanDynamicsConfig()
    if not 0.0 <= sprint_ai_fraction <= 1.0:
        raise ValidationError("sprint_ai_fraction must be in [0, 1]")
    if sprint_ai_fraction > cfg.rho_desk:
        state.consecutive_high_ai_sprints += 1
        if state.consecutive_high_ai_sprints >= cfg.desk_consecutive:
            decay = cfg.desk_rate * cycles_in_sprint
            state.skill = max(0.0, state.skill - decay)
            state.cumulative_deskilling += decay
            state.tutor_mode_active = True
    else:
        state.consecutive_high_ai_sprints = 0
        state.tutor_mode_active = False
    return state


def start_cycle(state: HumanState) -> HumanState:
    """Reset the per-cycle switch-penalty accumulator."""
    state.switch_accrued_this_cycle = 0.0
    return state
