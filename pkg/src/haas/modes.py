"""The five-mode autonomy spectrum: share equations, classification, instantiation."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .catalog import CognitiveProfile, Subtask
from .errors import ContractViolation, ValidationError

_EPS = 1e-9


class CollaborationMode(enum.Enum):
    """Five collaboration modes, ordered by increasing AI autonomy."""

    HUMAN_ONLY = "HumanOnly"
    COPILOT = "Copilot"
    PEER = "Peer"
    SUPERVISED = "Supervised"
    AUTONOMOUS = "Autonomous"

    @property
    def autonomy(self) -> int:
        return _AUTONOMY_RANK[self]

    def __lt__(self, other: "CollaborationMode") -> bool:
        return self.autonomy < other.autonomy

    @classmethod
    def from_name(cls, name: str) -> "CollaborationMode":
        for mode in cls:
            if mode.value == name:
                return mode
        raise ValidationError(f"unknown collaboration mode {name!r}")


_AUTONOMY_RANK = {
    CollaborationMode.HUMAN_ONLY: 0,
    CollaborationMode.COPILOT: 1,
    CollaborationMode.PEER: 2,
    CollaborationMode.SUPERVISED: 3,
    CollaborationMode.AUTONOMOUS: 4,
}

ALL_MODES = tuple(sorted(CollaborationMode, key=lambda m: m.autonomy))
SHARED_MODES = (CollaborationMode.COPILOT, CollaborationMode.PEER,
                CollaborationMode.SUPERVISED)


@dataclass(frozen=True)
class ShareBounds:
    """Clip bounds and thresholds for the within-mode share equations."""

    copilot_ai: tuple[float, float] = (0.20, 0.55)
    supervised_human: tuple[float, float] = (0.10, 0.40)
    peer_delta: float = 0.20
    hybrid_trigger: float = 0.35

    def __post_init__(self) -> None:
        for lo, hi in (self.copilot_ai, self.supervised_human):
            if not lo < hi:
                raise ValidationError(f"share bounds must satisfy lower < upper, got ({lo}, {hi})")


DEFAULT_BOUNDS = ShareBounds()


@dataclass(frozen=True)
class AllocationSpec:
    """A chosen mode with its real-valued participation split and lead agent."""

    mode: CollaborationMode
    sigma_h: float
    sigma_ai: float
    lead: str   # human | ai | none

    def __post_init__(self) -> None:
        if abs(self.sigma_h + self.sigma_ai - 1.0) > _EPS:
            raise ValidationError(
                f"participation shares must sum to 1, got {self.sigma_h}+{self.sigma_ai}")
        if self.lead not in ("human", "ai", "none"):
            raise ValidationError(f"unknown lead {self.lead!r}")

    @property
    def is_shared(self) -> bool:
        return self.mode in SHARED_MODES


_LEAD = {
    CollaborationMode.HUMAN_ONLY: "human",
    CollaborationMode.COPILOT: "human",
    CollaborationMode.PEER: "none",
    CollaborationMode.SUPERVISED: "ai",
    CollaborationMode.AUTONOMOUS: "ai",
}


def _clip(x: float, lo: float, hi: float) -> float:
    return max(lo, min(hi, x))


def copilot_ai_share(profile: CognitiveProfile, fatigue: float,
                     bounds: ShareBounds = DEFAULT_BOUNDS) -> float:
    """AI share inside Copilot: grows with excess fatigue and task complexity."""
    if not 0.0 <= fatigue <= 1.0:
        raise ValidationError(f"fatigue={fatigue!r} outside [0, 1]")
    excess = max(0.0, fatigue - bounds.hybrid_trigger)
    lo, hi = bounds.copilot_ai
    return _clip(0.60 * excess + 0.20 * profile.complexity, lo, hi)


def supervised_human_share(profile: CognitiveProfile, fatigue: float,
                           bounds: ShareBounds = DEFAULT_BOUNDS) -> float:
    """Human share inside Supervised: grows with judgment need, shrinks with high fatigue."""
    if not 0.0 <= fatigue <= 1.0:
        raise ValidationError(f"fatigue={fatigue!r} outside [0, 1]")
    lo, hi = bounds.supervised_human
    return _clip(0.35 * profile.judgment - 0.50 * max(0.0, fatigue - 0.65), lo, hi)


def classify_mode(sigma_h: float, bounds: ShareBounds = DEFAULT_BOUNDS) -> CollaborationMode:
    """Map a human share back to its mode.

    Exact 1.0 / 0.0 corners take precedence over the peer balance band; the
    dominant partner decides between Copilot and Supervised outside the band.
    """
    if not 0.0 <= sigma_h <= 1.0:
        raise ValidationError(f"sigma_h={sigma_h!r} outside [0, 1]")
    sigma_ai = 1.0 - sigma_h
    if abs(sigma_h - 1.0) <= _EPS:
        return CollaborationMode.HUMAN_ONLY
    if sigma_h <= _EPS:
        return CollaborationMode.AUTONOMOUS
    if abs(sigma_h - sigma_ai) <= bounds.peer_delta + _EPS:
        return CollaborationMode.PEER
    if sigma_h > 0.5:
        return CollaborationMode.COPILOT
    return CollaborationMode.SUPERVISED


def instantiate_mode(mode: CollaborationMode, subtask: Subtask, fatigue: float,
                     bounds: ShareBounds = DEFAULT_BOUNDS) -> AllocationSpec:
    """Turn a selected mode into concrete participation shares.

    The mode label is fixed at selection time; only the within-mode split
    adapts to fatigue and the subtask profile. Copilot keeps a human lead
    even when its AI share transiently exceeds 0.5.
    """
    if subtask.constraint == "human_only" and mode is not CollaborationMode.HUMAN_ONLY:
        raise ContractViolation(
            f"subtask {subtask.id!r} is human-only; mode {mode.value} not allowed")
    if subtask.constraint == "ai_only" and mode is not CollaborationMode.AUTONOMOUS:
        raise ContractViolation(
            f"subtask {subtask.id!r} is AI-only; mode {mode.value} not allowed")

    if mode is CollaborationMode.HUMAN_ONLY:
        sigma_h = 1.0
    elif mode is CollaborationMode.AUTONOMOUS:
        sigma_h = 0.0
    elif mode is CollaborationMode.PEER:
        sigma_h = 0.5
    elif mode is CollaborationMode.COPILOT:
        sigma_h = 1.0 - copilot_ai_share(subtask.profile, fatigue, bounds)
    else:
        sigma_h = supervised_human_share(subtask.profile, fatigue, bounds)
    return AllocationSpec(mode=mode, sigma_h=sigma_h, sigma_ai=1.0 - sigma_h,
                          lead=_LEAD[mode])


def bounds_for_scenario(scenario) -> ShareBounds:
    """ShareBounds with any scenario-file overrides applied."""
    return ShareBounds(
        copilot_ai=scenario.copilot_ai_bounds or DEFAULT_BOUNDS.copilot_ai,
        supervised_human=scenario.supervised_human_bounds or DEFAULT_BOUNDS.supervised_human,
        peer_delta=scenario.peer_delta if scenario.peer_delta is not None else DEFAULT_BOUNDS.peer_delta,
        hybrid_trigger=(scenario.hybrid_trigger if scenario.hybrid_trigger is not None
                        else DEFAULT_BOUNDS.hybrid_trigger),
    )
