"""Bandit allocators, heuristic warm-start, and baseline strategies.

Arms are keyed per (task type, mode): each task type learns its own
mode preferences. All selection is restricted to the governance-feasible
set, so learned behaviour can never escape the policy envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import AffinityWeights, DEFAULT_WEIGHTS, Subtask, affinity_band, ai_affinity
from .catalog import AI_CENTRIC, BALANCED, HUMAN_CENTRIC
from .config import BanditConfig
from .errors import ValidationError
from .modes import ALL_MODES, CollaborationMode

LEARNED_STRATEGIES = ("ucb1", "ducb", "linucb", "thompson")
BASELINE_STRATEGIES = ("affinity_heuristic", "random", "human_scheduler",
                       "fixed_human", "ai_only", "oracle")
ALL_STRATEGIES = LEARNED_STRATEGIES + BASELINE_STRATEGIES


@dataclass
class ArmStats:
    """Sufficient statistics for one (task type, mode) arm across all algorithms."""

    dim: int
    pulls: float = 0.0
    reward_sum: float = 0.0
    beta_a: float = 1.0
    beta_b: float = 1.0
    A: np.ndarray = field(init=False)
    b: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.A = np.eye(self.dim)
        self.b = np.zeros(self.dim)

    @property
    def mean_reward(self) -> float:
        return self.reward_sum / self.pulls if self.pulls > 0 else 0.0


@dataclass
class BanditState:
    """Per-run learner state; exclusively owned by one run."""

    dim: int = 6
    arms: dict = field(default_factory=dict)

    def arm(self, task_type: str, mode: CollaborationMode) -> ArmStats:
        key = (task_type, mode)
        if key not in self.arms:
            self.arms[key] = ArmStats(dim=self.dim)
        return self.arms[key]

    def total_pulls(self, task_type: str) -> float:
        return sum(stats.pulls for (tt, _), stats in self.arms.items() if tt == task_type)


def make_context(subtask: Subtask, fatigue: float, include_fatigue: bool = True) -> np.ndarray:
    """Context vector: the five profile scores, optionally extended by fatigue."""
    base = list(subtask.profile.as_tuple())
    if include_fatigue:
        base.append(fatigue)
    vec = np.array(base, dtype=float)
    if np.any(vec < 0) or np.any(vec > 1):
        raise ValidationError("context entries must lie in [0, 1]")
    return vec


def _autonomy_step_down(mode: CollaborationMode) -> CollaborationMode:
    rank = max(0, mode.autonomy - 1)
    return ALL_MODES[rank]


def nearest_feasible(preferred: CollaborationMode,
                     feasible: tuple[CollaborationMode, ...]) -> CollaborationMode:
    """Closest feasible mode by autonomy distance; ties resolve downward."""
    if preferred in feasible:
        return preferred
    return min(feasible, key=lambda m: (abs(m.autonomy - preferred.autonomy), m.autonomy))


def warm_start_select(subtask: Subtask, feasible: tuple[CollaborationMode, ...],
                      weights: AffinityWeights = DEFAULT_WEIGHTS,
                      tutor_active: bool = False) -> CollaborationMode:
    """Heuristic mode preference from the affinity band, projected to the
    feasible set.

    Extreme affinities map to the pure modes; tutor mode shifts the
    preference one step toward lower autonomy to reactivate human practice.
    """
    if not feasible:
        raise ValidationError("feasible set must be non-empty")
    alpha = ai_affinity(subtask.profile, weights)
    if alpha <= 0.20:
        preferred = CollaborationMode.HUMAN_ONLY
    elif alpha >= 0.80:
        preferred = CollaborationMode.AUTONOMOUS
    else:
        band = affinity_band(alpha)
        preferred = {
            HUMAN_CENTRIC: CollaborationMode.COPILOT,
            BALANCED: CollaborationMode.PEER,
            AI_CENTRIC: CollaborationMode.SUPERVISED,
        }[band]
    if tutor_active:
        preferred = _autonomy_step_down(preferred)
    return nearest_feasible(preferred, feasible)


def _ucb_select(state: BanditState, task_type: str,
                feasible: tuple[CollaborationMode, ...], c: float) -> CollaborationMode:
    unpulled = [m for m in feasible if state.arm(task_type, m).pulls <= 0.0]
    if unpulled:
        return min(unpulled, key=lambda m: m.autonomy)
    total = state.total_pulls(task_type)
    log_total = math.log(max(total, 1.0))
    best, best_value = None, -math.inf
    for mode in sorted(feasible, key=lambda m: m.autonomy):
        arm = state.arm(task_type, mode)
        value = arm.mean_reward + c * math.sqrt(log_total / arm.pulls)
        if value > best_value:
            best, best_value = mode, value
    return best


def _linucb_select(state: BanditState, task_type: str, context: np.ndarray,
                   feasible: tuple[CollaborationMode, ...], alpha: float) -> CollaborationMode:
    # ties (e.g. several untouched ridge models) resolve toward higher
    # autonomy, so the contextual learner explores the AI-forward frontier first
    x = context
    best, best_value = None, -math.inf
    for mode in sorted(feasible, key=lambda m: -m.autonomy):
        arm = state.arm(task_type, mode)
        a_inv_x = np.linalg.solve(arm.A, x)
        theta = np.linalg.solve(arm.A, arm.b)
        value = float(theta @ x + alpha * math.sqrt(max(0.0, x @ a_inv_x)))
        if value > best_value:
            best, best_value = mode, value
    return best


def _thompson_select(state: BanditState, task_type: str,
                     feasible: tuple[CollaborationMode, ...],
                     rng: np.random.Generator) -> CollaborationMode:
    best, best_value = None, -math.inf
    for mode in sorted(feasible, key=lambda m: m.autonomy):
        arm = state.arm(task_type, mode)
        value = float(rng.beta(arm.beta_a, arm.beta_b))
        if value > best_value:
            best, best_value = mode, value
    return best


def select(strategy: str, state: BanditState, subtask: Subtask, context: np.ndarray,
           feasible: tuple[CollaborationMode, ...], sprint_index: int,
           rng: np.random.Generator, cfg: BanditConfig | None = None,
           weights: AffinityWeights = DEFAULT_WEIGHTS,
           tutor_active: bool = False) -> CollaborationMode:
    """Learned-strategy mode selection, warm-started for the first sprints."""
    cfg = cfg or BanditConfig()
    if not feasible:
        raise ValidationError("feasible set must be non-empty")
    if strategy not in LEARNED_STRATEGIES:
        raise ValidationError(f"{strategy!r} is not a learned strategy")
    if sprint_index < cfg.t_explore:
        return warm_start_select(subtask, feasible, weights, tutor_active)
    if len(feasible) == 1:
        return feasible[0]
    if strategy in ("ucb1", "ducb"):
        return _ucb_select(state, subtask.task_type, feasible, cfg.ucb_c)
    if strategy == "linucb":
        return _linucb_select(state, subtask.task_type, context, feasible, cfg.linucb_alpha)
    return _thompson_select(state, subtask.task_type, feasible, rng)


def update(strategy: str, state: BanditState, task_type: str, mode: CollaborationMode,
           context: np.ndarray, reward_value: float,
           cfg: BanditConfig | None = None) -> BanditState:
    """Fold one observed reward into the learner's statistics."""
    cfg = cfg or BanditConfig()
    r = max(0.0, min(1.0, reward_value))
    if strategy == "ducb":
        # exponential forgetting: one decay per decision epoch for this task type
        for (tt, _), arm in state.arms.items():
            if tt == task_type:
                arm.pulls *= cfg.ducb_gamma
                arm.reward_sum *= cfg.ducb_gamma
    arm = state.arm(task_type, mode)
    if strategy in ("ucb1", "ducb"):
        arm.pulls += 1.0
        arm.reward_sum += r
    elif strategy == "thompson":
        arm.pulls += 1.0
        arm.reward_sum += r
        arm.beta_a += r
        arm.beta_b += 1.0 - r
    elif strategy == "linucb":
        arm.pulls += 1.0
        arm.reward_sum += r
        arm.A += np.outer(context, context)
        arm.b += r * context
    else:
        raise ValidationError(f"{strategy!r} is not a learned strategy")
    return state


def baseline_select(strategy: str, subtask: Subtask,
                    feasible: tuple[CollaborationMode, ...], sprint_index: int,
                    rng: np.random.Generator,
                    frozen_prefs: dict | None = None,
                    weights: AffinityWeights = DEFAULT_WEIGHTS,
                    tutor_active: bool = False) -> tuple[CollaborationMode, bool]:
    """Non-learning strategies. Returns (mode, intervened): `intervened` is
    set when governance pushed the strategy off its preferred mode."""
    if not feasible:
        raise ValidationError("feasible set must be non-empty")
    if strategy == "fixed_human":
        preferred = CollaborationMode.HUMAN_ONLY
    elif strategy == "ai_only":
        preferred = CollaborationMode.AUTONOMOUS
    elif strategy == "random":
        idx = int(rng.integers(len(feasible)))
        return sorted(feasible, key=lambda m: m.autonomy)[idx], False
    elif strategy == "affinity_heuristic":
        return warm_start_select(subtask, feasible, weights, tutor_active), False
    elif strategy == "human_scheduler":
        if frozen_prefs is None:
            raise ValidationError("human_scheduler needs a frozen-preference store")
        # manager preferences freeze at first encounter and replay thereafter
        if subtask.task_type not in frozen_prefs:
            frozen_prefs[subtask.task_type] = warm_start_select(subtask, ALL_MODES, weights)
        preferred = frozen_prefs[subtask.task_type]
    else:
        raise ValidationError(f"{strategy!r} is not a baseline strategy")
    selected = nearest_feasible(preferred, feasible)
    return selected, selected is not preferred


def oracle_select(feasible: tuple[CollaborationMode, ...],
                  reward_evaluator) -> CollaborationMode:
    """Hindsight mode choice: evaluate every feasible mode under common
    random draws and take the argmax; ties break toward lower autonomy."""
    if not feasible:
        raise ValidationError("feasible set must be non-empty")
    best, best_value = None, -math.inf
    for mode in sorted(feasible, key=lambda m: m.autonomy):
        value = reward_evaluator(mode)
        if value > best_value:
            best, best_value = mode, value
    return best
