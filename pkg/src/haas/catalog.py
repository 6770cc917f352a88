"""Task, agent, and scenario data model: affinity scoring, catalogue loading, sprint sampling."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ValidationError

SOFTWARE = "software"
MANUFACTURING = "manufacturing"
DOMAINS = (SOFTWARE, MANUFACTURING)

TASK_TYPES = {
    SOFTWARE: (
        "Requirements Analysis",
        "Architecture Design",
        "Code Generation",
        "Code Review",
        "Debugging",
        "Testing",
        "Refactoring",
        "Documentation",
    ),
    MANUFACTURING: (
        "Safety Supervision",
        "Quality Inspection",
        "Predictive Maintenance",
        "Assembly",
        "Logistics",
        "Machine Operation",
        "Process Programming",
        "Process Optimisation",
    ),
}

CONSTRAINTS = ("none", "human_only", "ai_only")

HUMAN_CENTRIC = "human_centric"
BALANCED = "balanced"
AI_CENTRIC = "ai_centric"

_BAND_LOWER = 0.45
_BAND_UPPER = 0.70


def _check_unit(value: float, name: str, context: str = "") -> None:
    if not (0.0 <= value <= 1.0):
        where = f" in {context}" if context else ""
        raise ValidationError(f"{name}={value!r}{where} is outside [0, 1]")


@dataclass(frozen=True)
class CognitiveProfile:
    """Five rubric scores describing a subtask, each in [0, 1]."""

    repetitiveness: float
    technical_depth: float
    creativity: float
    ambiguity: float
    human_interaction: float

    def __post_init__(self) -> None:
        for name in ("repetitiveness", "technical_depth", "creativity",
                     "ambiguity", "human_interaction"):
            _check_unit(getattr(self, name), name)

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.repetitiveness, self.technical_depth, self.creativity,
                self.ambiguity, self.human_interaction)

    @property
    def complexity(self) -> float:
        """Complexity proxy: mean of technical depth and ambiguity."""
        return (self.technical_depth + self.ambiguity) / 2.0

    @property
    def judgment(self) -> float:
        """Judgment-need proxy: mean of ambiguity and human interaction."""
        return (self.ambiguity + self.human_interaction) / 2.0


@dataclass(frozen=True)
class AffinityWeights:
    """Non-negative weights over the five dimensions, summing to one."""

    w_r: float = 0.35
    w_tau: float = 0.25
    w_c: float = 0.20
    w_a: float = 0.10
    w_h: float = 0.10

    def __post_init__(self) -> None:
        vals = self.as_tuple()
        if any(w < 0 for w in vals):
            raise ValidationError(f"affinity weights must be non-negative, got {vals}")
        if abs(sum(vals) - 1.0) > 1e-9:
            raise ValidationError(f"affinity weights must sum to 1, got {sum(vals)!r}")

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.w_r, self.w_tau, self.w_c, self.w_a, self.w_h)


DEFAULT_WEIGHTS = AffinityWeights()


@dataclass(frozen=True)
class Subtask:
    id: str
    name: str
    task_type: str
    domain: str
    profile: CognitiveProfile
    baseline_duration: float
    criticality: float
    constraint: str = "none"

    def __post_init__(self) -> None:
        if self.domain not in DOMAINS:
            raise ValidationError(f"unknown domain {self.domain!r} for subtask {self.id!r}")
        if self.task_type not in TASK_TYPES[self.domain]:
            raise ValidationError(
                f"task_type {self.task_type!r} is not valid for domain {self.domain!r}"
                f" (subtask {self.id!r})")
        if self.baseline_duration <= 0:
            raise ValidationError(f"baseline_duration must be > 0 (subtask {self.id!r})")
        _check_unit(self.criticality, "criticality", self.id)
        if self.constraint not in CONSTRAINTS:
            raise ValidationError(f"unknown constraint {self.constraint!r} (subtask {self.id!r})")


@dataclass(frozen=True)
class AgentProfile:
    kind: str                   # human | ai
    hourly_rate: float
    quality_noise: float

    def __post_init__(self) -> None:
        if self.kind not in ("human", "ai"):
            raise ValidationError(f"agent kind must be 'human' or 'ai', got {self.kind!r}")
        if self.hourly_rate <= 0:
            raise ValidationError("hourly_rate must be > 0")
        if self.quality_noise < 0:
            raise ValidationError("quality_noise must be >= 0")


@dataclass(frozen=True)
class HumanProfile:
    initial_skill: float = 0.5
    fatigue_resistance: float = 1.0
    experience: float = 0.5
    process_maturity: float = 0.5

    def __post_init__(self) -> None:
        for name in ("initial_skill", "experience", "process_maturity"):
            _check_unit(getattr(self, name), name)
        if self.fatigue_resistance <= 0:
            raise ValidationError("fatigue_resistance must be > 0")


@dataclass(frozen=True)
class PressureSpec:
    """Scenario pressure: fatigue-rate multiplier plus per-task-type mix weighting."""

    fatigue_multiplier: float = 1.0
    time_budget_multiplier: float = 1.0
    mix_weights: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.fatigue_multiplier <= 0 or self.time_budget_multiplier <= 0:
            raise ValidationError("pressure multipliers must be > 0")
        for task_type, weight in self.mix_weights.items():
            if weight <= 0:
                raise ValidationError(f"mix weight for {task_type!r} must be > 0")
        object.__setattr__(self, "mix_weights", dict(self.mix_weights))

    def weight_for(self, task_type: str) -> float:
        return self.mix_weights.get(task_type, 1.0)


@dataclass(frozen=True)
class ScenarioSpec:
    domain: str
    key: str
    name: str
    cycles: int = 8
    subtasks_per_cycle: int = 4
    pressure: PressureSpec = field(default_factory=PressureSpec)
    human_agent: AgentProfile = None  # type: ignore[assignment]
    ai_agent: AgentProfile = None     # type: ignore[assignment]
    human_profile: HumanProfile = field(default_factory=HumanProfile)
    time_budget_hours: float = 32.0
    # optional share-bound overrides, applied when building the mode table
    peer_delta: float | None = None
    hybrid_trigger: float | None = None
    copilot_ai_bounds: tuple[float, float] | None = None
    supervised_human_bounds: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.domain not in DOMAINS:
            raise ValidationError(f"unknown domain {self.domain!r} for scenario {self.key!r}")
        if self.cycles < 1 or self.subtasks_per_cycle < 1:
            raise ValidationError("cycles and subtasks_per_cycle must be >= 1")
        if self.human_agent is None:
            object.__setattr__(self, "human_agent", _DEFAULT_AGENTS[self.domain][0])
        if self.ai_agent is None:
            object.__setattr__(self, "ai_agent", _DEFAULT_AGENTS[self.domain][1])
        if self.time_budget_hours <= 0:
            raise ValidationError("time_budget_hours must be > 0")

    @property
    def effective_time_budget(self) -> float:
        return self.time_budget_hours * self.pressure.time_budget_multiplier

    def with_cycles(self, cycles: int) -> "ScenarioSpec":
        return replace(self, cycles=cycles)


_DEFAULT_AGENTS = {
    SOFTWARE: (AgentProfile("human", 50.0, 0.07), AgentProfile("ai", 2.0, 0.04)),
    MANUFACTURING: (AgentProfile("human", 32.0, 0.07), AgentProfile("ai", 8.0, 0.04)),
}


# ---------------------------------------------------------------------------
# Affinity scoring
# ---------------------------------------------------------------------------

def ai_affinity(profile: CognitiveProfile, weights: AffinityWeights = DEFAULT_WEIGHTS) -> float:
    """Scalar suitability of a subtask for AI execution.

    Repetitiveness and technical depth pull toward AI; creativity, ambiguity
    and human interaction (inverted) pull toward the human. The human-side
    affinity is the complement 1 - result.
    """
    r, tau, c, a, h = profile.as_tuple()
    return (weights.w_r * r
            + weights.w_tau * tau
            + weights.w_c * (1.0 - c)
            + weights.w_a * (1.0 - a)
            + weights.w_h * (1.0 - h))


def affinity_band(alpha: float) -> str:
    """Classify an affinity score into human-centric / balanced / AI-centric."""
    _check_unit(alpha, "alpha")
    if alpha < _BAND_LOWER:
        return HUMAN_CENTRIC
    if alpha < _BAND_UPPER:
        return BALANCED
    return AI_CENTRIC


def perturb_weights(weights: AffinityWeights,
                    fractions: float | Sequence[float]) -> AffinityWeights:
    """Scale each weight by (1 + fraction_i), then renormalise to sum one.

    `fractions` is either a single ratio applied to every weight or one ratio
    per dimension; ratios must stay in (-1, 1).
    """
    base = weights.as_tuple()
    if isinstance(fractions, (int, float)):
        fracs = [float(fractions)] * 5
    else:
        fracs = [float(x) for x in fractions]
        if len(fracs) != 5:
            raise ValidationError(f"expected 5 perturbation fractions, got {len(fracs)}")
    if any(abs(x) >= 1.0 for x in fracs):
        raise ValidationError("perturbation fractions must satisfy |fraction| < 1")
    scaled = [w * (1.0 + f) for w, f in zip(base, fracs)]
    if any(w < 0 for w in scaled):
        raise ValidationError("perturbation produced a negative weight")
    total = sum(scaled)
    if total <= 0:
        raise ValidationError("perturbation collapsed all weights to zero")
    return AffinityWeights(*(w / total for w in scaled))


# ---------------------------------------------------------------------------
# Catalogue loading
# ---------------------------------------------------------------------------

def _parse_document(document) -> dict:
    if isinstance(document, (str, Path)):
        try:
            return json.loads(Path(document).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"catalogue file {document} is not valid JSON: {exc}") from exc
    if isinstance(document, Mapping):
        return dict(document)
    raise ValidationError(f"expected a path or parsed JSON object, got {type(document)!r}")


def load_catalog(document) -> list[Subtask]:
    """Parse and validate a catalogue document (path or parsed JSON)."""
    doc = _parse_document(document)
    domain = doc.get("domain")
    rows = doc.get("subtasks", [])
    subtasks: list[Subtask] = []
    for row in rows:
        try:
            profile = CognitiveProfile(
                repetitiveness=row["profile"]["r"],
                technical_depth=row["profile"]["tau"],
                creativity=row["profile"]["c"],
                ambiguity=row["profile"]["a"],
                human_interaction=row["profile"]["h"],
            )
            subtasks.append(Subtask(
                id=row["id"],
                name=row["name"],
                task_type=row["task_type"],
                domain=row.get("domain", domain),
                profile=profile,
                baseline_duration=row["baseline_duration"],
                criticality=row["criticality"],
                constraint=row.get("constraint", "none"),
            ))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed catalogue row {row.get('id', row)!r}: {exc}") from exc
        except ValidationError as exc:
            raise ValidationError(f"invalid catalogue row {row.get('id', '?')!r}: {exc}") from exc
    return subtasks


def _data_path(filename: str):
    return resources.files("haas.data").joinpath(filename)


def load_default_catalog(domain: str) -> list[Subtask]:
    if domain not in DOMAINS:
        raise ValidationError(f"unknown domain {domain!r}")
    with resources.as_file(_data_path(f"catalog_{domain}.json")) as path:
        return load_catalog(path)


def _parse_scenario(row: Mapping, domain: str) -> ScenarioSpec:
    pressure = row.get("pressure", {})
    cost = row.get("cost_profile", {})
    human_agent = (AgentProfile(**cost["human"]) if "human" in cost
                   else _DEFAULT_AGENTS[domain][0])
    ai_agent = (AgentProfile(**cost["ai"]) if "ai" in cost
                else _DEFAULT_AGENTS[domain][1])
    hp = row.get("human_profile", {})
    bounds = row.get("share_bounds", {})
    return ScenarioSpec(
        domain=domain,
        key=row["key"],
        name=row["name"],
        cycles=row.get("cycles", 8),
        subtasks_per_cycle=row.get("subtasks_per_cycle", 4),
        pressure=PressureSpec(
            fatigue_multiplier=pressure.get("fatigue_multiplier", 1.0),
            time_budget_multiplier=pressure.get("time_budget_multiplier", 1.0),
            mix_weights=pressure.get("mix_weights", {}),
        ),
        human_agent=human_agent,
        ai_agent=ai_agent,
        human_profile=HumanProfile(**hp) if hp else HumanProfile(),
        time_budget_hours=row.get("time_budget_hours", 32.0),
        peer_delta=bounds.get("peer_delta"),
        hybrid_trigger=bounds.get("hybrid_trigger"),
        copilot_ai_bounds=tuple(bounds["copilot_ai_bounds"]) if "copilot_ai_bounds" in bounds else None,
        supervised_human_bounds=(tuple(bounds["supervised_human_bounds"])
                                 if "supervised_human_bounds" in bounds else None),
    )


def load_scenarios(document) -> list[ScenarioSpec]:
    doc = _parse_document(document)
    domain = doc.get("domain")
    if domain not in DOMAINS:
        raise ValidationError(f"scenario document has unknown domain {domain!r}")
    return [_parse_scenario(row, domain) for row in doc.get("scenarios", [])]


def load_default_scenarios(domain: str | None = None) -> list[ScenarioSpec]:
    domains = [domain] if domain else list(DOMAINS)
    out: list[ScenarioSpec] = []
    for d in domains:
        if d not in DOMAINS:
            raise ValidationError(f"unknown domain {d!r}")
        with resources.as_file(_data_path(f"scenarios_{d}.json")) as path:
            out.extend(load_scenarios(path))
    return out


def find_scenario(scenarios: Iterable[ScenarioSpec], key: str) -> ScenarioSpec:
    for sc in scenarios:
        if sc.key == key:
            return sc
    raise ValidationError(f"unknown scenario {key!r}")


# ---------------------------------------------------------------------------
# Sprint sampling
# ---------------------------------------------------------------------------

def sample_sprint(catalog: Sequence[Subtask], scenario: ScenarioSpec,
                  rng: np.random.Generator) -> list[Subtask]:
    """Draw one cycle's worth of subtasks, weighted by the scenario task mix.

    Draws are with replacement over the domain's catalogue; each subtask's
    weight is the scenario mix weight of its task type. Deterministic given
    the generator state.
    """
    pool = [s for s in catalog if s.domain == scenario.domain]
    if not pool:
        raise ValidationError(f"catalogue holds no subtasks for domain {scenario.domain!r}")
    weights = np.array([scenario.pressure.weight_for(s.task_type) for s in pool], dtype=float)
    probs = weights / weights.sum()
    idx = rng.choice(len(pool), size=scenario.subtasks_per_cycle, replace=True, p=probs)
    return [pool[i] for i in idx]
