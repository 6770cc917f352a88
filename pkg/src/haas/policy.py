"""Forward-chaining governance rule engine and ladder assembly.

Rules fire in ascending priority; the first match wins. Subtask hard
constraints are synthesized as priority-0 rules active at every level (they
are task-card facts, not ladder policy). The dynamic autonomy-cap rule is
evaluated last, once no static rule has fired.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .catalog import HumanProfile, Subtask
from .config import PolicyConfig
from .errors import ValidationError
from .modes import ALL_MODES, CollaborationMode

LEVELS = ("L0", "L1", "L2", "L3", "L4")

# (risk_threshold, budget_threshold) per ladder level; L0 disables the layer.
LEVEL_THRESHOLDS: dict[str, tuple[float, float] | None] = {
    "L0": None,
    "L1": (0.72, 0.45),
    "L2": (0.62, 0.58),
    "L3": (0.52, 0.68),
    "L4": (0.40, 0.78),
}

DYNAMIC_PRIORITY = "dynamic"

CONSTRAINT_RULE_HUMAN = "constraint_human_only"
CONSTRAINT_RULE_AI = "constraint_ai_only"


@dataclass(frozen=True)
class RuleCondition:
    task_types: frozenset[str] = frozenset()
    subtask_names: frozenset[str] = frozenset()
    fatigue_above: float | None = None
    constraint: str | None = None      # matches the subtask's hard-constraint flag
    dynamic: str | None = None         # "risk_budget" marks the runtime cap rule

    def matches(self, subtask: Subtask, fatigue: float) -> bool:
        if self.constraint is not None:
            return subtask.constraint == self.constraint
        if self.fatigue_above is not None and not fatigue > self.fatigue_above:
            return False
        if self.task_types and subtask.task_type not in self.task_types:
            return False
        if self.subtask_names and subtask.name not in self.subtask_names:
            return False
        # a rule with neither task/name filters nor a fatigue test matches nothing
        return bool(self.task_types or self.subtask_names or self.fatigue_above is not None)


@dataclass(frozen=True)
class PolicyRule:
    id: str
    domain_scope: str               # software | manufacturing | both
    rule_type: str                  # hard | mode | cap
    condition: RuleCondition
    force_agent: str | None = None
    force_mode: CollaborationMode | None = None
    cap_mode: CollaborationMode | None = None
    priority: int | str = 100       # lower fires first; "dynamic" for the cap
    min_level: str = "L1"

    def __post_init__(self) -> None:
        if self.domain_scope not in ("software", "manufacturing", "both"):
            raise ValidationError(f"rule {self.id!r}: bad domain_scope {self.domain_scope!r}")
        if self.rule_type == "hard" and self.force_agent not in ("human", "ai"):
            raise ValidationError(f"hard rule {self.id!r} must carry force_agent")
        if self.rule_type == "mode" and self.force_mode is None:
            raise ValidationError(f"mode rule {self.id!r} must carry force_mode")
        if self.rule_type == "cap" and self.cap_mode is None:
            raise ValidationError(f"cap rule {self.id!r} must carry cap_mode")
        if self.min_level not in LEVELS:
            raise ValidationError(f"rule {self.id!r}: bad min_level {self.min_level!r}")

    @property
    def is_dynamic(self) -> bool:
        return self.priority == DYNAMIC_PRIORITY


@dataclass(frozen=True)
class GovernanceDirective:
    """Outcome of one rule-engine pass: exactly one of the four kinds."""

    kind: str                               # none | forced_assignment | forced_mode | cap
    agent: str | None = None
    mode: CollaborationMode | None = None
    fired_rule_id: str | None = None
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("none", "forced_assignment", "forced_mode", "cap"):
            raise ValidationError(f"bad directive kind {self.kind!r}")
        if (self.kind == "none") != (self.fired_rule_id is None):
            raise ValidationError("fired_rule_id must be present iff a rule fired")


NO_DIRECTIVE = GovernanceDirective(kind="none")


@dataclass(frozen=True)
class GovernanceLevel:
    level: str
    risk_threshold: float | None
    budget_threshold: float | None
    static_rules: tuple[PolicyRule, ...]    # constraint + ladder rules, priority-sorted
    cap_rule: PolicyRule | None

    @property
    def rule_ids(self) -> frozenset[str]:
        ids = {r.id for r in self.static_rules}
        if self.cap_rule is not None:
            ids.add(self.cap_rule.id)
        return frozenset(ids)


_CONSTRAINT_RULES = (
    PolicyRule(id=CONSTRAINT_RULE_HUMAN, domain_scope="both", rule_type="hard",
               condition=RuleCondition(constraint="human_only"),
               force_agent="human", priority=0, min_level="L0"),
    PolicyRule(id=CONSTRAINT_RULE_AI, domain_scope="both", rule_type="hard",
               condition=RuleCondition(constraint="ai_only"),
               force_agent="ai", priority=0, min_level="L0"),
)


def _parse_rule(row: Mapping) -> PolicyRule:
    cond = row.get("condition", {})
    effect = row.get("effect", {})
    return PolicyRule(
        id=row["id"],
        domain_scope=row.get("domain_scope", "both"),
        rule_type=row["rule_type"],
        condition=RuleCondition(
            task_types=frozenset(cond.get("task_types", ())),
            subtask_names=frozenset(cond.get("subtask_names", ())),
            fatigue_above=cond.get("fatigue_above"),
            dynamic=cond.get("dynamic"),
        ),
        force_agent=effect.get("force_agent"),
        force_mode=(CollaborationMode.from_name(effect["force_mode"])
                    if "force_mode" in effect else None),
        cap_mode=(CollaborationMode.from_name(effect["cap_mode"])
                  if "cap_mode" in effect else None),
        priority=row.get("priority", 100),
        min_level=row.get("min_level", "L1"),
    )


def load_rules(document=None) -> list[PolicyRule]:
    """Load a rule catalogue; defaults to the shipped benchmark rules."""
    if document is None:
        with resources.as_file(resources.files("haas.data").joinpath("rules.json")) as path:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
    elif isinstance(document, (str, Path)):
        data = json.loads(Path(document).read_text(encoding="utf-8"))
    else:
        data = dict(document)
    return [_parse_rule(row) for row in data.get("rules", [])]


def _level_rank(level: str) -> int:
    if level not in LEVELS:
        raise ValidationError(f"unknown governance level {level!r}")
    return LEVELS.index(level)


def build_level(level: str, domain: str, rules: Sequence[PolicyRule] | None = None) -> GovernanceLevel:
    """Assemble the active rule set for a ladder level in one domain."""
    rank = _level_rank(level)
    rules = list(rules) if rules is not None else load_rules()
    in_scope = [r for r in rules
                if r.domain_scope in (domain, "both") and _level_rank(r.min_level) <= rank]
    cap_rules = [r for r in in_scope if r.is_dynamic]
    if len(cap_rules) > 1:
        raise ValidationError("at most one dynamic cap rule may be active per level")
    static = [r for r in in_scope if not r.is_dynamic]
    static.extend(_CONSTRAINT_RULES)
    # equal priorities break ties lexicographically by rule id
    static.sort(key=lambda r: (int(r.priority), r.id))
    thresholds = LEVEL_THRESHOLDS[level]
    return GovernanceLevel(
        level=level,
        risk_threshold=thresholds[0] if thresholds else None,
        budget_threshold=thresholds[1] if thresholds else None,
        static_rules=tuple(static),
        cap_rule=cap_rules[0] if cap_rules else None,
    )


def risk_score(subtask: Subtask, cfg: PolicyConfig | None = None) -> float:
    """Task risk from the complexity proxy and the card's criticality."""
    cfg = cfg or PolicyConfig()
    return (cfg.risk_complexity_weight * subtask.profile.complexity
            + cfg.risk_criticality_weight * subtask.criticality)


def autonomy_budget(profile: HumanProfile, risk: float,
                    cfg: PolicyConfig | None = None) -> float:
    """How much autonomy the organisation affords, given operator and risk."""
    cfg = cfg or PolicyConfig()
    if not 0.0 <= risk <= 1.0:
        raise ValidationError(f"risk={risk!r} outside [0, 1]")
    return (cfg.budget_experience_weight * profile.experience
            + cfg.budget_maturity_weight * profile.process_maturity
            + cfg.budget_risk_weight * (1.0 - risk))


def _directive_for(rule: PolicyRule, warnings: tuple[str, ...] = ()) -> GovernanceDirective:
    if rule.rule_type == "hard":
        return GovernanceDirective(kind="forced_assignment", agent=rule.force_agent,
                                   fired_rule_id=rule.id, warnings=warnings)
    if rule.rule_type == "mode":
        return GovernanceDirective(kind="forced_mode", mode=rule.force_mode,
                                   fired_rule_id=rule.id, warnings=warnings)
    return GovernanceDirective(kind="cap", mode=rule.cap_mode,
                               fired_rule_id=rule.id, warnings=warnings)


def evaluate(level: GovernanceLevel, subtask: Subtask, human_state,
             human_profile: HumanProfile | None = None,
             cfg: PolicyConfig | None = None) -> GovernanceDirective:
    """Run one forward-chaining pass and return the governance directive.

    `human_state` may be a HumanState or a bare fatigue value. Constraint
    rules fire first at every level; ladder rules only above L0; the dynamic
    cap closes the pass. Deterministic: same inputs, same directive.
    """
    cfg = cfg or PolicyConfig()
    fatigue = getattr(human_state, "fatigue", human_state)
    profile = human_profile or HumanProfile()
    ladder_active = level.risk_threshold is not None

    for rule in level.static_rules:
        if rule.priority != 0 and not ladder_active:
            continue
        if rule.condition.matches(subtask, fatigue):
            warnings = ()
            if (rule.id == CONSTRAINT_RULE_HUMAN and ladder_active
                    and fatigue > cfg.critical_fatigue):
                warnings = (
                    f"human-only constraint on {subtask.id!r} overrides the critical-fatigue "
                    f"escalation (fatigue={fatigue:.2f})",
                )
            return _directive_for(rule, warnings)

    if ladder_active and level.cap_rule is not None:
        risk = risk_score(subtask, cfg)
        budget = autonomy_budget(profile, min(1.0, max(0.0, risk)), cfg)
        if risk >= level.risk_threshold or budget < level.budget_threshold:
            return _directive_for(level.cap_rule)
    return NO_DIRECTIVE


def feasible_modes(directive: GovernanceDirective) -> tuple[CollaborationMode, ...]:
    """Modes the allocator may choose under a directive; never empty."""
    if directive.kind == "none":
        return ALL_MODES
    if directive.kind == "forced_assignment":
        return ((CollaborationMode.HUMAN_ONLY,) if directive.agent == "human"
                else (CollaborationMode.AUTONOMOUS,))
    if directive.kind == "forced_mode":
        return (directive.mode,)
    return tuple(m for m in ALL_MODES if m.autonomy <= directive.mode.autonomy)
