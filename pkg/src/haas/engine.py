"""Closed execution loop: governed allocation, execution, reward, state update.

One `run(config)` call simulates a full seeded scenario deterministically:
replaying the same config yields a byte-identical result. Counterfactual
evaluations share each subtask's noise draws with the realised execution
(common random numbers), which makes the regret ledger and the oracle
comparator exact rather than estimated.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

from .catalog import (AffinityWeights, DEFAULT_WEIGHTS, ScenarioSpec, Subtask,
                      find_scenario, load_catalog, load_default_catalog,
                      load_default_scenarios, load_scenarios)
from .config import SimConfig
from .errors import ConfigError, ValidationError
from .humanstate import (HumanState, accrue_fatigue, predicted_fatigue_increment,
                         recover, start_cycle, update_deskilling, update_trust)
from .learners import (ALL_STRATEGIES, BanditState, LEARNED_STRATEGIES,
                       baseline_select, make_context, oracle_select, select, update)
from .metrics import RegretLedger, compute_kpis, screens, subtask_regret
from .modes import (AllocationSpec, CollaborationMode, bounds_for_scenario,
                    instantiate_mode)
from .outcomes import (ExecutionOutcome, NoiseDraws, REWARD_PROFILES, RewardProfile,
                       SubtaskEvent, WellbeingWeights, counterfactual_pure,
                       executing_agent_for, execute, is_high_value, normalisers_for,
                       reward, wellbeing, wellbeing_signals)
from .policy import (GovernanceLevel, LEVELS, build_level, evaluate, feasible_modes,
                     load_rules, risk_score)
from .streams import StreamPlan

CONSTRAINT_RULE_IDS = ("constraint_human_only", "constraint_ai_only")


@dataclass(frozen=True)
class RunConfig:
    domain: str
    scenario: str
    strategy: str
    policies: bool = True
    governance_level: str | None = None
    seed: int = 11
    cycles: int | None = None
    reward_profile: str = "four_outcome"
    no_policy: bool = False
    no_fatigue: bool = False
    no_trust: bool = False
    no_deskilling: bool = False
    catalog_path: str | None = None
    rules_path: str | None = None
    affinity_weights: tuple[float, ...] | None = None
    reward_weights: tuple[float, float, float, float] | None = None
    wellbeing_weights: tuple[float, float, float, float, float] | None = None

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")
        if self.strategy not in ALL_STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        if self.governance_level is not None and self.governance_level not in LEVELS:
            raise ConfigError(f"unknown governance level {self.governance_level!r}")
        if self.reward_weights is None and self.reward_profile not in REWARD_PROFILES:
            raise ConfigError(f"unknown reward profile {self.reward_profile!r}")
        if self.cycles is not None and self.cycles < 1:
            raise ConfigError("cycles override must be >= 1")

    @property
    def effective_level(self) -> str:
        if self.no_policy:
            return "L0"
        if self.governance_level is not None:
            return self.governance_level
        return "L2" if self.policies else "L0"

    def to_dict(self) -> dict:
        data = asdict(self)
        data["effective_level"] = self.effective_level
        return data


@dataclass
class AllocationRecord:
    index: int
    cycle: int
    position: int
    subtask_id: str
    subtask_name: str
    task_type: str
    baseline_duration: float
    directive_kind: str
    fired_rule_id: str | None
    constraint_forced: bool
    warnings: tuple[str, ...]
    feasible: tuple[str, ...]
    mode: CollaborationMode
    sigma_h: float
    sigma_ai: float
    lead: str
    quality: float
    time_taken: float
    cost: float
    human_hours: float
    ai_hours: float
    success: bool
    shared: bool
    relief: bool
    fatigue_increment: float
    pure_human_increment: float
    monotony: float
    wellbeing: float
    reward: float
    cf_human_reward: float
    cf_ai_reward: float
    regret: float
    risk: float
    high_value: bool
    intervention: bool
    violation: bool
    fatigue_after: float
    trust_after: float
    skill_after: float
    cum_deskilling_after: float

    def to_dict(self) -> dict:
        data = asdict(self)
        data["mode"] = self.mode.value
        data["warnings"] = list(self.warnings)
        data["feasible"] = list(self.feasible)
        return data


@dataclass
class RunResult:
    config: dict
    records: list[AllocationRecord]
    per_sprint: list[dict]
    aggregate: dict
    screen_flags: dict

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "records": [r.to_dict() for r in self.records],
            "per_sprint": self.per_sprint,
            "aggregate": self.aggregate,
            "screens": self.screen_flags,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def records_ndjson(self) -> str:
        return "\n".join(json.dumps(r.to_dict(), sort_keys=True, separators=(",", ":"))
                         for r in self.records)


@dataclass
class _RunContext:
    """Everything a run needs, resolved once up front."""

    config: RunConfig
    sim: SimConfig
    scenario: ScenarioSpec
    catalog: list[Subtask]
    level: GovernanceLevel
    weights: AffinityWeights
    reward_profile: RewardProfile
    wb_weights: WellbeingWeights
    bounds: object


def _resolve(config: RunConfig, sim_cfg: SimConfig | None) -> _RunContext:
    sim = (sim_cfg or SimConfig()).copy()
    scenarios = load_default_scenarios(config.domain)
    scenario = find_scenario(scenarios, config.scenario)
    if config.cycles is not None:
        scenario = scenario.with_cycles(config.cycles)
    catalog = (load_catalog(config.catalog_path) if config.catalog_path
               else load_default_catalog(config.domain))
    if not catalog:
        raise ConfigError(f"catalogue for domain {config.domain!r} is empty")
    rules = load_rules(config.rules_path) if config.rules_path else load_rules()
    level = build_level(config.effective_level, config.domain, rules)
    weights = (AffinityWeights(*config.affinity_weights)
               if config.affinity_weights else DEFAULT_WEIGHTS)
    if config.reward_weights is not None:
        profile = RewardProfile(*config.reward_weights)
    else:
        profile = REWARD_PROFILES[config.reward_profile]
    wb = (WellbeingWeights(*config.wellbeing_weights)
          if config.wellbeing_weights else WellbeingWeights())
    return _RunContext(config=config, sim=sim, scenario=scenario, catalog=catalog,
                       level=level, weights=weights, reward_profile=profile,
                       wb_weights=wb, bounds=bounds_for_scenario(scenario))


def _candidate_evaluator(ctx: _RunContext, subtask: Subtask, pre_state: HumanState,
                         draws: NoiseDraws, prior_events: Sequence[SubtaskEvent],
                         sprint_events: Sequence[SubtaskEvent],
                         ) -> Callable[[CollaborationMode], tuple]:
    """Evaluate any mode for this subtask under the subtask's shared draws.

    Returns (outcome, signals, wellbeing, reward) computed exactly as the
    realised path computes them, so counterfactual and oracle comparisons
    are like-for-like.
    """
    norms = normalisers_for(subtask, ctx.scenario, ctx.sim.outcome)
    high_value = is_high_value(subtask, ctx.sim.screens.highvalue_score_min)

    def evaluate_mode(mode: CollaborationMode, alloc: AllocationSpec | None = None):
        if alloc is None:
            if mode is CollaborationMode.HUMAN_ONLY:
                alloc = AllocationSpec(mode, 1.0, 0.0, "human")
            elif mode is CollaborationMode.AUTONOMOUS:
                alloc = AllocationSpec(mode, 0.0, 1.0, "ai")
            else:
                alloc = instantiate_mode(mode, subtask, pre_state.fatigue, ctx.bounds)
        outcome = execute(subtask, alloc, pre_state, ctx.scenario, draws,
                          ctx.weights, ctx.sim.outcome)
        event = SubtaskEvent(mode=mode, executing_agent=executing_agent_for(mode),
                             high_value=high_value, shared=alloc.is_shared,
                             relief=outcome.relief)
        signals = wellbeing_signals(event, prior_events, sprint_events,
                                    pre_state.fatigue, pre_state.cumulative_deskilling)
        wb = wellbeing(signals, ctx.wb_weights)
        r = reward(outcome, wb, ctx.reward_profile, norms)
        return outcome, event, signals, wb, r

    return evaluate_mode


def run(config: RunConfig, sim_cfg: SimConfig | None = None) -> RunResult:
    """Simulate one seeded run and return its full result."""
    ctx = _resolve(config, sim_cfg)
    sim = ctx.sim
    scenario = ctx.scenario
    streams = StreamPlan(config.seed)
    state = HumanState(fatigue=0.0, trust=sim.human.initial_trust,
                       skill=scenario.human_profile.initial_skill)
    bandit = BanditState(dim=6 if sim.bandit.context_fatigue else 5)
    frozen_prefs: dict = {}
    events: list[SubtaskEvent] = []
    records: list[AllocationRecord] = []
    ledger = RegretLedger()
    is_learned = config.strategy in LEARNED_STRATEGIES
    index = 0

    for cycle in range(scenario.cycles):
        start_cycle(state)
        tasks = sample_sprint_for(ctx, streams)
        sprint_start = len(events)
        sprint_effort_ai = 0.0
        sprint_effort_total = 0.0
        for position, subtask in enumerate(tasks):
            pre_state = state.snapshot()
            directive = evaluate(ctx.level, subtask, state,
                                 scenario.human_profile, sim.policy)
            feas = feasible_modes(directive)
            draws = NoiseDraws(z_human=float(streams.human_noise.normal()),
                               z_ai=float(streams.ai_noise.normal()))
            evaluate_mode = _candidate_evaluator(
                ctx, subtask, pre_state, draws, events[:], events[sprint_start:])

            intervention = False
            if config.strategy == "oracle":
                mode = oracle_select(feas, lambda m: evaluate_mode(m)[4])
            elif is_learned:
                context = make_context(subtask, state.fatigue, sim.bandit.context_fatigue)
                mode = select(config.strategy, bandit, subtask, context, feas,
                              cycle, streams.bandit_sampling, sim.bandit,
                              ctx.weights, state.tutor_mode_active)
            else:
                mode, intervention = baseline_select(
                    config.strategy, subtask, feas, cycle, streams.bandit_sampling,
                    frozen_prefs, ctx.weights, state.tutor_mode_active)

            if mode not in feas:
                raise RuntimeError(
                    f"governance violation: {mode} outside feasible set {feas}")

            alloc = instantiate_mode(mode, subtask, state.fatigue, ctx.bounds)
            outcome, event, signals, wb, reward_value = evaluate_mode(mode, alloc)
            cf_human = evaluate_mode(CollaborationMode.HUMAN_ONLY)[4]
            cf_ai = evaluate_mode(CollaborationMode.AUTONOMOUS)[4]
            regret = subtask_regret(reward_value, cf_human, cf_ai)
            ledger.add(regret)

            if is_learned and (cycle >= sim.bandit.t_explore or sim.bandit.warmstart_updates):
                context = make_context(subtask, pre_state.fatigue, sim.bandit.context_fatigue)
                update(config.strategy, bandit, subtask.task_type, mode, context,
                       reward_value, sim.bandit)

            executing = executing_agent_for(mode)
            switched = (state.last_executing_agent != "none"
                        and executing != state.last_executing_agent)
            if not config.no_fatigue:
                accrue_fatigue(state, outcome.human_hours, subtask.profile.complexity,
                               switched, scenario.human_profile.fatigue_resistance,
                               scenario.pressure.fatigue_multiplier, sim.human)
            state.last_executing_agent = executing
            if not config.no_trust:
                update_trust(state, "success" if outcome.success else "error", sim.human)

            effort = subtask.baseline_duration * (0.5 + subtask.profile.complexity)
            sprint_effort_ai += alloc.sigma_ai * effort
            sprint_effort_total += effort
            pure_increment = predicted_fatigue_increment(
                effort, subtask.profile.complexity,
                scenario.human_profile.fatigue_resistance,
                scenario.pressure.fatigue_multiplier, sim.human)

            events.append(event)
            records.append(AllocationRecord(
                index=index, cycle=cycle, position=position,
                subtask_id=subtask.id, subtask_name=subtask.name,
                task_type=subtask.task_type,
                baseline_duration=subtask.baseline_duration,
                directive_kind=directive.kind,
                fired_rule_id=directive.fired_rule_id,
                constraint_forced=directive.fired_rule_id in CONSTRAINT_RULE_IDS,
                warnings=directive.warnings,
                feasible=tuple(m.value for m in feas),
                mode=mode, sigma_h=alloc.sigma_h, sigma_ai=alloc.sigma_ai,
                lead=alloc.lead,
                quality=outcome.quality, time_taken=outcome.time_taken,
                cost=outcome.cost, human_hours=outcome.human_hours,
                ai_hours=outcome.ai_hours, success=outcome.success,
                shared=alloc.is_shared, relief=outcome.relief,
                fatigue_increment=outcome.fatigue_increment,
                pure_human_increment=pure_increment,
                monotony=signals.monotony, wellbeing=wb,
                reward=reward_value, cf_human_reward=cf_human,
                cf_ai_reward=cf_ai, regret=regret,
                risk=risk_score(subtask, sim.policy),
                high_value=is_high_value(subtask, sim.screens.highvalue_score_min),
                intervention=intervention, violation=False,
                fatigue_after=state.fatigue, trust_after=state.trust,
                skill_after=state.skill,
                cum_deskilling_after=state.cumulative_deskilling,
            ))
            index += 1

        if not config.no_fatigue:
            sprint_time = sum(r.time_taken for r in records[-len(tasks):])
            slack = max(0.0, scenario.effective_time_budget - sprint_time)
            rest = (sim.human.rest_hours_per_cycle
                    + min(slack, sim.human.rest_slack_cap_hours))
            recover(state, rest, sim.human)
        if not config.no_deskilling and sprint_effort_total > 0:
            ai_fraction = sprint_effort_ai / sprint_effort_total
            update_deskilling(state, ai_fraction, 1, sim.human)
            if records:
                # deskilling lands after the cycle's last record; refresh its snapshot
                records[-1].skill_after = state.skill
                records[-1].cum_deskilling_after = state.cumulative_deskilling

    per_sprint, aggregate = compute_kpis(records, scenario, sim)
    flags = screens(aggregate, sim.screens)
    expected = scenario.cycles * scenario.subtasks_per_cycle
    if len(records) != expected:
        raise RuntimeError(f"record count {len(records)} != {expected}")
    return RunResult(config=config.to_dict(), records=records,
                     per_sprint=per_sprint, aggregate=aggregate, screen_flags=flags)


def sample_sprint_for(ctx: _RunContext, streams: StreamPlan) -> list[Subtask]:
    from .catalog import sample_sprint
    return sample_sprint(ctx.catalog, ctx.scenario, streams.task_sampling)


def whatif_preview(subtask: Subtask, human_state: HumanState, level_name: str,
                   scenario: ScenarioSpec | None = None,
                   sim_cfg: SimConfig | None = None,
                   rules=None) -> dict:
    """Read-only decision preview: directive, feasible modes, shares, and
    expected reward per mode using outcome-model means (no sampling)."""
    sim = sim_cfg or SimConfig()
    if scenario is None:
        scenario = find_scenario(load_default_scenarios(subtask.domain),
                                 "standard_sprint" if subtask.domain == "software"
                                 else "standard_production")
    level = build_level(level_name, subtask.domain, rules or load_rules())
    directive = evaluate(level, subtask, human_state, scenario.human_profile, sim.policy)
    feas = feasible_modes(directive)
    bounds = bounds_for_scenario(scenario)
    norms = normalisers_for(subtask, scenario, sim.outcome)
    draws = NoiseDraws(0.0, 0.0)
    high_value = is_high_value(subtask, sim.screens.highvalue_score_min)

    mode_rows = []
    for mode in feas:
        if mode is CollaborationMode.HUMAN_ONLY:
            alloc = AllocationSpec(mode, 1.0, 0.0, "human")
        elif mode is CollaborationMode.AUTONOMOUS:
            alloc = AllocationSpec(mode, 0.0, 1.0, "ai")
        else:
            alloc = instantiate_mode(mode, subtask, human_state.fatigue, bounds)
        outcome = execute(subtask, alloc, human_state, scenario, draws,
                          DEFAULT_WEIGHTS, sim.outcome)
        event = SubtaskEvent(mode=mode, executing_agent=executing_agent_for(mode),
                             high_value=high_value, shared=alloc.is_shared,
                             relief=outcome.relief)
        signals = wellbeing_signals(event, (), (), human_state.fatigue,
                                    human_state.cumulative_deskilling)
        wb = wellbeing(signals)
        mode_rows.append({
            "mode": mode.value,
            "sigma_h": alloc.sigma_h,
            "sigma_ai": alloc.sigma_ai,
            "lead": alloc.lead,
            "expected_quality": outcome.quality,
            "expected_time": outcome.time_taken,
            "expected_cost": outcome.cost,
            "expected_reward": reward(outcome, wb, REWARD_PROFILES["four_outcome"], norms),
        })
    return {
        "subtask_id": subtask.id,
        "level": level_name,
        "directive": {
            "kind": directive.kind,
            "agent": directive.agent,
            "mode": directive.mode.value if directive.mode else None,
            "fired_rule_id": directive.fired_rule_id,
            "warnings": list(directive.warnings),
        },
        "feasible_modes": [m.value for m in feas],
        "modes": mode_rows,
    }
