"""Tunable simulator constants.

Every numeric default that is not a structural property of the engine lives
here so that calibration sweeps and config files can override it without
touching code. Keys mirror the documented config-file schema.
"""

from __future__ import annotations

import copy
import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError


@dataclass
class BanditConfig:
    ucb_c: float = 1.5
    ducb_gamma: float = 0.97
    linucb_alpha: float = 0.8
    t_explore: int = 3
    context_fatigue: bool = True
    warmstart_updates: bool = True


@dataclass
class HumanDynamicsConfig:
    beta_f: float = 0.07            # fatigue accrual per human hour at mid complexity
    switch_penalty: float = 0.015   # per agent switch
    switch_cap_per_cycle: float = 0.08
    beta_r: float = 0.12            # recovery per rest hour
    lambda_chronic: float = 0.18    # chronic residual fraction of peak fatigue
    chronic_model: str = "floor"    # floor | additive
    trust_decay: float = 0.08
    trust_growth: float = 0.02
    trust_damping: float = 0.60
    trust_floor: float = 0.35
    initial_trust: float = 0.80
    rho_desk: float = 0.80          # AI-execution fraction that starts the deskilling clock
    desk_consecutive: int = 3
    desk_rate: float = 0.003        # skill loss per cycle once deskilling is active
    rest_hours_per_cycle: float = 0.5
    rest_slack_cap_hours: float = 6.0   # at most this much schedule slack converts to rest


@dataclass
class OutcomeModelConfig:
    sigma_ai: float = 0.04
    sigma_human: float = 0.07
    ai_speed_factor: float = 0.45
    shared_overlap: float = 0.75
    synergy_coefficient: float = 0.15
    skill_quality_base: float = 0.6     # human quality mean scales by (base + span*skill)
    skill_quality_span: float = 0.4
    fatigue_quality_penalty: float = 0.3
    success_threshold: float = 0.40
    time_norm_factor: float = 2.0       # time normaliser = baseline_duration * factor


@dataclass
class PolicyConfig:
    risk_complexity_weight: float = 0.5
    risk_criticality_weight: float = 0.5
    budget_experience_weight: float = 0.45
    budget_maturity_weight: float = 0.25
    budget_risk_weight: float = 0.30
    critical_fatigue: float = 0.90


@dataclass
class ScreenConfig:
    q_min: float = 0.40
    f_max: float = 0.95
    desk_max: float = 0.05
    participation_min: float = 0.10
    monotony_max: float = 0.60
    shared_min: float = 0.25
    autonomous_highvalue_max: float = 0.50
    highvalue_human_min: float = 0.15
    risky_shared_min: float = 0.25
    highvalue_score_min: float = 0.6    # tau or creativity at/above this marks high-value work
    risky_risk_min: float = 0.6


@dataclass
class KpiConfig:
    defect_threshold: float = 0.40      # q below this escapes as a defect
    rework_upper: float = 0.55          # q in [defect_threshold, rework_upper) needs rework
    scrap_threshold: float = 0.35
    safety_quality_threshold: float = 0.30
    ai_capacity_hours_per_sprint: float = 20.0
    default_time_budget_hours: float = 32.0


@dataclass
class SimConfig:
    bandit: BanditConfig = field(default_factory=BanditConfig)
    human: HumanDynamicsConfig = field(default_factory=HumanDynamicsConfig)
    outcome: OutcomeModelConfig = field(default_factory=OutcomeModelConfig)
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    screens: ScreenConfig = field(default_factory=ScreenConfig)
    kpi: KpiConfig = field(default_factory=KpiConfig)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        cfg = cls()
        aliases = {"outcome_model": "outcome"}
        for section, values in data.items():
            section = aliases.get(section, section)
            if not hasattr(cfg, section):
                raise ConfigError(f"unknown config section: {section!r}")
            target = getattr(cfg, section)
            if not isinstance(values, dict):
                raise ConfigError(f"config section {section!r} must be an object")
            for key, value in values.items():
                if not hasattr(target, key):
                    raise ConfigError(f"unknown config key: {section}.{key}")
                setattr(target, key, value)
        return cfg

    def copy(self) -> "SimConfig":
        return copy.deepcopy(self)


def load_config(path: str | os.PathLike | None = None) -> SimConfig:
    """Load a config file, falling back to HAAS_CONFIG and then to defaults."""
    if path is None:
        path = os.environ.get("HAAS_CONFIG")
    if path is None:
        return SimConfig()
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {p} is not valid JSON: {exc}") from exc
    return SimConfig.from_dict(data)
