from __future__ import annotations

import pytest

from haas.catalog import CognitiveProfile, Subtask


def make_profile(r=0.5, tau=0.5, c=0.5, a=0.5, h=0.5) -> CognitiveProfile:
    return CognitiveProfile(r, tau, c, a, h)


def make_subtask(domain="software", task_type="Code Generation", profile=None,
                 baseline=4.0, criticality=0.5, constraint="none",
                 sid="t-001", name="test subtask") -> Subtask:
    return Subtask(id=sid, name=name, task_type=task_type, domain=domain,
                   profile=profile or make_profile(),
                   baseline_duration=baseline, criticality=criticality,
                   constraint=constraint)


@pytest.fixture
def profile_factory():
    return make_profile


@pytest.fixture
def subtask_factory():
    return make_subtask
