"""Named, independent random streams derived from a single run seed.

Each run owns four child streams (task sampling, human noise, AI noise,
bandit sampling). Child seeds are derived from a stable SHA-256 hash of
(seed, label) so that two runs with the same seed see identical draws in
every stream regardless of platform or process.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

STREAM_LABELS = ("task_sampling", "human_noise", "ai_noise", "bandit_sampling")


def _child_seed(seed: int, label: str) -> int:
    digest = hashlib.sha256(f"{seed}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def make_stream(seed: int, label: str) -> np.random.Generator:
    """One independent generator for (seed, label)."""
    return np.random.default_rng(_child_seed(seed, label))


@dataclass
class StreamPlan:
    """The four named child streams owned by one run."""

    seed: int
    task_sampling: np.random.Generator = field(init=False)
    human_noise: np.random.Generator = field(init=False)
    ai_noise: np.random.Generator = field(init=False)
    bandit_sampling: np.random.Generator = field(init=False)

    def __post_init__(self) -> None:
        self.task_sampling = make_stream(self.seed, "task_sampling")
        self.human_noise = make_stream(self.seed, "human_noise")
        self.ai_noise = make_stream(self.seed, "ai_noise")
        self.bandit_sampling = make_stream(self.seed, "bandit_sampling")
