"""Common surface shared by learned agents and fixed reference policies."""
from __future__ import annotations

import numpy as np


def sample_categorical(probs, rng: np.random.Generator) -> int:
    """Index drawn from ``probs`` by inverse CDF (0-based)."""
    cdf = np.cumsum(probs)
    i = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(i, len(cdf) - 1)


class Policy:
    """Maps a belief to an action mask; learners also consume transitions."""

    kind = "policy"
    learnable = False

    def act(self, pi, rng: np.random.Generator) -> int:
        raise NotImplementedError

    def start_episode(self, episode: int) -> None:
        pass

    def learn(self, pi_prev, a, r, pi_next, terminal, rng) -> float:
        return 0.0

    def networks(self) -> dict:
        """Named parameter sets and optimiser states, for checkpointing."""
        return {}
