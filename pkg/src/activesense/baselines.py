"""Non-learning reference policies: Chernoff test, observe-all, random."""
from __future__ import annotations

import enum

import numpy as np

from .env import ProcessConfig, check_action
from .policy import Policy


def observation_kl(x_bar, x_hat, a: int, cfg: ProcessConfig) -> float:
    """KL between probe distributions of action ``a`` under two states.

    Per disagreeing probed process the binary-symmetric-channel KL is
    (1 - 2p) log((1 - p) / p); agreeing processes contribute nothing.
    """
    check_action(a, cfg.N)
    x_bar = np.asarray(x_bar)
    x_hat = np.asarray(x_hat)
    total = 0.0
    for k in range(cfg.N):
        if (a >> k) & 1 and x_bar[k] != x_hat[k]:
            p = cfg.p[k]
            if p == 0.0:
                return float("inf")
            total += (1.0 - 2.0 * p) * np.log((1.0 - p) / p)
    return float(total)


def kl_vector(x_bar, x_hat, cfg: ProcessConfig) -> np.ndarray:
    """Divergence for every action, position ``a - 1``."""
    return np.array([observation_kl(x_bar, x_hat, a, cfg) for a in range(1, cfg.M)])


def chernoff_action(pi, cfg: ProcessConfig) -> int:
    """The Chernoff maximin collapses to probing every process.

    Every per-action divergence is bounded by the all-process one, so the
    maximin mixed strategy puts all its mass there regardless of the belief.
    """
    return cfg.full_action


class ChernoffPolicy(Policy):
    kind = "chernoff"

    def __init__(self, cfg: ProcessConfig):
        self.cfg = cfg

    def act(self, pi, rng):
        return chernoff_action(pi, self.cfg)


class FixedKind(str, enum.Enum):
    OBSERVE_ALL = "observe_all"
    UNIFORM_RANDOM = "random"
    SINGLE_RANDOM = "single_random"


class FixedPolicy(Policy):
    def __init__(self, kind, N: int):
        self.fixed = FixedKind(kind)
        self.kind = self.fixed.value
        self.N = N

    def act(self, pi, rng):
        if self.fixed is FixedKind.OBSERVE_ALL:
            return (1 << self.N) - 1
        if self.fixed is FixedKind.UNIFORM_RANDOM:
            return int(rng.integers(1, 1 << self.N))
        return 1 << int(rng.integers(self.N))


def fixed_policy(kind, N: int) -> FixedPolicy:
    return FixedPolicy(kind, N)
