"""Hidden process states, correlated prior, noisy probes and sensing costs.

Conventions used throughout the package:

* hypothesis ``i`` (1-based, ``1..M`` with ``M = 2**N``) is the binary
  expansion of ``i - 1`` with the least significant bit for process 1;
* an action is an integer bitmask over processes, ``1..M-1`` (the empty set
  is excluded); bit ``k - 1`` set means process ``k`` is probed;
* observations list the probed bits in ascending process order.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels

MAX_PROCESSES = 12


class ConfigError(ValueError):
    """Invalid process or run configuration."""


@dataclass(frozen=True)
class ProcessConfig:
    """Static description of the monitored processes.

    ``p`` and ``c`` accept a scalar (broadcast to every process) or one value
    per process. ``dep_pair`` uses 1-based process indices.
    """

    N: int = 3
    p: tuple = 0.2
    c: tuple = 0.2
    q: float = 0.8
    rho: float = 0.0
    dep_pair: tuple | None = (1, 2)

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or self.N < 1:
            raise ConfigError(f"N must be a positive integer, got {self.N!r}")
        if self.N > MAX_PROCESSES:
            raise ConfigError(f"N={self.N} exceeds the supported maximum of {MAX_PROCESSES}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "p", _per_process(self.p, self.N, "p"))
        object.__setattr__(self, "c", _per_process(self.c, self.N, "c"))
        if any(not 0.0 <= v <= 0.5 for v in self.p):
            raise ConfigError(f"flip probabilities must lie in [0, 0.5], got {self.p}")
        if any(not v > 0.0 for v in self.c):
            raise ConfigError(f"sensing costs must be positive, got {self.c}")
        if not 0.0 <= self.q <= 1.0:
            raise ConfigError(f"q must lie in [0, 1], got {self.q}")
        if not 0.0 <= self.rho <= 1.0:
            raise ConfigError(f"rho must lie in [0, 1], got {self.rho}")
        if self.dep_pair is not None:
            pair = tuple(int(v) for v in self.dep_pair)
            if len(pair) != 2 or pair[0] == pair[1]:
                raise ConfigError(f"dep_pair must hold two distinct indices, got {self.dep_pair}")
            if any(not 1 <= v <= self.N for v in pair):
                raise ConfigError(f"dep_pair indices must lie in 1..{self.N}, got {pair}")
            object.__setattr__(self, "dep_pair", pair)

    @property
    def M(self) -> int:
        return 1 << self.N

    @property
    def n_actions(self) -> int:
        return self.M - 1

    @property
    def full_action(self) -> int:
        """Bitmask of the action that probes every process."""
        return self.M - 1

    @cached_property
    def p_array(self) -> np.ndarray:
        return np.asarray(self.p, dtype=np.float64)

    @cached_property
    def c_array(self) -> np.ndarray:
        return np.asarray(self.c, dtype=np.float64)

    @cached_property
    def hypothesis_bits(self) -> np.ndarray:
        """``(M, N)`` uint8 table; row ``i - 1`` is hypothesis ``i``."""
        idx = np.arange(self.M)[:, None]
        return ((idx >> np.arange(self.N)[None, :]) & 1).astype(np.uint8)

    @cached_property
    def action_costs(self) -> np.ndarray:
        """Cost of every action, position ``a - 1`` for mask ``a``."""
        masks = np.arange(1, self.M)[:, None]
        sel = (masks >> np.arange(self.N)[None, :]) & 1
        return sel @ self.c_array


def _per_process(value, n, name):
    arr = np.atleast_1d(np.asarray(value, dtype=np.float64))
    if arr.size == 1:
        arr = np.repeat(arr, n)
    if arr.shape != (n,):
        raise ConfigError(f"{name} needs 1 or {n} entries, got {arr.size}")
    return tuple(float(v) for v in arr)


def hypothesis_to_vector(i: int, N: int) -> np.ndarray:
    """Process-state bits for hypothesis ``i`` (1-based)."""
    if not 1 <= i <= (1 << N):
        raise IndexError(f"hypothesis index {i} outside 1..{1 << N}")
    return ((i - 1) >> np.arange(N)) & 1


def vector_to_hypothesis(x) -> int:
    bits = np.asarray(x, dtype=np.int64)
    if bits.ndim != 1 or np.any((bits != 0) & (bits != 1)):
        raise ValueError(f"expected a binary vector, got {x!r}")
    return int(np.sum(bits << np.arange(bits.size))) + 1


def action_processes(a: int, N: int) -> tuple[int, ...]:
    """1-based process indices probed by action mask ``a``."""
    check_action(a, N)
    return tuple(k + 1 for k in range(N) if (a >> k) & 1)


def processes_to_action(processes, N: int) -> int:
    a = 0
    for k in processes:
        if not 1 <= k <= N:
            raise ValueError(f"process index {k} outside 1..{N}")
        a |= 1 << (k - 1)
    check_action(a, N)
    return a


def check_action(a: int, N: int) -> None:
    if not 1 <= a < (1 << N):
        raise ValueError(f"action {a} outside 1..{(1 << N) - 1}")


def build_prior(cfg: ProcessConfig) -> np.ndarray:
    """Initial belief over all ``M`` hypotheses.

    Independent processes are normal with probability ``q``. The dependent
    pair ``(j, k)`` gets the joint table

        P(0,0) = q^2 + rho q (1-q),  P(0,1) = P(1,0) = q (1-q) (1-rho),

    with the remaining mass on ``(1,1)``.
    """
    q, rho = cfg.q, cfg.rho
    marg = np.array([q, 1.0 - q])
    bits = cfg.hypothesis_bits
    prior = np.ones(cfg.M)
    indep = set(range(cfg.N))
    if cfg.dep_pair is not None:
        j, k = cfg.dep_pair[0] - 1, cfg.dep_pair[1] - 1
        p00 = q * q + rho * q * (1.0 - q)
        p01 = q * (1.0 - q) * (1.0 - rho)
        p11 = 1.0 - p00 - 2.0 * p01
        joint = np.array([[p00, p01], [p01, p11]])
        if np.any(joint < -1e-15) or np.any(joint > 1.0 + 1e-15):
            raise ConfigError(f"pair joint outside [0, 1]: {joint.ravel()}")
        prior *= np.clip(joint, 0.0, 1.0)[bits[:, j], bits[:, k]]
        indep -= {j, k}
    for k in sorted(indep):
        prior *= marg[bits[:, k]]
    return prior


def sample_state(prior, rng: np.random.Generator) -> np.ndarray:
    """Draw a hidden state vector from ``prior``; returns its bits."""
    prior = np.asarray(prior, dtype=np.float64)
    m = prior.size
    n = m.bit_length() - 1
    i = int(rng.choice(m, p=prior))
    return hypothesis_to_vector(i + 1, n)


def sample_observation(x, a: int, cfg: ProcessConfig, rng: np.random.Generator) -> np.ndarray:
    """Noisy reading of the probed processes, ascending process order."""
    check_action(a, cfg.N)
    x = np.asarray(x, dtype=np.uint8)
    k = int(a).bit_count()
    u = rng.random(k)
    out = np.empty(k, dtype=np.uint8)
    return kernels.sample_bits(x, a, cfg.p_array, u, out)


def sensing_cost(a: int, cfg: ProcessConfig) -> float:
    check_action(a, cfg.N)
    return float(sum(cfg.c[k] for k in range(cfg.N) if (a >> k) & 1))


def expand_observation(y, a: int, N: int) -> np.ndarray:
    """Scatter compact observation bits to a length-``N`` vector (unprobed = 0)."""
    full = np.zeros(N, dtype=np.uint8)
    ks = [k for k in range(N) if (a >> k) & 1]
    y = np.asarray(y, dtype=np.uint8)
    if y.shape != (len(ks),):
        raise ValueError(f"observation has {y.size} bits, action probes {len(ks)}")
    full[ks] = y
    return full


def episode_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    """Independent generator for episode ``index`` of a named stream."""
    return np.random.default_rng([int(seed), int(stream), int(index)])


# Fixed stream ids keep training, evaluation and weight init draws disjoint.
STREAM_TRAIN = 0
STREAM_EVAL = 1
STREAM_INIT = 2
STREAM_POLICY = 3
