"""Exact posterior recursion, stopping rule and reward functionals."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .env import ProcessConfig, check_action, expand_observation, hypothesis_to_vector

# Clamp applied to beliefs inside reward evaluation only; keeps the
# log-likelihood-ratio functional finite at degenerate beliefs.
EPS_PI = 1e-12


class ContradictoryEvidence(ArithmeticError):
    """Every hypothesis in the belief support is ruled out by the observation."""


class RewardKind(str, enum.Enum):
    LLR = "llr"
    ENTROPY = "entropy"


@dataclass(frozen=True)
class RewardSpec:
    kind: RewardKind = RewardKind.LLR
    lam: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", RewardKind(self.kind))
        if not self.lam >= 0.0:
            raise ValueError(f"lambda must be non-negative, got {self.lam}")


def likelihood_term(y_k: int, h_k: int, p_k: float) -> float:
    return 1.0 - p_k if y_k == h_k else p_k


def update_belief(prev, a: int, y, cfg: ProcessConfig) -> np.ndarray:
    """One Bayes step: reweight by the probe likelihood and renormalise."""
    check_action(a, cfg.N)
    prev = np.ascontiguousarray(prev, dtype=np.float64)
    y_full = expand_observation(y, a, cfg.N)
    post, z = kernels.posterior_update(prev, cfg.hypothesis_bits, a, y_full, cfg.p_array)
    if not z > 0.0:
        raise ContradictoryEvidence(
            f"observation {list(np.asarray(y))} under action {a} has zero probability"
        )
    return post


def bayesian_llr(pi) -> float:
    """Sum of pi_i * logit(pi_i) in nats; +inf if some entry equals 1."""
    return kernels.bayesian_llr(pi)


def entropy(pi) -> float:
    return kernels.entropy(pi)


def clamped_llr(pi, eps: float = EPS_PI) -> float:
    return kernels.bayesian_llr(np.clip(np.asarray(pi, dtype=np.float64), eps, 1.0 - eps))


def reward_potential(pi, kind: RewardKind) -> float:
    """The accuracy term xi of the reward: clamped LLR or negative entropy."""
    if RewardKind(kind) is RewardKind.LLR:
        return clamped_llr(pi)
    return -entropy(pi)


def instantaneous_reward(prev, nxt, a: int, spec: RewardSpec, cfg: ProcessConfig) -> float:
    """xi(next) - xi(prev) - lambda * cost(a).

    The cost enters with a minus sign so that larger lambda penalises
    expensive probes.
    """
    check_action(a, cfg.N)
    gain = reward_potential(nxt, spec.kind) - reward_potential(prev, spec.kind)
    if not math.isfinite(gain):
        raise FloatingPointError("non-finite belief potential difference")
    cost = float(cfg.action_costs[a - 1])
    return gain - spec.lam * cost


def stop_check(pi, pi_upper: float) -> int | None:
    """Hypothesis index (1-based) to declare, or None to keep sensing."""
    i = kernels.argmax_first(pi)
    return i + 1 if pi[i] >= pi_upper else None


def map_index(pi) -> int:
    return kernels.argmax_first(pi) + 1


def map_estimate(pi) -> np.ndarray:
    pi = np.asarray(pi)
    n = pi.size.bit_length() - 1
    return hypothesis_to_vector(map_index(pi), n)
