"""Deep active inference: a policy network and a bootstrapped EFE network.

The generative action prior is softmax(-G): low expected free energy means
high prior probability. The policy is trained to minimise its KL divergence
to that prior, the EFE network to match the one-step bootstrapped estimate
G(pi, a) ~ -r + E_{a' ~ policy(pi')} G(pi', a').
"""
from __future__ import annotations

import numpy as np

from . import nn
from .policy import Policy, sample_categorical


def efe_values(efe: nn.MLPParams, pi) -> np.ndarray:
    return nn.forward(efe, pi)[0]


def action_prior(efe: nn.MLPParams, pi) -> np.ndarray:
    return nn.softmax(-efe_values(efe, pi))


def expected_next_efe(efe_target: nn.MLPParams, policy: nn.MLPParams, pi_next) -> float:
    """Exact policy-weighted average of G(pi_next, .) over every action."""
    mu = nn.forward(policy, pi_next)[0]
    return float(mu @ efe_values(efe_target, pi_next))


def efe_loss_and_grad(efe: nn.MLPParams, efe_target: nn.MLPParams, policy: nn.MLPParams,
                      pi_prev, a: int, r: float, pi_next, terminal: bool):
    boot = 0.0 if terminal else expected_next_efe(efe_target, policy, pi_next)
    g, cache = nn.forward(efe, pi_prev)
    resid = g[a - 1] + r - boot
    dg = np.zeros_like(g)
    dg[a - 1] = 2.0 * resid
    return float(resid ** 2), nn.backward(efe, cache, dg)


def efe_update(efe: nn.Network, policy: nn.MLPParams, pi_prev, a, r, pi_next, terminal) -> float:
    lagged = efe.lagged if efe.lagged is not None else efe.params
    loss, grads = efe_loss_and_grad(efe.params, lagged, policy, pi_prev, a, r, pi_next, terminal)
    if not np.isfinite(loss):
        raise FloatingPointError("EFE loss diverged")
    efe.step(grads)
    return loss


def policy_loss_and_grad(policy: nn.MLPParams, G, pi_prev):
    """Negative policy entropy minus the policy-weighted log prior softmax(-G).

    Equals KL(policy || softmax(-G)); G is a constant here.
    """
    mu, cache = nn.forward(policy, pi_prev)
    logmu = nn.log_softmax(nn.cached_logits(cache))
    logprior = nn.log_softmax(-np.asarray(G, dtype=np.float64))
    ell = logmu - logprior
    loss = float(mu @ ell)
    dz = mu * (ell - loss)
    return loss, nn.backward(policy, cache, dz, wrt_logits=True)


def policy_update(policy: nn.Network, efe: nn.MLPParams, pi_prev) -> float:
    loss, grads = policy_loss_and_grad(policy.params, efe_values(efe, pi_prev), pi_prev)
    policy.step(grads)
    return loss


def ai_select_action(policy: nn.MLPParams, pi, rng) -> int:
    return sample_categorical(nn.forward(policy, pi)[0], rng) + 1


class ActiveInferenceAgent(Policy):
    kind = "ai"
    learnable = True

    def __init__(self, M, rng, hidden=64, **adam_hyper):
        self.policy = nn.Network.create([M, hidden, hidden, M - 1], rng, head="softmax", **adam_hyper)
        self.efe = nn.Network.create([M, hidden, hidden, M - 1], rng, lagged=True, **adam_hyper)

    def act(self, pi, rng):
        return ai_select_action(self.policy.params, pi, rng)

    def learn(self, pi_prev, a, r, pi_next, terminal, rng):
        loss = efe_update(self.efe, self.policy.params, pi_prev, a, r, pi_next, terminal)
        policy_update(self.policy, self.efe.params, pi_prev)
        return loss

    def networks(self):
        return {"policy": self.policy, "efe": self.efe}
