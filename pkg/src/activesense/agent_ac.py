"""Actor-critic: softmax actor and state-value critic driven by the TD error."""
from __future__ import annotations

import numpy as np

from . import nn
from .policy import Policy, sample_categorical


def actor_distribution(actor: nn.MLPParams, pi) -> np.ndarray:
    return nn.forward(actor, pi)[0]


def value(critic: nn.MLPParams, pi) -> float:
    return float(nn.forward(critic, pi)[0][0])


def td_error(critic: nn.Network, r, pi_prev, pi_next, gamma, terminal) -> float:
    """r + gamma V(pi_next; current) - V(pi_prev; lagged).

    The bootstrap term is dropped on the stopping step.
    """
    lagged = critic.lagged if critic.lagged is not None else critic.params
    boot = 0.0 if terminal else gamma * value(critic.params, pi_next)
    return float(r + boot - value(lagged, pi_prev))


def critic_loss_and_grad(critic: nn.MLPParams, r, pi_prev, pi_next, gamma, terminal):
    """Squared one-step residual; the bootstrapped target is held constant."""
    target = r if terminal else r + gamma * value(critic, pi_next)
    v, cache = nn.forward(critic, pi_prev)
    resid = target - v[0]
    return float(resid ** 2), nn.backward(critic, cache, np.array([-2.0 * resid]))


def critic_update(critic: nn.Network, r, pi_prev, pi_next, gamma, terminal) -> float:
    loss, grads = critic_loss_and_grad(critic.params, r, pi_prev, pi_next, gamma, terminal)
    if not np.isfinite(loss):
        raise FloatingPointError("critic loss diverged")
    critic.step(grads)
    return loss


def actor_loss_and_grad(actor: nn.MLPParams, pi_prev, a: int, delta: float):
    """-delta * log mu(pi_prev, a) with delta treated as a constant."""
    mu, cache = nn.forward(actor, pi_prev)
    logp = nn.log_softmax(nn.cached_logits(cache))
    onehot = np.zeros_like(mu)
    onehot[a - 1] = 1.0
    dz = -delta * (onehot - mu)
    return float(-delta * logp[a - 1]), nn.backward(actor, cache, dz, wrt_logits=True)


def actor_update(actor: nn.Network, pi_prev, a: int, delta: float) -> float:
    loss, grads = actor_loss_and_grad(actor.params, pi_prev, a, delta)
    actor.step(grads)
    return loss


class ActorCriticAgent(Policy):
    kind = "ac"
    learnable = True

    def __init__(self, M, rng, hidden=64, gamma=0.9, **adam_hyper):
        self.actor = nn.Network.create([M, hidden, hidden, M - 1], rng, head="softmax", **adam_hyper)
        self.critic = nn.Network.create([M, hidden, hidden, 1], rng, lagged=True, **adam_hyper)
        self.gamma = gamma

    def act(self, pi, rng):
        return sample_categorical(actor_distribution(self.actor.params, pi), rng) + 1

    def learn(self, pi_prev, a, r, pi_next, terminal, rng):
        delta = td_error(self.critic, r, pi_prev, pi_next, self.gamma, terminal)
        loss = critic_update(self.critic, r, pi_prev, pi_next, self.gamma, terminal)
        actor_update(self.actor, pi_prev, a, delta)
        return loss

    def networks(self):
        return {"actor": self.actor, "critic": self.critic}
