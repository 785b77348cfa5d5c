"""Dueling deep Q-learning with replay, decaying epsilon and Gibbs sampling."""
from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np

from . import nn
from .policy import Policy, sample_categorical


@dataclass
class DuelingQNet:
    """Shared ReLU trunk feeding a scalar value head and an advantage head."""

    trunk: nn.MLPParams
    value: nn.MLPParams
    advantage: nn.MLPParams

    def __post_init__(self):
        width = self.trunk.layer_dims[-1]
        for name, head in (("value", self.value), ("advantage", self.advantage)):
            if head.layer_dims[0] != width:
                raise ValueError(f"{name} head expects {head.layer_dims[0]} inputs, trunk emits {width}")
        if self.value.layer_dims[-1] != 1:
            raise ValueError("value head must emit a scalar")

    @classmethod
    def create(cls, M: int, rng, hidden: int = 64) -> "DuelingQNet":
        return cls(nn.init_mlp([M, hidden, hidden], rng, head="relu"),
                   nn.init_mlp([hidden, 1], rng),
                   nn.init_mlp([hidden, M - 1], rng))

    def parts(self) -> dict:
        return {"trunk": self.trunk, "value": self.value, "advantage": self.advantage}

    def arrays(self) -> list:
        return self.trunk.arrays() + self.value.arrays() + self.advantage.arrays()

    def copy(self) -> "DuelingQNet":
        return copy.deepcopy(self)


def q_forward(net: DuelingQNet, pi):
    feat, c_t = nn.forward(net.trunk, pi)
    v, c_v = nn.forward(net.value, feat)
    adv, c_a = nn.forward(net.advantage, feat)
    q = v + adv - adv.mean(axis=-1, keepdims=True)
    return q, (c_t, c_v, c_a)


def q_values(net: DuelingQNet, pi) -> np.ndarray:
    """Q(pi, a) for every action, position ``a - 1``."""
    return q_forward(net, pi)[0]


def q_backward(net: DuelingQNet, cache, dq) -> DuelingQNet:
    c_t, c_v, c_a = cache
    dq = np.asarray(dq, dtype=np.float64)
    dv = dq.sum(axis=-1, keepdims=True)
    dadv = dq - dq.mean(axis=-1, keepdims=True)
    g_v, dfeat_v = nn.backward(net.value, c_v, dv, input_grad=True)
    g_a, dfeat_a = nn.backward(net.advantage, c_a, dadv, input_grad=True)
    g_t = nn.backward(net.trunk, c_t, dfeat_v + dfeat_a)
    return DuelingQNet(g_t, g_v, g_a)


@dataclass
class EpsilonSchedule:
    """Linear per-episode decay from ``start`` to ``end`` over ``horizon`` episodes."""

    start: float = 0.4
    end: float = 0.05
    horizon: int = 2000

    def __call__(self, episode: int) -> float:
        if self.horizon <= 0 or episode >= self.horizon:
            return self.end
        frac = max(episode, 0) / self.horizon
        return self.start + (self.end - self.start) * frac


class ReplayBuffer:
    """Fixed-capacity ring of (pi, action, reward, pi_next, terminal)."""

    def __init__(self, capacity: int, M: int):
        if capacity < 1:
            raise ValueError("replay capacity must be positive")
        self.capacity = capacity
        self.pi = np.zeros((capacity, M))
        self.pi_next = np.zeros((capacity, M))
        self.action = np.zeros(capacity, dtype=np.int64)
        self.reward = np.zeros(capacity)
        self.terminal = np.zeros(capacity, dtype=bool)
        self._next = 0
        self.size = 0

    def __len__(self):
        return self.size

    def push(self, pi, a, r, pi_next, terminal):
        i = self._next
        self.pi[i] = pi
        self.action[i] = a
        self.reward[i] = r
        self.pi_next[i] = pi_next
        self.terminal[i] = terminal
        self._next = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample_indices(self, batch: int, rng) -> np.ndarray:
        if batch > self.size:
            raise ValueError(f"buffer holds {self.size} transitions, batch needs {batch}")
        return rng.choice(self.size, size=batch, replace=False)

    def batch(self, idx):
        return (self.pi[idx], self.action[idx], self.reward[idx],
                self.pi_next[idx], self.terminal[idx])


def select_action(net: DuelingQNet, pi, eps: float, rng) -> int:
    """Uniform action with probability ``eps``, otherwise a ~ softmax(Q)."""
    n_actions = net.advantage.layer_dims[-1]
    if rng.random() < eps:
        return int(rng.integers(n_actions)) + 1
    return sample_categorical(nn.softmax(q_values(net, pi)), rng) + 1


def dqn_loss_and_grad(net: DuelingQNet, target: DuelingQNet, batch, gamma: float):
    """Mean squared TD residual and its gradient w.r.t. ``net``.

    The target r + gamma * max_a' Q(pi', a'; target) is held constant;
    terminal transitions use r alone.
    """
    pi, a, r, pi_next, term = batch
    pi = np.atleast_2d(pi)
    pi_next = np.atleast_2d(pi_next)
    a = np.atleast_1d(a)
    r = np.atleast_1d(r).astype(np.float64)
    term = np.atleast_1d(term)
    boot = q_values(target, pi_next).max(axis=1)
    y = r + gamma * np.where(term, 0.0, boot)
    q, cache = q_forward(net, pi)
    rows = np.arange(len(a))
    resid = y - q[rows, a - 1]
    loss = float(np.mean(resid ** 2))
    dq = np.zeros_like(q)
    dq[rows, a - 1] = -2.0 * resid / len(a)
    return loss, q_backward(net, cache, dq)


class DQNAgent(Policy):
    kind = "dqn"
    learnable = True

    def __init__(self, M, rng, hidden=64, gamma=0.9, batch_size=64, capacity=10_000,
                 schedule: EpsilonSchedule | None = None, **adam_hyper):
        net = DuelingQNet.create(M, rng, hidden)
        self.q = nn.Network(net, nn.AdamState.for_params(net, **adam_hyper), net.copy())
        self.gamma = gamma
        self.batch_size = batch_size
        self.buffer = ReplayBuffer(capacity, M)
        self.schedule = schedule or EpsilonSchedule()
        self.eps = self.schedule(0)
        self.training = True

    def start_episode(self, episode):
        self.eps = self.schedule(episode)

    def act(self, pi, rng):
        return select_action(self.q.params, pi, self.eps if self.training else 0.0, rng)

    def learn(self, pi_prev, a, r, pi_next, terminal, rng):
        self.buffer.push(pi_prev, a, r, pi_next, terminal)
        if len(self.buffer) < self.batch_size:
            return 0.0
        return dqn_update(self.q, self.buffer, self.batch_size, self.gamma, rng)

    def networks(self):
        return {"q": self.q}


def dqn_update(q: nn.Network, buffer: ReplayBuffer, batch_size: int, gamma: float, rng) -> float:
    """One Adam step on a uniformly sampled replay batch; returns the loss."""
    idx = buffer.sample_indices(batch_size, rng)
    loss, grads = dqn_loss_and_grad(q.params, q.lagged, buffer.batch(idx), gamma)
    if not np.isfinite(loss):
        raise FloatingPointError("DQN loss diverged")
    q.step(grads)
    return loss
