"""Episode loop plus training, evaluation and parameter sweeps."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..agent_ac import ActorCriticAgent
from ..agent_ai import ActiveInferenceAgent
from ..agent_dqn import DQNAgent, EpsilonSchedule
from ..baselines import ChernoffPolicy, FixedPolicy
from ..belief import instantaneous_reward, map_index, stop_check, update_belief
from ..env import (
    STREAM_EVAL,
    STREAM_INIT,
    STREAM_TRAIN,
    ProcessConfig,
    action_processes,
    build_prior,
    episode_rng,
    hypothesis_to_vector,
    sample_observation,
    sample_state,
    vector_to_hypothesis,
)
from .config import RunConfig

log = logging.getLogger(__name__)

SWEEP_AXES = {"pi_upper": "pi_upper", "rho": "rho", "lambda": "lam", "lam": "lam"}


@dataclass
class EpisodeRecord:
    stopping_time: int
    estimate: tuple
    truth: tuple
    correct: bool
    total_cost: float
    truncated: bool
    reward_sum: float = 0.0
    final_max_belief: float = float("nan")
    trace: list | None = field(default=None, repr=False)


@dataclass
class MetricsSummary:
    episodes: int
    accuracy: float
    accuracy_se: float
    mean_stopping_time: float
    std_stopping_time: float
    se_stopping_time: float
    mean_total_cost: float
    std_total_cost: float
    se_total_cost: float
    truncation_rate: float

    @classmethod
    def from_records(cls, records) -> "MetricsSummary":
        n = len(records)
        if n == 0:
            nan = float("nan")
            return cls(0, nan, nan, nan, nan, nan, nan, nan, nan, nan)
        correct = np.array([r.correct for r in records], dtype=np.float64)
        T = np.array([r.stopping_time for r in records], dtype=np.float64)
        cost = np.array([r.total_cost for r in records], dtype=np.float64)
        acc = float(correct.mean())
        ddof = 1 if n > 1 else 0
        sT, sC = float(T.std(ddof=ddof)), float(cost.std(ddof=ddof))
        return cls(
            episodes=n,
            accuracy=acc,
            accuracy_se=math.sqrt(acc * (1.0 - acc) / n),
            mean_stopping_time=float(T.mean()),
            std_stopping_time=sT,
            se_stopping_time=sT / math.sqrt(n),
            mean_total_cost=float(cost.mean()),
            std_total_cost=sC,
            se_total_cost=sC / math.sqrt(n),
            truncation_rate=float(np.mean([r.truncated for r in records])),
        )


def run_episode(policy, cfg: ProcessConfig, reward_spec, pi_upper: float, horizon: int,
                rng: np.random.Generator, learn: bool = False, trace: bool = False,
                prior=None) -> EpisodeRecord:
    """Simulate one detection episode.

    At least one probe is always taken. The loop ends when the largest
    posterior reaches ``pi_upper`` or after ``horizon`` probes, whichever
    comes first; the MAP hypothesis is declared either way.
    """
    if prior is None:
        prior = build_prior(cfg)
    x = sample_state(prior, rng)
    pi = np.asarray(prior, dtype=np.float64)
    costs = cfg.action_costs
    total_cost = 0.0
    reward_sum = 0.0
    steps = [] if trace else None
    t = 0
    stopped = False
    while t < horizon:
        t += 1
        a = policy.act(pi, rng)
        y = sample_observation(x, a, cfg, rng)
        nxt = update_belief(pi, a, y, cfg)
        r = instantaneous_reward(pi, nxt, a, reward_spec, cfg)
        total_cost += costs[a - 1]
        reward_sum += r
        stopped = stop_check(nxt, pi_upper) is not None
        if learn:
            loss = policy.learn(pi, a, r, nxt, stopped, rng)
            if not math.isfinite(loss):
                raise FloatingPointError(f"non-finite training loss at step {t}")
        if trace:
            steps.append({
                "t": t,
                "action": list(action_processes(a, cfg.N)),
                "y": [int(v) for v in y],
                "pi": [float(v) for v in nxt],
                "reward": float(r),
                "cost": float(costs[a - 1]),
            })
        pi = nxt
        if stopped:
            break
    i_hat = map_index(pi)
    estimate = tuple(int(v) for v in hypothesis_to_vector(i_hat, cfg.N))
    truth = tuple(int(v) for v in x)
    return EpisodeRecord(
        stopping_time=t,
        estimate=estimate,
        truth=truth,
        correct=i_hat == vector_to_hypothesis(x),
        total_cost=float(total_cost),
        truncated=not stopped,
        reward_sum=float(reward_sum),
        final_max_belief=float(pi[i_hat - 1]),
        trace=steps,
    )


def make_agent(run: RunConfig):
    """Fresh policy for ``run.agent``; learnable agents get seeded weights."""
    M = 1 << run.N
    rng = episode_rng(run.seed, STREAM_INIT, 0)
    adam = {"lr": run.lr}
    if run.agent == "dqn":
        sched = EpsilonSchedule(run.eps_start, run.eps_end, run.eps_horizon)
        return DQNAgent(M, rng, hidden=run.hidden, gamma=run.gamma, batch_size=run.batch_size,
                        capacity=run.replay_capacity, schedule=sched, **adam)
    if run.agent == "ac":
        return ActorCriticAgent(M, rng, hidden=run.hidden, gamma=run.gamma, **adam)
    if run.agent == "ai":
        return ActiveInferenceAgent(M, rng, hidden=run.hidden, **adam)
    if run.agent == "chernoff":
        return ChernoffPolicy(run.process)
    return FixedPolicy(run.agent, run.N)


def train(run: RunConfig, agent=None, progress=None):
    """Train a learnable agent; returns ``(agent, log_rows)``.

    Each log row holds the episode index, reward sum and stopping time.
    """
    if not run.learnable:
        raise ValueError(f"agent {run.agent!r} does not learn")
    agent = agent if agent is not None else make_agent(run)
    cfg, spec = run.process, run.reward_spec
    prior = build_prior(cfg)
    if hasattr(agent, "training"):
        agent.training = True
    rows = []
    for ep in range(run.n_train_episodes):
        agent.start_episode(ep)
        rec = run_episode(agent, cfg, spec, run.pi_upper, run.train_horizon,
                          episode_rng(run.seed, STREAM_TRAIN, ep), learn=True, prior=prior)
        rows.append({"episode": ep, "reward_sum": rec.reward_sum,
                     "stopping_time": rec.stopping_time})
        if progress is not None:
            progress(ep, rec)
    if hasattr(agent, "training"):
        agent.training = False
    return agent, rows


def evaluate(policy, run: RunConfig, episodes: int | None = None,
             keep_records: bool = False):
    """Run evaluation episodes with frozen policy parameters.

    Returns the :class:`MetricsSummary`, or ``(summary, records)`` when
    ``keep_records`` is set.
    """
    n = run.eval_episodes if episodes is None else episodes
    cfg, spec = run.process, run.reward_spec
    prior = build_prior(cfg)
    if hasattr(policy, "training"):
        policy.training = False
    records = [
        run_episode(policy, cfg, spec, run.pi_upper, run.T_max,
                    episode_rng(run.seed, STREAM_EVAL, j), learn=False, prior=prior)
        for j in range(n)
    ]
    summary = MetricsSummary.from_records(records)
    return (summary, records) if keep_records else summary


def sweep(run: RunConfig, axis: str, values, episodes: int | None = None):
    """Train (when learnable) and evaluate once per value of ``axis``.

    Returns a list of ``(value, RunConfig, MetricsSummary)``.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"sweep axis must be one of {sorted(set(SWEEP_AXES))}, got {axis!r}")
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    out = []
    for v in values:
        sub = run.replace(**{SWEEP_AXES[axis]: float(v)})
        policy = train(sub)[0] if sub.learnable else make_agent(sub)
        summary = evaluate(policy, sub, episodes)
        log.info("sweep %s=%s: %s", axis, v, summary)
        out.append((float(v), sub, summary))
    return out
