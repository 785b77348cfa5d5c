"""Run configuration and its flat TOML file format."""
from __future__ import annotations

import dataclasses
import hashlib
import json
import sys
from dataclasses import dataclass

from ..belief import RewardKind, RewardSpec
from ..env import ConfigError, ProcessConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

AGENTS = ("dqn", "ac", "ai", "chernoff", "observe_all", "random", "single_random")
LEARNABLE = ("dqn", "ac", "ai")

# Training length when train_episodes is left unset.
DEFAULT_TRAIN_EPISODES = {"dqn": 2000, "ac": 1000, "ai": 1000}


@dataclass(frozen=True)
class RunConfig:
    # processes
    N: int = 3
    p: tuple = (0.2,)
    c: tuple = (0.2,)
    q: float = 0.8
    rho: float = 0.8
    dep_pair: tuple | None = (1, 2)
    # reward and stopping
    reward: str = "llr"
    lam: float = 1.0
    pi_upper: float = 0.8
    # agent and training
    agent: str = "ac"
    gamma: float = 0.9
    train_episodes: int | None = None
    train_horizon: int = 50
    eval_episodes: int = 10_000
    T_max: int = 5000
    eps_start: float = 0.4
    eps_end: float = 0.05
    eps_decay_episodes: int | None = None
    hidden: int = 64
    lr: float = 1e-3
    batch_size: int = 64
    replay_capacity: int = 10_000
    seed: int = 0

    def __post_init__(self):
        for name in ("p", "c"):
            v = getattr(self, name)
            object.__setattr__(self, name, tuple(v) if isinstance(v, (list, tuple)) else (float(v),))
        if self.dep_pair is not None:
            object.__setattr__(self, "dep_pair", tuple(self.dep_pair))
        if self.agent not in AGENTS:
            raise ConfigError(f"agent must be one of {AGENTS}, got {self.agent!r}")
        try:
            RewardKind(self.reward)
        except ValueError:
            raise ConfigError(f"reward must be 'llr' or 'entropy', got {self.reward!r}") from None
        if not 0.0 < self.pi_upper <= 1.0:
            raise ConfigError(f"pi_upper must lie in (0, 1], got {self.pi_upper}")
        if not self.lam >= 0.0:
            raise ConfigError(f"lambda must be non-negative, got {self.lam}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must lie in [0, 1], got {self.gamma}")
        for name in ("train_horizon", "T_max", "hidden", "batch_size", "replay_capacity"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")
        if self.eval_episodes < 0 or (self.train_episodes is not None and self.train_episodes < 0):
            raise ConfigError("episode counts must be non-negative")
        if not 0.0 <= self.eps_end <= self.eps_start <= 1.0:
            raise ConfigError("need 0 <= eps_end <= eps_start <= 1")
        if self.batch_size > self.replay_capacity:
            raise ConfigError("batch_size exceeds replay_capacity")
        self.process  # validates the process block

    @property
    def process(self) -> ProcessConfig:
        return ProcessConfig(N=self.N, p=self.p, c=self.c, q=self.q, rho=self.rho,
                             dep_pair=self.dep_pair)

    @property
    def reward_spec(self) -> RewardSpec:
        return RewardSpec(RewardKind(self.reward), self.lam)

    @property
    def learnable(self) -> bool:
        return self.agent in LEARNABLE

    @property
    def n_train_episodes(self) -> int:
        if self.train_episodes is not None:
            return self.train_episodes
        return DEFAULT_TRAIN_EPISODES.get(self.agent, 0)

    @property
    def eps_horizon(self) -> int:
        if self.eps_decay_episodes is not None:
            return self.eps_decay_episodes
        return self.n_train_episodes

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["p"] = list(self.p)
        d["c"] = list(self.c)
        d["dep_pair"] = list(self.dep_pair) if self.dep_pair is not None else None
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


# File keys that differ from field names.
_ALIASES = {"lambda": "lam"}
_FIELDS = {f.name for f in dataclasses.fields(RunConfig)}


def config_from_mapping(raw: dict) -> RunConfig:
    kwargs = {}
    for key, value in raw.items():
        name = _ALIASES.get(key, key)
        if name not in _FIELDS:
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(value, dict):
            raise ConfigError(f"config is flat; key {key!r} holds a table")
        kwargs[name] = value
    if kwargs.get("dep_pair") in ([], "none"):
        kwargs["dep_pair"] = None
    try:
        return RunConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return config_from_mapping(raw)
