from .config import RunConfig, load_config
from .io import emit, load_checkpoint, save_checkpoint
from .runner import EpisodeRecord, MetricsSummary, evaluate, make_agent, run_episode, sweep, train

__all__ = [
    "RunConfig", "load_config", "emit", "load_checkpoint", "save_checkpoint",
    "EpisodeRecord", "MetricsSummary", "evaluate", "make_agent", "run_episode", "sweep", "train",
]
