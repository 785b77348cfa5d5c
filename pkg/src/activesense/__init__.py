"""Anomaly detection by sequential controlled sensing.

An agent probes subsets of noisy binary processes, tracks the exact
posterior over all joint states, and stops once one state is likely enough.
Selection policies: dueling DQN, actor-critic, deep active inference, and
the Chernoff / observe-all / random references.
"""
from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
