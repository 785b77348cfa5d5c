"""Backend selection for the hot per-step kernels.

The compiled extension is used when it was built; otherwise the numpy
fallback is loaded. Set ``ACTIVESENSE_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("ACTIVESENSE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels_c as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

posterior_update = _impl.posterior_update
sample_bits = _impl.sample_bits
bayesian_llr = _impl.bayesian_llr
entropy = _impl.entropy
argmax_first = _impl.argmax_first

__all__ = [
    "BACKEND",
    "posterior_update",
    "sample_bits",
    "bayesian_llr",
    "entropy",
    "argmax_first",
]
