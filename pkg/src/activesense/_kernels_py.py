"""Pure numpy implementations of the per-step hot kernels.

Signatures mirror ``_kernels_c`` exactly so :mod:`activesense.kernels` can
swap one for the other at import time.
"""
import numpy as np


def posterior_update(prev, hyp_bits, mask, y_full, p):
    """Unnormalised Bayes step followed by renormalisation.

    ``y_full`` is indexed by process; only entries whose bit is set in
    ``mask`` are read. Returns ``(posterior, normaliser)``; the caller
    decides what a zero normaliser means.
    """
    n = hyp_bits.shape[1]
    post = np.array(prev, dtype=np.float64, copy=True)
    for k in range(n):
        if not (mask >> k) & 1:
            continue
        match = hyp_bits[:, k] == y_full[k]
        post *= np.where(match, 1.0 - p[k], p[k])
    z = float(post.sum())
    if z > 0.0:
        post /= z
    return post, z


def sample_bits(x_bits, mask, p, uniforms, out):
    """Binary symmetric channel: flip x_k when the k-th uniform falls below p_k.

    ``uniforms`` holds one draw per probed process, ascending process order.
    Writes the observed bits into ``out`` (same order) and returns it.
    """
    j = 0
    for k in range(x_bits.shape[0]):
        if (mask >> k) & 1:
            bit = int(x_bits[k])
            out[j] = 1 - bit if uniforms[j] < p[k] else bit
            j += 1
    return out


def bayesian_llr(pi):
    pi = np.asarray(pi, dtype=np.float64)
    if np.any(pi >= 1.0):
        return np.inf
    nz = pi > 0.0
    q = pi[nz]
    return float(np.sum(q * np.log(q / (1.0 - q))))


def entropy(pi):
    pi = np.asarray(pi, dtype=np.float64)
    q = pi[pi > 0.0]
    return float(-np.sum(q * np.log(q)))


def argmax_first(pi):
    # np.argmax already returns the first maximal index
    return int(np.argmax(pi))
