# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-step kernels. Same call surface as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, INFINITY

cnp.import_array()


def posterior_update(const double[::1] prev, const unsigned char[:, ::1] hyp_bits,
                     long mask, const unsigned char[::1] y_full, const double[::1] p):
    cdef Py_ssize_t m = hyp_bits.shape[0]
    cdef Py_ssize_t n = hyp_bits.shape[1]
    cdef Py_ssize_t i, k
    cdef double w, z = 0.0
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] post = out
    for i in range(m):
        w = prev[i]
        if w != 0.0:
            for k in range(n):
                if (mask >> k) & 1:
                    if hyp_bits[i, k] == y_full[k]:
                        w *= 1.0 - p[k]
                    else:
                        w *= p[k]
        post[i] = w
        z += w
    if z > 0.0:
        for i in range(m):
            post[i] /= z
    return out, z


def sample_bits(const unsigned char[::1] x_bits, long mask, const double[::1] p,
                const double[::1] uniforms, out):
    cdef Py_ssize_t n = x_bits.shape[0]
    cdef Py_ssize_t k, j = 0
    cdef unsigned char[::1] o = out
    cdef unsigned char bit
    for k in range(n):
        if (mask >> k) & 1:
            bit = x_bits[k]
            o[j] = 1 - bit if uniforms[j] < p[k] else bit
            j += 1
    return out


def bayesian_llr(pi):
    cdef const double[::1] v = np.ascontiguousarray(pi, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double s = 0.0, q
    for i in range(v.shape[0]):
        q = v[i]
        if q >= 1.0:
            return INFINITY
        if q > 0.0:
            s += q * log(q / (1.0 - q))
    return s


def entropy(pi):
    cdef const double[::1] v = np.ascontiguousarray(pi, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double s = 0.0, q
    for i in range(v.shape[0]):
        q = v[i]
        if q > 0.0:
            s -= q * log(q)
    return s


def argmax_first(pi):
    cdef const double[::1] v = np.ascontiguousarray(pi, dtype=np.float64)
    cdef Py_ssize_t i, best = 0
    for i in range(1, v.shape[0]):
        if v[i] > v[best]:
            best = i
    return best
