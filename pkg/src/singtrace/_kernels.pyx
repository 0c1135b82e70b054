# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Must stay bit-identical to ``_kernels_py``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def kahan_cumsum(double[::1] values):
    cdef Py_ssize_t n = values.shape[0]
    out = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] o = out
    cdef double s = 0.0, c = 0.0, y, t
    cdef Py_ssize_t i
    o[0] = 0.0
    for i in range(n):
        y = values[i] - c
        t = s + y
        c = (t - s) - y
        s = t
        o[i + 1] = s
    return out


def compensated_sum(double[::1] values):
    cdef Py_ssize_t n = values.shape[0]
    cdef double s = 0.0, c = 0.0, y, t
    cdef Py_ssize_t i
    for i in range(n):
        y = values[i] - c
        t = s + y
        c = (t - s) - y
        s = t
    return s


def window_extrema(double[::1] prefix, Py_ssize_t n, Py_ssize_t count):
    """min/max of (prefix[p + n] - prefix[p]) / n over p in [0, count)."""
    cdef double lo = np.inf, hi = -np.inf, b
    cdef Py_ssize_t p
    if count <= 0 or count + n > prefix.shape[0]:
        raise ValueError("window exceeds prefix table")
    for p in range(count):
        b = (prefix[p + n] - prefix[p]) / n
        if b < lo:
            lo = b
        if b > hi:
            hi = b
    return lo, hi
