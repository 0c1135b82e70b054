"""Pure-Python twins of the compiled kernels in ``_kernels.pyx``.

Every function here performs the same floating-point operations in the same
order as its compiled counterpart, so results are bit-identical.
"""
import numpy as np


def kahan_cumsum(values):
    values = np.ascontiguousarray(values, dtype=np.float64)
    out = np.empty(values.shape[0] + 1, dtype=np.float64)
    out[0] = 0.0
    s = 0.0
    c = 0.0
    for i, v in enumerate(values.tolist()):
        y = v - c
        t = s + y
        c = (t - s) - y
        s = t
        out[i + 1] = s
    return out


def compensated_sum(values):
    s = 0.0
    c = 0.0
    for v in np.ascontiguousarray(values, dtype=np.float64).tolist():
        y = v - c
        t = s + y
        c = (t - s) - y
        s = t
    return s


def window_extrema(prefix, n, count):
    """min/max of (prefix[p + n] - prefix[p]) / n over p in [0, count)."""
    prefix = np.ascontiguousarray(prefix, dtype=np.float64)
    if count <= 0 or count + n > prefix.shape[0]:
        raise ValueError("window exceeds prefix table")
    b = (prefix[n:n + count] - prefix[:count]) / n
    return float(b.min()), float(b.max())
