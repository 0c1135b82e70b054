"""Bounded sequences and functions on [0, inf), the structural maps between
them, and the quadrature helpers everything else is built on.

The three maps are

* ``piecewise_linear_extension``  l^inf(N) -> C_b([0, inf)), with a_0 = 0,
* ``restrict_to_integers``        g -> {g(n)}_{n>=1},
* ``integer_averages``            g -> {int_{n-1}^n g}_{n>=1}.
"""
from __future__ import annotations

import enum
import functools
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate as _integrate

from .errors import BoundViolation, DomainError, QuadratureError
from .kernels import kahan_cumsum

# relative slack allowed when checking declared bounds
_BOUND_SLACK = 1e-12


def _as_array(x):
    arr = np.asarray(x, dtype=np.float64)
    return arr, arr.ndim == 0


def _restore(arr, scalar):
    return float(arr) if scalar else arr


class Smoothness(str, enum.Enum):
    CONTINUOUS = "continuous"
    PIECEWISE_DIFFERENTIABLE = "piecewise_differentiable"
    DIFFERENTIABLE = "differentiable"


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _gauss_legendre(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def panel_integrals(f, left, right, order=10, chunk=1 << 16):
    """Gauss-Legendre integrals of a vectorized ``f`` over each [left_i, right_i]."""
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    x, w = _gauss_legendre(order)
    out = np.empty(left.shape[0], dtype=np.float64)
    for start in range(0, left.shape[0], chunk):
        lo = left[start:start + chunk]
        hi = right[start:start + chunk]
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        pts = mid[:, None] + half[:, None] * x[None, :]
        vals = np.asarray(f(pts.ravel()), dtype=np.float64).reshape(pts.shape)
        out[start:start + chunk] = half * (vals @ w)
    return out


def _log_edges(a, b, ratio=2.0):
    """Panel edges on [a, b]: a single panel below 1, then geometric."""
    if b <= 1.0:
        return [a, b]
    edges = [a]
    if a < 1.0:
        edges.append(1.0)
    cur = max(a, 1.0)
    while cur * ratio < b:
        cur *= ratio
        edges.append(cur)
    edges.append(b)
    return edges


def integrate(f, a, b, epsabs=1e-14, epsrel=1e-12, limit=200, points=None):
    """Adaptive Gauss-Kronrod integral of a scalar-or-vector ``f`` over [a, b].

    Long ranges are split into geometric panels so slowly varying integrands on
    logarithmic scales keep their accuracy.  Returns ``(value, abs_error)``.
    Raises ``QuadratureError`` naming the failing panel when QUADPACK reports
    non-convergence.
    """
    if b < a:
        raise DomainError("integration bounds reversed")
    if b == a:
        return 0.0, 0.0

    def scalar_f(s):
        return float(np.asarray(f(np.float64(s)), dtype=np.float64).reshape(-1)[0])

    edges = _log_edges(a, b)
    if points is not None:
        edges = sorted(set(edges) | {p for p in points if a < p < b})
    parts, errs = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", _integrate.IntegrationWarning)
            val, err, info = _integrate.quad(
                scalar_f, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1
            )[:3]
        if not math.isfinite(val):
            raise QuadratureError(f"non-finite integral on [{lo}, {hi}]", (lo, hi))
        tol = max(epsabs, epsrel * abs(val))
        if err > 1e3 * tol and err > 1e-9 * max(1.0, abs(val)):
            raise QuadratureError(
                f"quadrature did not converge on [{lo}, {hi}] (err {err:.3g})", (lo, hi)
            )
        parts.append(val)
        errs.append(err)
    return math.fsum(parts), math.fsum(errs)


def adaptive_panels(f, left, right, order=16, atol=1e-13, rtol=1e-12, max_depth=18, max_active=1 << 18):
    """int over each [left_i, right_i] by vectorized bisection: a panel is
    accepted once GL-``order`` and GL-``order/2`` agree; f is called on whole
    batches, never point by point."""
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    total = np.zeros(left.shape[0], dtype=np.float64)
    owner = np.arange(left.shape[0])
    lo, hi = left, right
    for depth in range(max_depth + 1):
        if lo.size == 0:
            break
        a = panel_integrals(f, lo, hi, order=order)
        b = panel_integrals(f, lo, hi, order=order // 2)
        ok = np.abs(a - b) <= np.maximum(atol * (hi - lo), rtol * np.abs(a))
        if depth == max_depth or 2 * np.count_nonzero(~ok) > max_active:
            ok[:] = True
        np.add.at(total, owner[ok], a[ok])
        keep = ~ok
        mid = 0.5 * (lo[keep] + hi[keep])
        lo, hi = np.concatenate([lo[keep], mid]), np.concatenate([mid, hi[keep]])
        owner = np.concatenate([owner[keep], owner[keep]])
    return total


def _graded_edges(a, b, per_unit=32, ratio=1.05):
    """Uniform panels up to 1, geometric beyond."""
    edges = [np.linspace(a, min(b, max(a, 1.0)), per_unit + 1)] if a < 1.0 else [np.array([a])]
    lo = edges[0][-1]
    if b > lo:
        count = max(int(math.ceil(math.log(b / lo) / math.log(ratio))), 1)
        edges.append(np.geomspace(lo, b, count + 1)[1:])
    return np.concatenate(edges)


def _segment_integral(f, a, b):
    """int_a^b f on graded panels with vectorized adaptive refinement; copes
    with integrands that have many kinks (step data seen on a log clock)."""
    if b <= a:
        return 0.0
    edges = _graded_edges(a, b)
    return math.fsum(adaptive_panels(f, edges[:-1], edges[1:]))


def cumulative_integral(f, grid, order=16, start_value=None):
    """I(g_j) = int_0^{g_j} f for an increasing positive grid.

    The first segment [0, g_0] is integrated on graded panels unless
    ``start_value`` is supplied; later segments use Gauss-Legendre panels
    refined by bisection where the full and half-order rules disagree.
    Panel sums are accumulated with compensated summation.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if start_value is None:
        start_value = _segment_integral(f, 0.0, float(grid[0]))
    parts = adaptive_panels(f, grid[:-1], grid[1:], order=order)
    sums = kahan_cumsum(np.ascontiguousarray(parts))
    return start_value + sums


# ---------------------------------------------------------------------------
# bounded sequences and functions
# ---------------------------------------------------------------------------

def _check_bound(vals, bound, what):
    if vals.size and not np.all(np.abs(vals) <= bound * (1.0 + _BOUND_SLACK) + 1e-300):
        worst = float(np.max(np.abs(vals)))
        raise BoundViolation(f"{what}: |value| {worst!r} exceeds declared bound {bound!r}")


@dataclass(frozen=True)
class BoundedSequence:
    """A lazily evaluated bounded sequence a_1, a_2, ...

    ``terms`` takes an integer-valued float or int array of indices (all >= 1)
    and returns the matching values.  Every access is checked against
    ``declared_bound``.
    """

    terms: Callable[[np.ndarray], np.ndarray]
    declared_bound: float
    label: str = "sequence"

    def __call__(self, n):
        arr = np.asarray(n)
        scalar = arr.ndim == 0
        idx = np.atleast_1d(arr).astype(np.float64)
        if np.any(idx < 1) or np.any(idx != np.floor(idx)):
            raise DomainError("sequence indices must be integers >= 1")
        vals = np.asarray(self.terms(idx), dtype=np.float64).reshape(idx.shape)
        _check_bound(vals, self.declared_bound, self.label)
        return float(vals[0]) if scalar else vals

    def head(self, count):
        """a_1, ..., a_count as an array."""
        return self(np.arange(1, count + 1, dtype=np.float64))

    def shift(self, k):
        """T_k: n -> a_{n+k}."""
        terms = self.terms
        return BoundedSequence(lambda n: terms(np.asarray(n) + k), self.declared_bound,
                               f"T_{k}({self.label})")

    def __add__(self, other):
        ta, tb = self.terms, other.terms
        return BoundedSequence(lambda n: ta(n) + tb(n),
                               self.declared_bound + other.declared_bound,
                               f"({self.label}+{other.label})")

    @classmethod
    def from_array(cls, values, bound=None, fill=0.0, label="array"):
        """Finite data a_1..a_m, continued by ``fill`` afterwards."""
        values = np.asarray(values, dtype=np.float64)
        m = values.shape[0]
        if bound is None:
            bound = max(float(np.max(np.abs(values))) if m else 0.0, abs(fill))

        def terms(n):
            n = np.asarray(n, dtype=np.float64)
            out = np.full(n.shape, fill, dtype=np.float64)
            inside = n <= m
            out[inside] = values[n[inside].astype(np.int64) - 1]
            return out

        return cls(terms, float(bound), label)

    @classmethod
    def from_callable(cls, func, bound, label="sequence"):
        return cls(lambda n: np.asarray(func(np.asarray(n, dtype=np.float64)), dtype=np.float64),
                   float(bound), label)


@dataclass(frozen=True)
class BoundedFunction:
    """A bounded function on [0, inf) with optional derivative and primitive."""

    fn: Callable[[np.ndarray], np.ndarray]
    declared_bound: float
    smoothness_hint: Smoothness = Smoothness.CONTINUOUS
    derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None
    primitive: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)
    label: str = "function"

    def __call__(self, t):
        arr, scalar = _as_array(t)
        vals = np.asarray(self.fn(arr), dtype=np.float64)
        _check_bound(vals, self.declared_bound, self.label)
        return _restore(vals, scalar)

    def diff(self, t, rel_step=1e-6):
        """Derivative: the supplied rule, else central differences."""
        arr, scalar = _as_array(t)
        if self.derivative is not None:
            return _restore(np.asarray(self.derivative(arr), dtype=np.float64), scalar)
        h = rel_step * np.maximum(np.abs(arr), 1.0)
        lo = np.maximum(arr - h, 0.0)
        hi = arr + h
        vals = (np.asarray(self.fn(hi)) - np.asarray(self.fn(lo))) / (hi - lo)
        return _restore(vals, scalar)

    def shift(self, a):
        """T_a: t -> g(t + a)."""
        fn, d, prim = self.fn, self.derivative, self.primitive
        shifted_prim = None
        if prim is not None:
            base = float(np.asarray(prim(np.array([float(a)])))[0])
            shifted_prim = lambda t: np.asarray(prim(np.asarray(t) + a)) - base
        return BoundedFunction(
            lambda t: fn(np.asarray(t) + a),
            self.declared_bound,
            self.smoothness_hint,
            None if d is None else (lambda t: d(np.asarray(t) + a)),
            shifted_prim,
            f"T_{a}({self.label})",
        )

    def __add__(self, other):
        f1, f2 = self.fn, other.fn
        return BoundedFunction(lambda t: f1(t) + f2(t),
                               self.declared_bound + other.declared_bound,
                               Smoothness.CONTINUOUS, label=f"({self.label}+{other.label})")

    def audit_derivative(self, points, h=1e-6, tol=1e-4):
        """Forward differences agree with ``derivative`` to O(h) at ``points``."""
        if self.derivative is None:
            return True
        pts = np.asarray(points, dtype=np.float64)
        fd = (np.asarray(self.fn(pts + h)) - np.asarray(self.fn(pts))) / h
        exact = np.asarray(self.derivative(pts))
        return bool(np.all(np.abs(fd - exact) <= tol * np.maximum(1.0, np.abs(exact))))

    @classmethod
    def constant(cls, value):
        v = float(value)
        return cls(lambda t: np.full(np.shape(t), v), abs(v), Smoothness.DIFFERENTIABLE,
                   lambda t: np.zeros(np.shape(t)), lambda t: v * np.asarray(t),
                   f"const({v!r})")


# ---------------------------------------------------------------------------
# structural maps
# ---------------------------------------------------------------------------

def piecewise_linear_extension(alpha: BoundedSequence) -> BoundedFunction:
    """p(alpha)(t) = a_n + (a_{n+1} - a_n)(t - n) on [n, n+1), with a_0 = 0."""
    seq_terms = alpha.terms

    def a(n):
        n = np.asarray(n, dtype=np.float64)
        out = np.zeros(n.shape, dtype=np.float64)
        pos = n >= 1
        if np.any(pos):
            out[pos] = seq_terms(n[pos])
        return out

    def fn(t):
        t = np.asarray(t, dtype=np.float64)
        if np.any(t < 0):
            raise DomainError("p(alpha) is defined on [0, inf)")
        n = np.floor(t)
        an = a(n)
        return an + (a(n + 1.0) - an) * (t - n)

    def deriv(t):
        n = np.floor(np.asarray(t, dtype=np.float64))
        return a(n + 1.0) - a(n)

    return BoundedFunction(fn, alpha.declared_bound, Smoothness.PIECEWISE_DIFFERENTIABLE,
                           deriv, None, f"p({alpha.label})")


def restrict_to_integers(g: BoundedFunction) -> BoundedSequence:
    """r_N(g) = {g(n)}_{n>=1}."""
    fn = g.fn
    return BoundedSequence(lambda n: np.asarray(fn(np.asarray(n, dtype=np.float64)), dtype=np.float64),
                           g.declared_bound, f"r_N({g.label})")


def integer_averages(g: BoundedFunction, tol=1e-9) -> BoundedSequence:
    """E_N(g) = {int_{n-1}^n g(s) ds}_{n>=1}.

    Uses the closed-form primitive when ``g`` carries one; otherwise
    Gauss-Legendre 16 checked against GL 8 on every unit interval, with
    adaptive refinement where they disagree by more than
    ``tol * declared_bound``.
    """
    return BoundedSequence(lambda n: unit_integrals(g, n, tol), g.declared_bound,
                           f"E_N({g.label})")


def unit_integrals(g: BoundedFunction, n, tol=1e-9, order=8):
    """int_{n-1}^{n} g for every index in ``n`` (float array of integers >= 1)."""
    n = np.asarray(n, dtype=np.float64)
    if g.primitive is not None:
        prim = g.primitive
        return np.asarray(prim(n), dtype=np.float64) - np.asarray(prim(n - 1.0), dtype=np.float64)
    left = n - 1.0
    fine = panel_integrals(g.fn, left, n, order=2 * order)
    coarse = panel_integrals(g.fn, left, n, order=order)
    limit = tol * max(g.declared_bound, 1e-300)
    bad = np.nonzero(np.abs(fine - coarse) > limit)[0]
    for i in bad:
        lo, hi = float(left[i]), float(n[i])
        val, err = integrate(g.fn, lo, hi, epsabs=0.1 * limit, epsrel=1e-13)
        if err > limit:
            raise QuadratureError(f"unit integral on [{lo}, {hi}] not resolved (err {err:.3g})",
                                  (lo, hi))
        fine[i] = val
    return fine
