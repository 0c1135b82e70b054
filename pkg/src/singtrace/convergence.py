"""Cesaro means, uniform-window (Lorentz) almost-convergence evidence,
Tauberian derivative bounds, the M_k transform, and S/F/C classification.

Every test here is finite-horizon *evidence*: a pass means the relevant
spread fell below ``tol`` on the sampled windows, never a proof.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .analysis_core import (BoundedFunction, BoundedSequence, _as_array, _restore, cumulative_integral,
                            integrate, panel_integrals)
from .errors import DomainError, QuadratureError
from .kernels import kahan_cumsum, window_extrema

DEFAULT_TOL = 1e-2
CESARO_WINDOW_RATIO = 1000.0   # covers a full period of sin(log t) (needs > e^{2 pi})
S_WINDOW_RATIO = 10.0
GRID_DENSITY = 64
F_HORIZON_CAP = 100_000        # unit integrals per function-level F test
TAU_SLACK = 1.1
TAU_FLOOR = 1e-6


class ConvergenceClass(str, enum.Enum):
    S = "S_convergent"
    F = "F_almost_convergent"
    C = "C_cesaro_convergent"
    UNDETERMINED = "undetermined"


@dataclass
class CesaroBand:
    lo: float
    hi: float
    horizon: float
    stabilized: bool
    window: tuple = (0.0, 0.0)
    diagnostics: list = field(default_factory=list)

    @property
    def width(self):
        return self.hi - self.lo

    def contains(self, value, tol=0.0):
        return self.lo - tol <= value <= self.hi + tol


@dataclass
class TestOutcome:
    passed: bool
    limit: Optional[float]
    spread: float
    detail: str = ""


@dataclass
class ConvergenceVerdict:
    cls: ConvergenceClass
    limit: Optional[float]
    band: CesaroBand
    tauberian_H: Optional[float] = None
    diagnostics: list = field(default_factory=list)
    tests: dict = field(default_factory=dict)

    @property
    def chain_ok(self):
        """S => F => C among the individual test outcomes."""
        s, f, c = (self.tests.get(k) for k in ("S", "F", "C"))
        ok = True
        if s is not None and f is not None and s.passed and not f.passed:
            ok = False
        if f is not None and c is not None and f.passed and not c.passed:
            ok = False
        return ok


def log_grid(lo, hi, density=GRID_DENSITY):
    decades = max(math.log10(hi / lo), 1e-9)
    return np.geomspace(lo, hi, max(int(math.ceil(decades * density)) + 1, 2))


# ---------------------------------------------------------------------------
# Cesaro transform and band
# ---------------------------------------------------------------------------

def cesaro_transform(g: BoundedFunction, mu):
    """C(g)(mu) = (1/mu) int_0^mu g."""
    arr, scalar = _as_array(mu)
    if np.any(arr <= 0):
        raise DomainError("Cesaro transform needs mu > 0")
    flat = np.atleast_1d(arr)
    if g.primitive is not None:
        vals = (np.asarray(g.primitive(flat)) - float(np.asarray(g.primitive(np.zeros(1)))[0])) / flat
    else:
        vals = np.array([integrate(g.fn, 0.0, float(m))[0] / m for m in flat])
    return _restore(vals.reshape(arr.shape), scalar)


def cesaro_profile(g: BoundedFunction, grid):
    """C(g) on an increasing positive grid, via cumulative quadrature."""
    grid = np.asarray(grid, dtype=np.float64)
    if g.primitive is not None:
        return cesaro_transform(g, grid)
    return cumulative_integral(g.fn, grid) / grid


def cesaro_band(g: BoundedFunction, horizon, window_ratio=CESARO_WINDOW_RATIO, tol=DEFAULT_TOL,
                grid_density=GRID_DENSITY) -> CesaroBand:
    """min/max of C(g) over [horizon/window_ratio, horizon].

    The band recomputed at horizon/10 must contain the current one up to
    ``tol``; otherwise ``stabilized`` is false.
    """
    if horizon < 1e3:
        raise DomainError("cesaro_band needs horizon >= 1e3")
    h = float(horizon)
    grid = log_grid(h / (10 * window_ratio), h, grid_density)
    prof = cesaro_profile(g, grid)
    cur = grid >= h / window_ratio * (1 - 1e-12)
    prev = grid <= h / 10 * (1 + 1e-12)
    lo, hi = float(prof[cur].min()), float(prof[cur].max())
    plo, phi = float(prof[prev].min()), float(prof[prev].max())
    stabilized = plo <= lo + tol and phi >= hi - tol
    diags = [] if stabilized else [
        f"band at horizon/10 [{plo:.6g}, {phi:.6g}] does not contain [{lo:.6g}, {hi:.6g}] within {tol:g}"]
    return CesaroBand(lo, hi, h, stabilized, (h / window_ratio, h), diags)


# ---------------------------------------------------------------------------
# almost convergence (uniform Cesaro windows)
# ---------------------------------------------------------------------------

def _rungs(P):
    out, n = [], 10
    while n <= P:
        out.append(n)
        n *= 10
    return out


def uniform_window_test(prefix, P, tol=DEFAULT_TOL) -> TestOutcome:
    """Lorentz test on a prefix-sum table: windows b_n(p), p < P, n = 10, 100, ... <= P.

    The candidate limit is the median of the largest rung's windows; the test
    passes when sup_p |b_n(p) - median| < tol on the two largest rungs.
    """
    rungs = _rungs(P)
    if len(rungs) < 2:
        raise DomainError("uniform window test needs P >= 100")
    top = rungs[-1]
    b_top = (prefix[top:top + P] - prefix[:P]) / top
    med = float(np.median(b_top))
    spreads = []
    for n in rungs:
        lo, hi = window_extrema(prefix, n, P)
        spreads.append(max(med - lo, hi - med))
    worst = max(spreads[-2:])
    detail = "; ".join(f"n={n}: {s:.3g}" for n, s in zip(rungs, spreads))
    return TestOutcome(worst < tol, med, worst, f"uniform window spreads {detail}")


def almost_convergence_test(alpha: BoundedSequence, horizon_n, tol=DEFAULT_TOL) -> ConvergenceVerdict:
    """F-test (uniform windows) plus the plain Cesaro test on a sequence."""
    P = int(horizon_n)
    if P < 1000:
        raise DomainError("almost_convergence_test needs horizon_n >= 1e3")
    prefix = kahan_cumsum(np.ascontiguousarray(alpha.head(2 * P)))
    f = uniform_window_test(prefix, P, tol)
    c, band = _prefix_cesaro_test(prefix, P, tol)
    tests = {"F": f, "C": c}
    if f.passed:
        cls, limit = ConvergenceClass.F, f.limit
    elif c.passed:
        cls, limit = ConvergenceClass.C, c.limit
    else:
        cls, limit = ConvergenceClass.UNDETERMINED, None
    diags = [f.detail]
    if f.passed and not c.passed:
        diags.append("chain violation: F passed but Cesaro test failed")
    return ConvergenceVerdict(cls, limit, band, None, diags, tests)


def _prefix_cesaro_test(prefix, P, tol, window_ratio=CESARO_WINDOW_RATIO, stride=None):
    m = np.unique(np.geomspace(max(P / window_ratio, 1.0), P, 200).astype(np.int64))
    means = prefix[m] / m
    lo, hi = float(means.min()), float(means.max())
    m_prev = np.unique(np.geomspace(max(P / (10 * window_ratio), 1.0), P / 10, 200).astype(np.int64))
    prev = prefix[m_prev] / m_prev
    stabilized = float(prev.min()) <= lo + tol and float(prev.max()) >= hi - tol
    band = CesaroBand(lo, hi, float(P), stabilized, (P / window_ratio, float(P)))
    passed = hi - lo < tol
    return TestOutcome(passed, 0.5 * (lo + hi) if passed else None, hi - lo, "prefix means"), band


# ---------------------------------------------------------------------------
# Tauberian derivative bound
# ---------------------------------------------------------------------------

@dataclass
class TauberianBound:
    H: Optional[float]
    min_product: float
    discrete_ok: Optional[bool]
    diagnostics: list = field(default_factory=list)


def _decade_minima(grid, vals, h, count=3):
    out, top = [], h
    while len(out) < count and top / 10 >= grid[0]:
        sel = (grid > top / 10) & (grid <= top)
        if np.any(sel):
            out.append(float(vals[sel].min()))
        top /= 10
    return out[::-1]


def tauberian_derivative_bound(g: BoundedFunction, horizon, t_min=1e-3,
                               grid_density=GRID_DENSITY) -> TauberianBound:
    """Smallest H (with 10% slack) such that t g'(t) > -H on a log grid up to ``horizon``.

    Absent when the per-decade minimum of t g' keeps growing in magnitude
    (by 2x or more over each of the last two decades).  Also checks the
    discrete shadow n (g(n) - g(n-1)) > -2H on integers sampled up to the horizon.
    """
    grid = log_grid(t_min, float(horizon), grid_density)
    prod = grid * np.asarray(g.diff(grid), dtype=np.float64)
    if not np.all(np.isfinite(prod)):
        return TauberianBound(None, float("nan"), None, ["derivative evaluation produced non-finite values"])
    m = float(prod.min())
    dmin = _decade_minima(grid, prod, float(horizon))
    if len(dmin) == 3 and dmin[2] < 0 and dmin[2] <= 2 * dmin[1] and dmin[1] <= 2 * dmin[0] < 0:
        return TauberianBound(None, m, None, [f"t g'(t) unbounded below (decade minima {dmin})"])
    H = max(TAU_SLACK * max(-m, 0.0), TAU_FLOOR)
    n = np.unique(np.concatenate([np.arange(2, 200, dtype=np.float64),
                                  np.floor(log_grid(200.0, max(float(horizon), 201.0), 16))]))
    disc = n * (np.asarray(g(n)) - np.asarray(g(n - 1.0)))
    ok = bool(np.all(disc > -2 * H))
    diags = [] if ok else [f"discrete bound n(g(n)-g(n-1)) > -2H fails at n={int(n[np.argmin(disc)])}"]
    return TauberianBound(H, m, ok, diags)


# ---------------------------------------------------------------------------
# M_k transform
# ---------------------------------------------------------------------------

def _check_k(k):
    k0 = float(np.asarray(k(np.zeros(1)))[0])
    if k0 != 0.0:
        raise DomainError(f"M_k transform needs k(0) = 0; {k.name}(0) = {k0!r}")


def m_k_transform(g: BoundedFunction, k, lam):
    """M_k(g)(lam) = (1/k(lam)) int_0^lam g(s) k'(s) ds, for k with k(0) = 0."""
    if lam <= 0:
        raise DomainError("M_k transform needs lambda > 0")
    _check_k(k)
    kl = float(k(lam))
    val, _ = integrate(lambda s: g.fn(s) * k.derivative(s), 0.0, float(lam), epsrel=1e-13)
    return val / kl


def cesaro_of_composition(g: BoundedFunction, k, lam):
    """C(g o k^{-1})(k(lam)), the substituted form of M_k(g)(lam)."""
    _check_k(k)
    kl = float(k(lam))
    val, _ = integrate(lambda v: g.fn(k.inverse(v)), 0.0, kl, epsrel=1e-13)
    return val / kl


def m_k_profile(g: BoundedFunction, k, grid):
    """M_k(g) on an increasing grid by cumulative quadrature of g k'."""
    grid = np.asarray(grid, dtype=np.float64)
    cum = cumulative_integral(lambda s: np.asarray(g.fn(s)) * np.asarray(k.derivative(s)), grid)
    return cum / np.asarray(k(grid))


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def _plain_limit_test(vals, tol):
    spread = float(vals.max() - vals.min())
    med = float(np.median(vals))
    return TestOutcome(spread < tol, med if spread < tol else None, spread, "trailing values")


def function_prefix(g: BoundedFunction, N, head=100, sub=256):
    """int_0^n g for n = 0..N: composite GL-16 on the first ``head`` unit
    intervals (robust to kinks), GL-4 beyond where g varies slowly."""
    head = min(head, N)
    parts = np.empty(N, dtype=np.float64)
    if g.primitive is not None:
        n = np.arange(0, N + 1, dtype=np.float64)
        prim = np.asarray(g.primitive(n), dtype=np.float64)
        parts[:] = np.diff(prim)
    else:
        edges = np.linspace(0.0, float(head), head * sub + 1)
        fine = panel_integrals(g.fn, edges[:-1], edges[1:], order=16)
        parts[:head] = fine.reshape(head, sub).sum(axis=1)
        if N > head:
            left = np.arange(head, N, dtype=np.float64)
            parts[head:] = panel_integrals(g.fn, left, left + 1.0, order=4)
    return kahan_cumsum(np.ascontiguousarray(parts))


def classify(obj, horizon, tol=DEFAULT_TOL, band: Optional[CesaroBand] = None,
             with_tauberian=True) -> ConvergenceVerdict:
    """Run the plain-limit, uniform-window and Cesaro tests; assign the strongest passing class.

    For a function the Cesaro test is collapse of :func:`cesaro_band`, and the
    uniform-window test runs on its integer averages E_N(g) with P capped at
    ``F_HORIZON_CAP``.  All three outcomes are kept in ``tests`` so chain
    violations surface instead of being masked.
    """
    if horizon < 1e3:
        raise DomainError("classify needs horizon >= 1e3")
    diags = []
    tau_H = None
    if isinstance(obj, BoundedSequence):
        P = int(horizon)
        prefix = kahan_cumsum(np.ascontiguousarray(obj.head(2 * P)))
        tail = np.asarray(obj(np.arange(max(P // 10, 1), P + 1, dtype=np.float64)))
        s = _plain_limit_test(tail, tol)
        f = uniform_window_test(prefix, P, tol)
        c, band_c = _prefix_cesaro_test(prefix, P, tol)
        band = band if band is not None else band_c
    else:
        h = float(horizon)
        samples = np.asarray(obj(log_grid(h / S_WINDOW_RATIO, h)), dtype=np.float64)
        s = _plain_limit_test(samples, tol)
        if band is None:
            band = cesaro_band(obj, h, tol=tol)
        c = TestOutcome(band.width < tol, 0.5 * (band.lo + band.hi) if band.width < tol else None,
                        band.width, "Cesaro band")
        P = int(min(h, F_HORIZON_CAP))
        try:
            prefix = function_prefix(obj, 2 * P)
            f = uniform_window_test(prefix, P, tol)
        except QuadratureError as exc:
            f = TestOutcome(False, None, math.inf, f"integer averages failed: {exc}")
        if with_tauberian:
            tb = tauberian_derivative_bound(obj, h)
            tau_H = tb.H
            diags += tb.diagnostics
    tests = {"S": s, "F": f, "C": c}
    if s.passed:
        cls, limit = ConvergenceClass.S, s.limit
    elif f.passed:
        cls, limit = ConvergenceClass.F, f.limit
    elif c.passed:
        cls, limit = ConvergenceClass.C, c.limit
    else:
        cls, limit = ConvergenceClass.UNDETERMINED, None
    if limit is not None and band.width >= tol:
        diags.append(f"{cls.value} but Cesaro band width {band.width:.3g} >= tol; limit withheld")
        limit = None
    verdict = ConvergenceVerdict(cls, limit, band, tau_H, diags, tests)
    if not verdict.chain_ok:
        diags.append("chain violation among test outcomes: "
                     + ", ".join(f"{k}={'pass' if v.passed else 'fail'}" for k, v in tests.items()))
    return verdict
