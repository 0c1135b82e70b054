"""Concave gauges psi, reparameterizations kappa, and the weighted means

    phi(x)(t) = (1 / psi(t)) * int_0^t x*(s) ds,      phi_kappa(x)(t) = phi(x)(kappa(t)),

together with the Marcinkiewicz norm sup_t phi(x)(t) and the Riesz seminorm
limsup_t phi(x)(t).

Weighted means are evaluated on a *clock*: for a reparameterization kappa we
work with U(t) = log(1 + kappa(t)) and call ``x.primitive_exp(U)`` and
``psi.eval_expm1(U)``.  This keeps kappa = e^t (and friends) usable far past
the range where kappa(t) itself is a finite float.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import expit

from .analysis_core import _as_array, _restore
from .errors import DomainError, HorizonOverflow, NotInSpaceError

GRID_DENSITY = 64          # points per decade
RIESZ_WINDOW_RATIO = 100.0
STABILIZE_RTOL = 1e-2
STABILIZE_ATOL = 1e-4      # differences this small are noise on the tolerance scale


def _softplus(l):
    """log(1 + e^l), stable for all l."""
    return np.logaddexp(0.0, l)


@dataclass(frozen=True)
class PsiFunction:
    """A concave gauge psi in Omega_inf.

    ``log_at_exp(l) = log psi(e^l)`` and ``elasticity_at_exp(l) =
    e^l psi'(e^l) / psi(e^l)`` are the overflow-free forms used by the growth
    classifiers; ``eval_expm1(u) = psi(e^u - 1)`` is what the weighted-mean
    clock needs.
    """

    name: str
    fn: Callable
    derivative: Callable
    inverse: Callable
    eval_expm1: Callable
    log_at_exp: Callable
    elasticity_at_exp: Callable

    def __call__(self, t):
        arr, scalar = _as_array(t)
        return _restore(np.asarray(self.fn(arr), dtype=np.float64), scalar)

    def audit(self, rng=None, pairs=1000, t_small=1e-8, t_large=1e12):
        """Check the Omega_inf membership conditions on samples; returns a list of failures."""
        rng = np.random.default_rng(0) if rng is None else rng
        problems = []
        if not self(t_small) < 1e-3:
            problems.append(f"psi({t_small}) = {self(t_small)} is not small")
        # unboundedness probed far past the float range: log psi(e^l) at l = 1e6
        far = float(np.asarray(self.log_at_exp(np.array([1e6])))[0])
        if not (self(t_large) > 10.0 or far > math.log(10.0)):
            problems.append(f"psi({t_large}) = {self(t_large)} and psi(e^1e6) = e^{far:.3g} are not large")
        a = 10.0 ** rng.uniform(-6, 9, pairs)
        b = 10.0 ** rng.uniform(-6, 9, pairs)
        mid = self((a + b) / 2)
        chord = (self(a) + self(b)) / 2
        if np.any(mid < chord * (1 - 1e-12)):
            problems.append("concavity violated")
        grid = np.geomspace(1e-6, 1e9, 300)
        vals = self(grid)
        if np.any(np.diff(vals) <= 0):
            problems.append("not increasing on grid")
        back = self.inverse(vals)
        if np.any(np.abs(back - grid) > 1e-9 * grid):
            problems.append("inverse(eval(t)) != t")
        return problems


@dataclass(frozen=True)
class KappaFunction:
    """Strictly increasing, invertible, unbounded reparameterization.

    ``log_fn(t) = log kappa(t)`` and ``elasticity(t) = t kappa'(t) / kappa(t)``.
    """

    name: str
    fn: Callable
    derivative: Callable
    inverse: Callable
    log_fn: Callable
    elasticity: Callable

    def __call__(self, t):
        arr, scalar = _as_array(t)
        with np.errstate(over="ignore"):
            return _restore(np.asarray(self.fn(arr), dtype=np.float64), scalar)

    def clock(self, t):
        """U(t) = log(1 + kappa(t))."""
        arr, scalar = _as_array(t)
        with np.errstate(divide="ignore"):
            return _restore(_softplus(np.asarray(self.log_fn(arr), dtype=np.float64)), scalar)

    def audit(self, t_max=50.0):
        problems = []
        if self(0.0) != 0.0:
            problems.append(f"kappa(0) = {self(0.0)} != 0")
        grid = np.linspace(1e-3, t_max, 500)
        vals = self(grid)
        finite = np.isfinite(vals)
        if np.any(np.diff(vals[finite]) <= 0):
            problems.append("not strictly increasing")
        if np.any(self.derivative(grid[finite]) <= 0):
            problems.append("derivative not positive")
        back = self.inverse(vals[finite])
        if np.any(np.abs(back - grid[finite]) > 1e-9 * np.maximum(grid[finite], 1.0)):
            problems.append("inverse(eval(t)) != t")
        return problems


# ---------------------------------------------------------------------------
# catalogues
# ---------------------------------------------------------------------------

def psi_identity():
    return PsiFunction("identity", lambda t: np.asarray(t, dtype=np.float64) * 1.0,
                       lambda t: np.ones(np.shape(t)), lambda y: np.asarray(y, dtype=np.float64) * 1.0,
                       np.expm1, lambda l: np.asarray(l, dtype=np.float64) * 1.0,
                       lambda l: np.ones(np.shape(l)))


def psi_log1p():
    return PsiFunction(
        "log1p", np.log1p, lambda t: 1.0 / (1.0 + np.asarray(t)), np.expm1,
        lambda u: np.asarray(u, dtype=np.float64) * 1.0,
        lambda l: np.log(_softplus(l)),
        lambda l: expit(l) / _softplus(l),
    )


def psi_pow(alpha):
    a = float(alpha)
    if not 0 < a < 1:
        raise DomainError("pow(alpha) needs 0 < alpha < 1")
    return PsiFunction(
        f"pow({a!r})", lambda t: np.power(t, a), lambda t: a * np.power(t, a - 1.0),
        lambda y: np.power(y, 1.0 / a),
        lambda u: np.exp(a * (np.asarray(u) + np.log(-np.expm1(-np.asarray(u))))),
        lambda l: a * np.asarray(l, dtype=np.float64),
        lambda l: np.full(np.shape(l), a),
    )


def psi_logpow(alpha):
    """(log(1+t))^alpha.  Concave for alpha <= 1; for alpha > 1 only the large-t
    behaviour is meaningful (used by the growth dichotomies)."""
    a = float(alpha)
    return PsiFunction(
        f"logpow({a!r})", lambda t: np.power(np.log1p(t), a),
        lambda t: a * np.power(np.log1p(t), a - 1.0) / (1.0 + np.asarray(t)),
        lambda y: np.expm1(np.power(y, 1.0 / a)),
        lambda u: np.power(u, a),
        lambda l: a * np.log(_softplus(l)),
        lambda l: a * expit(l) / _softplus(l),
    )


def psi_loglog():
    def elasticity(l):
        big = _softplus(l)
        return expit(l) / ((1.0 + big) * np.log1p(big))

    return PsiFunction(
        "loglog", lambda t: np.log1p(np.log1p(t)),
        lambda t: 1.0 / ((1.0 + np.log1p(t)) * (1.0 + np.asarray(t))),
        lambda y: np.expm1(np.expm1(y)),
        np.log1p,
        lambda l: np.log(np.log1p(_softplus(l))),
        elasticity,
    )


PSI_CATALOGUE = {
    "identity": psi_identity,
    "log1p": psi_log1p,
    "pow": psi_pow,
    "logpow": psi_logpow,
    "loglog": psi_loglog,
}


def _log_expm1(t):
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(divide="ignore"):
        return t + np.log(-np.expm1(-t))


def kappa_identity():
    return KappaFunction("identity", lambda t: np.asarray(t, dtype=np.float64) * 1.0,
                         lambda t: np.ones(np.shape(t)), lambda y: np.asarray(y, dtype=np.float64) * 1.0,
                         lambda t: np.log(t), lambda t: np.ones(np.shape(t)))


def kappa_exp():
    return KappaFunction("exp", np.exp, np.exp, np.log,
                         lambda t: np.asarray(t, dtype=np.float64) * 1.0,
                         lambda t: np.asarray(t, dtype=np.float64) * 1.0)


def kappa_expm1():
    def elasticity(t):
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = t / (-np.expm1(-t))
        return np.where(t == 0, 1.0, out)

    return KappaFunction("expm1", np.expm1, np.exp, np.log1p, _log_expm1, elasticity)


def kappa_pow2t():
    ln2 = math.log(2.0)
    return KappaFunction("pow2t", lambda t: np.exp2(t), lambda t: ln2 * np.exp2(t),
                         lambda y: np.log2(y), lambda t: ln2 * np.asarray(t, dtype=np.float64),
                         lambda t: ln2 * np.asarray(t, dtype=np.float64))


def kappa_exp_square():
    return KappaFunction("exp_square", lambda t: np.exp(np.square(t)),
                         lambda t: 2 * np.asarray(t) * np.exp(np.square(t)),
                         lambda y: np.sqrt(np.log(y)), lambda t: np.square(t),
                         lambda t: 2 * np.square(t))


def _exp_quiet(t):
    with np.errstate(over="ignore"):
        return np.exp(t)


def kappa_exp_exp():
    return KappaFunction("exp_exp", lambda t: _exp_quiet(_exp_quiet(t)),
                         lambda t: _exp_quiet(t) * _exp_quiet(_exp_quiet(t)),
                         lambda y: np.log(np.log(y)), _exp_quiet,
                         lambda t: np.asarray(t) * _exp_quiet(t))


def kappa_log1p():
    return KappaFunction("log1p", np.log1p, lambda t: 1.0 / (1.0 + np.asarray(t)), np.expm1,
                         lambda t: np.log(np.log1p(t)),
                         lambda t: np.asarray(t) / ((1.0 + np.asarray(t)) * np.log1p(t)))


def kappa_psi_inverse(psi: PsiFunction):
    """kappa = psi^{-1}; psi o kappa is the identity."""
    if psi.name == "log1p":
        k = kappa_expm1()
        return KappaFunction("psi_inverse(log1p)", k.fn, k.derivative, k.inverse, k.log_fn, k.elasticity)

    def log_fn(t):
        with np.errstate(divide="ignore"):
            return np.log(psi.inverse(t))

    def elasticity(t):
        t = np.asarray(t, dtype=np.float64)
        k = psi.inverse(t)
        return t / (psi.derivative(k) * k)

    return KappaFunction(f"psi_inverse({psi.name})", psi.inverse,
                         lambda t: 1.0 / psi.derivative(psi.inverse(t)), psi.fn, log_fn, elasticity)


def kappa_perturbed(kappa: KappaFunction, amount):
    """kappa + amount * tanh(t): a bounded perturbation with the same functionals."""
    b = float(amount)

    def fn(t):
        return kappa.fn(t) + b * np.tanh(t)

    def log_fn(t):
        lk = np.asarray(kappa.log_fn(t), dtype=np.float64)
        with np.errstate(over="ignore", invalid="ignore"):
            return lk + np.log1p(b * np.tanh(t) * np.exp(-lk))

    def deriv(t):
        return kappa.derivative(t) + b / np.cosh(t) ** 2

    def inverse(y):
        from scipy.optimize import brentq
        y = np.atleast_1d(np.asarray(y, dtype=np.float64))
        def root(v):
            top = max(1.0, float(np.asarray(kappa.inverse(v)).reshape(-1)[0]) + 1.0)
            return brentq(lambda s: float(np.asarray(fn(s)).reshape(-1)[0]) - v, 0.0, top, xtol=1e-15)

        out = [root(v) if v > 0 else 0.0 for v in y]
        return np.array(out)

    def elasticity(t):
        # t (k' + b sech^2) / (k + b tanh), kept in log space for fast-growing k
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            lk = np.asarray(kappa.log_fn(t), dtype=np.float64)
            share = 1.0 / (1.0 + b * np.tanh(t) * np.exp(-lk))
            bump = t * b * np.exp(-2.0 * np.logaddexp(t, -t) + 2.0 * math.log(2.0) - log_fn(t))
            return np.asarray(kappa.elasticity(t)) * share + bump

    return KappaFunction(f"{kappa.name}+{b!r}tanh", fn, deriv, inverse, log_fn, elasticity)


KAPPA_CATALOGUE = {
    "identity": kappa_identity,
    "exp": kappa_exp,
    "expm1": kappa_expm1,
    "pow2t": kappa_pow2t,
    "exp_square": kappa_exp_square,
    "exp_exp": kappa_exp_exp,
    "log1p": kappa_log1p,
    "psi_inverse": kappa_psi_inverse,
}


def get_psi(name, param=None):
    if name not in PSI_CATALOGUE:
        raise KeyError(f"unknown psi {name!r}; known: {sorted(PSI_CATALOGUE)}")
    factory = PSI_CATALOGUE[name]
    return factory(param) if name in ("pow", "logpow") else factory()


def get_kappa(name, psi=None):
    if name not in KAPPA_CATALOGUE:
        raise KeyError(f"unknown kappa {name!r}; known: {sorted(KAPPA_CATALOGUE)}")
    if name == "psi_inverse":
        return kappa_psi_inverse(psi if psi is not None else psi_log1p())
    return KAPPA_CATALOGUE[name]()


# ---------------------------------------------------------------------------
# weighted means
# ---------------------------------------------------------------------------

def weighted_mean(x, psi: PsiFunction, t):
    """phi(x)(t) = (1/psi(t)) int_0^t x*; exact prefix sums for sequences."""
    arr, scalar = _as_array(t)
    if np.any(arr <= 0):
        raise DomainError("weighted mean needs t > 0 (psi(0) = 0)")
    return _restore(np.asarray(x.primitive(arr)) / np.asarray(psi.fn(arr)), scalar)


def weighted_mean_on_clock(x, psi: PsiFunction, kappa: Optional[KappaFunction], t):
    """phi_kappa(x)(t); ``kappa=None`` is the identity clock."""
    arr, scalar = _as_array(t)
    if kappa is None:
        return weighted_mean(x, psi, arr if not scalar else float(arr))
    u = np.asarray(kappa.clock(arr), dtype=np.float64)
    if np.any(u <= 0):
        raise DomainError("weighted mean needs kappa(t) > 0")
    vals = np.asarray(x.primitive_exp(u)) / np.asarray(psi.eval_expm1(u))
    return _restore(vals, scalar)


def clamp_horizon(x, kappa: Optional[KappaFunction], horizon):
    """Largest admissible horizon <= ``horizon`` on the kappa clock.

    Returns ``(horizon_used, diagnostics)``.
    """
    limit = x.max_log_horizon
    clock = (lambda t: math.log1p(t)) if kappa is None else (lambda t: float(kappa.clock(t)))
    if clock(horizon) <= limit:
        return float(horizon), []
    lo, hi = 0.0, float(horizon)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if clock(mid) <= limit:
            lo = mid
        else:
            hi = mid
    return lo, [f"horizon clamped from {horizon:g} to {lo:.6g}: {x.label} not evaluable past "
                f"log(1+kappa) = {limit:.6g}"]


def log_grid(lo, hi, density=GRID_DENSITY):
    decades = max(math.log10(hi / lo), 1e-9)
    return np.geomspace(lo, hi, max(int(math.ceil(decades * density)) + 1, 2))


@dataclass
class NormResult:
    value: float
    attained_at: float
    tail_flag: str          # "increasing" | "decreasing" | "flat"
    horizon: float
    diagnostics: list = field(default_factory=list)


def _golden_max(f, a, b, iters=80):
    g = (math.sqrt(5.0) - 1.0) / 2.0
    x1, x2 = b - g * (b - a), a + g * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - g * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + g * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def marcinkiewicz_norm(x, psi: PsiFunction, horizon, kappa=None, grid_density=GRID_DENSITY,
                       t_min=1e-6) -> NormResult:
    """sup_{0 < t <= horizon} phi_kappa(x)(t) (= ||x||_{M(psi)} as horizon -> inf).

    Log-spaced grid refined by golden-section search around the grid maximum.
    Raises ``NotInSpaceError`` when phi keeps growing by more than 50% per
    decade over the last two decades.
    """
    if horizon < 1e3:
        raise DomainError("marcinkiewicz_norm needs horizon >= 1e3")
    h, diags = clamp_horizon(x, kappa, horizon)
    grid = log_grid(t_min, h, grid_density)
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.asarray(weighted_mean_on_clock(x, psi, kappa, grid), dtype=np.float64)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NotInSpaceError(f"{x.label}: weighted mean overflows at t={grid[i]:.6g}", witness=float(grid[i]))
    decade_max = _decade_maxima(grid, vals, h)
    if len(decade_max) >= 3 and decade_max[-1] > 1.5 * decade_max[-2] > 2.25 * decade_max[-3] > 0:
        raise NotInSpaceError(f"{x.label}: weighted mean grows without bound (phi({h:g}) = {vals[-1]:.6g})",
                              witness=float(h))
    i = int(np.argmax(vals))
    best_t, best = float(grid[i]), float(vals[i])
    if 0 < i < len(grid) - 1:
        t_ref, v_ref = _golden_max(lambda s: float(weighted_mean_on_clock(x, psi, kappa, s)),
                                   float(grid[i - 1]), float(grid[i + 1]))
        if v_ref > best:
            best_t, best = t_ref, v_ref
    if vals[-1] > vals[-2] * (1 + 1e-12):
        flag = "increasing"
        diags.append("phi increasing at horizon; sup may lie beyond it")
    elif vals[-1] < vals[-2] * (1 - 1e-12):
        flag = "decreasing"
    else:
        flag = "flat"
    return NormResult(best, best_t, flag, h, diags)


def _decade_maxima(grid, vals, h):
    out = []
    top = h
    while top / 10 >= grid[0] and len(out) < 4:
        sel = (grid > top / 10) & (grid <= top)
        if np.any(sel):
            out.append(float(np.max(vals[sel])))
        top /= 10
    return out[::-1]


@dataclass
class RieszResult:
    estimate: float
    band: tuple
    horizon_used: float
    stabilized: bool
    diagnostics: list = field(default_factory=list)


def riesz_seminorm(x, psi: PsiFunction, horizon, kappa=None, window_ratio=RIESZ_WINDOW_RATIO,
                   grid_density=GRID_DENSITY, norm: Optional[NormResult] = None) -> RieszResult:
    """rho_1(x) = limsup phi(x)(t), estimated on the trailing window
    [horizon/window_ratio, horizon] of the kappa clock.

    ``band`` runs from the window maximum to the overall sup up to the
    horizon.  ``stabilized`` requires the maxima over the last two decade
    windows to agree within 1% relative.
    """
    h, diags = clamp_horizon(x, kappa, horizon)
    if norm is None:
        norm = marcinkiewicz_norm(x, psi, max(h, 1e3), kappa, grid_density)
    grid = log_grid(h / window_ratio, h, grid_density)
    vals = np.asarray(weighted_mean_on_clock(x, psi, kappa, grid), dtype=np.float64)
    i = int(np.argmax(vals))
    est = float(vals[i])
    if 0 < i < len(grid) - 1:
        _, v_ref = _golden_max(lambda s: float(weighted_mean_on_clock(x, psi, kappa, s)),
                               float(grid[i - 1]), float(grid[i + 1]), iters=60)
        est = max(est, v_ref)
    last = vals[grid >= h / 10]
    prev = vals[(grid >= h / 100) & (grid <= h / 10)]
    m1 = float(np.max(last))
    m2 = float(np.max(prev)) if prev.size else m1
    stabilized = abs(m1 - m2) <= max(STABILIZE_RTOL * max(abs(m1), abs(m2)), STABILIZE_ATOL)
    if not stabilized:
        diags.append(f"decade-window maxima disagree ({m2:.6g} vs {m1:.6g}); oscillation may exceed "
                     f"the window, band widened to the overall sup")
    hi = max(norm.value, est)
    return RieszResult(est, (est, hi), h, stabilized, diags + norm.diagnostics)


@dataclass
class WeightedMeanProfile:
    source: str
    psi: str
    kappa: Optional[str]
    samples: list
    horizon: float
    diagnostics: list = field(default_factory=list)

    def as_arrays(self):
        arr = np.asarray(self.samples, dtype=np.float64).reshape(-1, 2)
        return arr[:, 0], arr[:, 1]


def kappa_weighted_mean_profile(x, psi: PsiFunction, kappa: Optional[KappaFunction], horizon,
                                grid_density=GRID_DENSITY, t_min=1e-3) -> WeightedMeanProfile:
    """Samples of phi_kappa(x) on a log grid up to ``horizon``."""
    h, diags = clamp_horizon(x, kappa, horizon)
    if kappa is not None and not np.isfinite(kappa(h)):
        diags.append(f"kappa({h:g}) overflows the float range; evaluated through log(1+kappa)")
    grid = log_grid(min(t_min, h / 10), h, grid_density)
    vals = np.asarray(weighted_mean_on_clock(x, psi, kappa, grid), dtype=np.float64)
    return WeightedMeanProfile(x.label, psi.name, None if kappa is None else kappa.name,
                               [(float(a), float(b)) for a, b in zip(grid, vals)], h, diags)


def phi_derivative_bounds(x, psi: PsiFunction, t, norm_value):
    """The two-sided bound -||x|| psi'/psi <= phi' <= ||x||/t at ``t``."""
    t = np.asarray(t, dtype=np.float64)
    return -norm_value * psi.derivative(t) / psi.fn(t), norm_value / t
