"""Growth classification of a reparameterization kappa against a gauge psi.

* restricted growth: psi(kappa(n)) / psi(kappa(n+1)) -> 1 (plainly: strong;
  in the uniform-window sense: F)
* dominated growth: t (psi o kappa)'(t) / (psi o kappa)(t) bounded
* exponential increase: kappa(t + C) > 2 kappa(t) for a fixed shift C

plus the large-t dichotomies of d(t) = psi(2t)/psi(t) - 1 for a single psi.
Everything is evaluated through log psi(e^l) and log kappa(t), so kappa may
run far beyond the float range.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from .convergence import DEFAULT_TOL, log_grid, uniform_window_test
from .errors import DomainError
from .kernels import kahan_cumsum
from .marcinkiewicz import KappaFunction, PsiFunction

SLACK = 1.1
LOG2 = math.log(2.0)
FIT_R2 = 0.99
GROWTH_FACTOR = 1.5


class Restricted(str, enum.Enum):
    STRONG = "pass_strong"
    F = "pass_F"
    FAIL = "fail"
    UNDETERMINED = "undetermined"


@dataclass
class RestrictedResult:
    verdict: Restricted
    horizon_n: int
    tail_spread: float
    band: tuple
    diagnostics: list = field(default_factory=list)


@dataclass
class GrowthVerdict:
    restricted: Restricted
    dominated: Optional[float]
    exponential: Optional[float]
    horizon: float
    diagnostics: list = field(default_factory=list)
    kappa: str = ""
    psi: str = ""
    #: sup of the dominated-growth product (C_dom before slack)
    dominated_sup: Optional[float] = None
    #: sup of the least doubling shift (C_exp before slack)
    exponential_shift: Optional[float] = None


def log_psi_kappa(psi: PsiFunction, kappa: KappaFunction, t):
    """log psi(kappa(t)) without forming kappa(t)."""
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return np.asarray(psi.log_at_exp(np.asarray(kappa.log_fn(t), dtype=np.float64)), dtype=np.float64)


def _finite_limit(kappa: KappaFunction, t_max, what):
    """Largest t <= t_max with log kappa finite below 1e300; a diagnostic if clamped."""
    with np.errstate(over="ignore", invalid="ignore"):
        ok = lambda t: bool(np.isfinite(kappa.log_fn(np.array([t]))[0])) and \
            abs(float(kappa.log_fn(np.array([t]))[0])) < 1e300
    if ok(t_max):
        return t_max, []
    lo, hi = 0.0, float(t_max)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    lo *= 0.99
    return lo, [f"{what}: log {kappa.name}(t) overflows past t={lo:.6g}; horizon clamped"]


def restricted_growth_check(kappa: KappaFunction, psi: PsiFunction, horizon_n=10_000,
                            tol=DEFAULT_TOL) -> RestrictedResult:
    """r_n = psi(kappa(n)) / psi(kappa(n+1)) tested for a plain and a uniform-window limit 1."""
    if horizon_n < 1000:
        raise DomainError("restricted_growth_check needs horizon_n >= 1e3")
    P_max, diags = _finite_limit(kappa, 2.0 * horizon_n + 1, "restricted growth")
    P = int(min(horizon_n, (P_max - 1) // 2))
    n = np.arange(1, 2 * P + 2, dtype=np.float64)
    lpk = log_psi_kappa(psi, kappa, n)
    r = np.exp(lpk[:-1] - lpk[1:])
    if not np.all(np.isfinite(r)):
        return RestrictedResult(Restricted.UNDETERMINED, P, math.nan, (math.nan, math.nan),
                                diags + ["non-finite ratios"])
    tail = r[P // 10 - 1:P]
    tail_spread = float(np.max(np.abs(tail - 1.0)))
    means = np.cumsum(r[:P]) / np.arange(1, P + 1)
    lo_idx = max(P // 1000, 1) - 1
    band = (float(means[lo_idx:].min()), float(means[lo_idx:].max()))
    if tail_spread < tol:
        return RestrictedResult(Restricted.STRONG, P, tail_spread, band, diags)
    if P >= 100:
        f = uniform_window_test(kahan_cumsum(np.ascontiguousarray(r[:2 * P])), P, tol)
        if f.passed and abs(f.limit - 1.0) < tol:
            diags.append(f"uniform-window evidence only, at horizon n={P}; not a proof of F-convergence")
            return RestrictedResult(Restricted.F, P, tail_spread, band, diags)
    if band[1] < 1.0 - tol or band[0] > 1.0 + tol:
        if P < horizon_n:
            diags.append(f"ratios stay away from 1 up to n={P}, but the horizon was clamped; not conclusive")
            return RestrictedResult(Restricted.UNDETERMINED, P, tail_spread, band, diags)
        return RestrictedResult(Restricted.FAIL, P, tail_spread, band, diags)
    return RestrictedResult(Restricted.UNDETERMINED, P, tail_spread, band, diags)


def dominated_product(kappa: KappaFunction, psi: PsiFunction, t):
    """t (psi o kappa)'(t) / (psi o kappa)(t) = psi-elasticity at kappa(t) times t kappa'/kappa."""
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(over="ignore", invalid="ignore"):
        return np.asarray(psi.elasticity_at_exp(kappa.log_fn(t))) * np.asarray(kappa.elasticity(t))


def _decade_stat(grid, vals, top, fn, count=3):
    out = []
    while len(out) < count and top / 10 >= grid[0] * (1 - 1e-12):
        sel = (grid > top / 10) & (grid <= top * (1 + 1e-12))
        if np.any(sel):
            out.append(float(fn(vals[sel])))
        top /= 10
    return out[::-1]


def _grows(decades):
    return (len(decades) == 3 and decades[0] > 0
            and decades[2] > GROWTH_FACTOR * decades[1] and decades[1] > GROWTH_FACTOR * decades[0])


@dataclass
class ConstantResult:
    constant: Optional[float]
    sup: float
    horizon: float
    diagnostics: list = field(default_factory=list)


def dominated_growth_check(kappa: KappaFunction, psi: PsiFunction, horizon=1e4, t_min=1e-3) -> ConstantResult:
    """C_dom = 1.1 * sup of the dominated-growth product, or absent if it keeps growing."""
    h, diags = _finite_limit(kappa, float(horizon), "dominated growth")
    grid = log_grid(t_min, h)
    prod = dominated_product(kappa, psi, grid)
    finite = np.isfinite(prod)
    if not np.all(finite):
        diags.append("derivative evaluation failed at some grid points; they were skipped")
        grid, prod = grid[finite], prod[finite]
    sup = float(prod.max())
    if _grows(_decade_stat(grid, prod, grid[-1], np.max)):
        diags.append("product grows without bound through the horizon")
        return ConstantResult(None, sup, h, diags)
    return ConstantResult(SLACK * sup, sup, h, diags)


def doubling_shift(kappa: KappaFunction, t, iters=80):
    """Least C with log kappa(t + C) - log kappa(t) >= log 2, per grid point."""
    t = np.asarray(t, dtype=np.float64)
    base = np.asarray(kappa.log_fn(t), dtype=np.float64)

    def gap(c):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.asarray(kappa.log_fn(t + c), dtype=np.float64) - base

    hi = np.ones_like(t)
    for _ in range(200):
        short = ~(gap(hi) >= LOG2)
        if not np.any(short):
            break
        hi[short] *= 2.0
    lo = np.zeros_like(t)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        ok = gap(mid) >= LOG2
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return hi


def exponential_increase_check(kappa: KappaFunction, horizon=1e4, t_min=1e-2) -> ConstantResult:
    """C_exp = 1.1 * sup_t of the least doubling shift, or absent if the shift grows with t."""
    h, diags = _finite_limit(kappa, float(horizon), "exponential increase")
    grid = log_grid(t_min, h)
    c = doubling_shift(kappa, grid)
    sup = float(c.max())
    if _grows(_decade_stat(grid, c, grid[-1], np.max)):
        diags.append("doubling shift grows with t")
        return ConstantResult(None, sup, h, diags)
    return ConstantResult(SLACK * sup, sup, h, diags)


def classify_kappa(kappa: KappaFunction, psi: PsiFunction, horizon=1e4, tol=DEFAULT_TOL) -> GrowthVerdict:
    r = restricted_growth_check(kappa, psi, max(int(horizon), 1000), tol)
    d = dominated_growth_check(kappa, psi, horizon)
    e = exponential_increase_check(kappa, horizon)
    diags = r.diagnostics + d.diagnostics + e.diagnostics
    if d.constant is not None and r.verdict == Restricted.FAIL:
        diags.append("inconsistent: dominated growth passed but restricted growth failed")
    return GrowthVerdict(r.verdict, d.constant, e.constant, float(horizon), diags, kappa.name, psi.name,
                         d.sup if d.constant is not None else None,
                         e.sup if e.constant is not None else None)


# ---------------------------------------------------------------------------
# psi dichotomies
# ---------------------------------------------------------------------------

@dataclass
class DichotomyPart:
    passed: bool
    consequence: str
    evidence: str


@dataclass
class PsiDichotomies:
    psi: str
    A: DichotomyPart
    B: DichotomyPart
    C: DichotomyPart
    fitted_C: Optional[float]
    fitted_C_band: Optional[tuple]
    r_squared: Optional[float]
    horizon: float


def dichotomy_ratio(psi: PsiFunction, t):
    """d(t) = psi(2t)/psi(t) - 1 through log psi(e^l)."""
    l = np.log(np.asarray(t, dtype=np.float64))
    return np.expm1(np.asarray(psi.log_at_exp(l + LOG2)) - np.asarray(psi.log_at_exp(l)))


def psi_dichotomies(psi: PsiFunction, horizon=1e6, tol=DEFAULT_TOL) -> PsiDichotomies:
    """Evidence for liminf d = 0 (A), lim d = 0 (B), and d = O(psi^{-1/C}) (C).

    C fits log d against log psi over the top two decades by least squares;
    the fit must reach R^2 >= 0.99 with a significantly negative slope, and
    the fitted C = -1/slope is reported with a 95% band.
    """
    if horizon < 1e6:
        raise DomainError("psi_dichotomies needs horizon >= 1e6")
    h = float(horizon)
    grid = log_grid(h / 100, h)
    d = dichotomy_ratio(psi, grid)
    lpsi = np.asarray(psi.log_at_exp(np.log(grid)))
    fitted = band = r2 = None
    c_pass = False
    fit_note = "d not positive"
    if np.all(d > 0):
        fit = stats.linregress(lpsi, np.log(d))
        r2 = float(fit.rvalue ** 2)
        slope, se = float(fit.slope), float(fit.stderr)
        q = float(stats.t.ppf(0.975, len(grid) - 2))
        s_hi = slope + q * se
        c_pass = r2 >= FIT_R2 and s_hi < 0
        if c_pass:
            fitted = -1.0 / slope
            s_lo = slope - q * se
            band = (-1.0 / s_lo, -1.0 / s_hi)
        fit_note = f"log d vs log psi slope {slope:.4g} +- {q * se:.2g}, R^2 {r2:.4f}"
    small = float(d.min()) < tol
    b_pass = c_pass or float(d.max()) < tol
    a_pass = b_pass or small
    B = DichotomyPart(b_pass, "SR_exp(psi) non-empty; beta(t) = 2^t is a witness" if b_pass else "",
                      f"max d on top decades {float(d.max()):.4g}; {fit_note}")
    if a_pass and not b_pass:
        a_cons = "R_exp(psi) non-empty: existence guaranteed, witness not constructed"
    elif a_pass:
        a_cons = "R_exp(psi) non-empty"
    else:
        a_cons = ""
    A = DichotomyPart(a_pass, a_cons, f"min d on top decades {float(d.min()):.4g}")
    C = DichotomyPart(c_pass, "D_exp(psi) non-empty" if c_pass else "", fit_note)
    return PsiDichotomies(psi.name, A, B, C, fitted, band, r2, h)
