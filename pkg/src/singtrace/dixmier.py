"""Trace-level analysis for psi = log(1+t).

The trace pipeline works with phi_exp(u) = phi(x)(e^u - 1), the weighted mean
read on the kappa(t) = e^t - 1 clock, where the log-scale behaviour of phi
becomes ordinary behaviour at infinity.  ``horizon`` always refers to that
clock: u runs up to ``horizon``, so t reaches e^horizon - 1.

* measurable (plain limit of phi exists) -> ``trace_value``
* otherwise the Cesaro band of phi_exp is an inner estimate of the attainable
  trace values, bracketed above by rho_1 and below by rho_1 / (e H).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .analysis_core import BoundedFunction, Smoothness
from .convergence import (DEFAULT_TOL, CesaroBand, ConvergenceClass, ConvergenceVerdict, cesaro_band,
                          classify, tauberian_derivative_bound)
from .errors import DomainError, TailBoundError
from .kappa_growth import dominated_growth_check
from .marcinkiewicz import (kappa_expm1, marcinkiewicz_norm, psi_log1p, riesz_seminorm,
                            weighted_mean_on_clock)

DEFAULT_HORIZON = 1e7
ZETA_LADDER = (1.4, 1.3, 1.2, 1.1, 1.05)
EPS_LADDER = (0.02, 0.01, 0.005, 0.0025)
EXTRAPOLATION_DECADES = 3

PSI = psi_log1p()
KAPPA = kappa_expm1()


@dataclass
class Estimate:
    value: float
    band: tuple
    rungs: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)


@dataclass
class TraceReport:
    input_id: str
    measurable: ConvergenceVerdict
    tauberian: ConvergenceVerdict
    trace_value: Optional[float]
    trace_value_extrapolated: Optional[float]
    trace_band: CesaroBand
    riesz: float
    riesz_band: tuple
    norm: float
    lower_bound: Optional[float]
    H_theorem: float
    H_tauberian: Optional[float]
    zeta_residue: Optional[Estimate]
    heat_kernel: Optional[Estimate]
    consistency: dict
    horizon: float
    diagnostics: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    riesz_stabilized: bool = True


def phi_exp(x, norm_value=None) -> BoundedFunction:
    """u -> phi(x)(e^u - 1) with psi = log(1+t), as a bounded function (value s_1 at u = 0)."""
    if norm_value is None:
        norm_value = marcinkiewicz_norm(x, PSI, DEFAULT_HORIZON, KAPPA).value
    s1 = float(x.bound)

    def fn(u):
        u = np.asarray(u, dtype=np.float64)
        out = np.full(u.shape, s1)
        pos = u > 0
        if np.any(pos):
            out[pos] = weighted_mean_on_clock(x, PSI, KAPPA, u[pos])
        return out

    bound = max(norm_value, s1) * (1 + 1e-6) + 1e-300
    return BoundedFunction(fn, bound, Smoothness.PIECEWISE_DIFFERENTIABLE, label=f"phi_exp({x.label})")


def theorem_constant(horizon=1e4):
    """H = max(1, C_dom) for (log1p, expm1): the dominated-growth constant scaled
    into the dimensionless lower-bound constant c = 1/(e H)."""
    d = dominated_growth_check(KAPPA, PSI, horizon)
    return max(1.0, d.constant if d.constant is not None else math.inf)


def _richardson_tail(g, h, decades=EXTRAPOLATION_DECADES):
    """Fit phi_exp(u) = A + B/u + C/u^2 through u = h, h/10, h/100; returns A."""
    u = h / 10.0 ** np.arange(decades)
    vals = np.asarray(g(u), dtype=np.float64)
    V = np.vander(1.0 / u, decades, increasing=True)
    return float(np.linalg.solve(V, vals)[0])


def trace_band_bounds(x, horizon=DEFAULT_HORIZON, tol=DEFAULT_TOL):
    """(band, riesz_upper, lower) where lower = rho_1/(e H) when a Tauberian bound is certified."""
    norm = marcinkiewicz_norm(x, PSI, max(horizon, 1e3), KAPPA)
    h = norm.horizon
    g = phi_exp(x, norm.value)
    band = cesaro_band(g, h, tol=tol)
    riesz = riesz_seminorm(x, PSI, h, KAPPA, norm=norm)
    tb = tauberian_derivative_bound(g, h)
    diags = list(band.diagnostics)
    lower = None
    if tb.H is None:
        diags.append("no Tauberian constant for phi_exp; lower bound absent")
    else:
        lower = riesz.estimate / (math.e * theorem_constant())
    return band, riesz.estimate, lower, diags


def trace_analyze(x, horizon=DEFAULT_HORIZON, tol=DEFAULT_TOL, cross_checks=True,
                  zeta_ladder=ZETA_LADDER, eps_ladder=EPS_LADDER) -> TraceReport:
    """Measurability verdict, trace value or band, rho_1, and the zeta / heat-kernel cross-checks."""
    norm = marcinkiewicz_norm(x, PSI, max(horizon, 1e3), KAPPA)
    h = norm.horizon
    diags = list(norm.diagnostics)
    g = phi_exp(x, norm.value)
    band = cesaro_band(g, h, tol=tol)
    verdict = classify(g, h, tol, band=band)
    riesz = riesz_seminorm(x, PSI, h, KAPPA, norm=norm)
    diags += riesz.diagnostics[len(norm.diagnostics):]
    s = verdict.tests["S"]
    tauberian = ConvergenceVerdict(ConvergenceClass.S if s.passed else ConvergenceClass.UNDETERMINED,
                                   s.limit, band, verdict.tauberian_H, [s.detail], {"S": s})
    measurable = verdict.cls != ConvergenceClass.UNDETERMINED and band.width < tol
    trace_value = extrapolated = None
    if measurable:
        trace_value = s.limit if s.passed else 0.5 * (band.lo + band.hi)
        if s.passed:
            trace_value = float(g(h))
            extrapolated = _richardson_tail(g, h)
    H_thm = theorem_constant()
    c = 1.0 / (math.e * H_thm)
    lower = c * riesz.estimate if verdict.tauberian_H is not None else None
    consistency = {
        "upper_gap": riesz.estimate + tol - band.hi,
        "band_in_range": float(band.lo >= -tol and band.hi <= riesz.estimate * (1 + tol) + tol),
    }
    if lower is not None:
        consistency["lower_gap"] = band.hi - (lower - tol)
    if verdict.tauberian_H is not None:
        consistency["tauberian_within_dominated"] = H_thm * norm.value - verdict.tauberian_H
    if trace_value is not None:
        consistency["trace_in_band"] = float(band.contains(trace_value, tol))
    zeta = heat = None
    if cross_checks:
        try:
            zeta = zeta_residue(x, zeta_ladder)
        except TailBoundError as exc:
            diags.append(f"zeta residue unavailable: {exc}")
        try:
            heat = heat_kernel_estimate(x, eps_ladder)
        except TailBoundError as exc:
            diags.append(f"heat-kernel estimate unavailable: {exc}")
        if zeta is not None:
            diags += zeta.diagnostics
        if heat is not None:
            diags += heat.diagnostics
        if trace_value is not None:
            ref = extrapolated if extrapolated is not None else trace_value
            if zeta is not None:
                consistency["zeta_delta"] = abs(zeta.value - ref)
            if heat is not None:
                consistency["heat_delta"] = abs(heat.value - ref)
    return TraceReport(
        input_id=x.label, measurable=verdict, tauberian=tauberian, trace_value=trace_value,
        trace_value_extrapolated=extrapolated, trace_band=band, riesz=riesz.estimate,
        riesz_band=riesz.band, norm=norm.value, lower_bound=lower, H_theorem=H_thm,
        H_tauberian=verdict.tauberian_H, zeta_residue=zeta, heat_kernel=heat,
        consistency=consistency, horizon=h, diagnostics=diags + verdict.diagnostics,
        riesz_stabilized=riesz.stabilized,
        metadata={
            "psi": PSI.name, "kappa": KAPPA.name, "horizon_clock": "u = log(1+t)",
            "dixmier_vs_connes_dixmier": "both read from the Cesaro band of phi_exp; "
                                         "Connes-Dixmier values form a subset of Dixmier values",
        },
    )


def _extrapolate(xs, ys):
    """Quadratic Richardson through consecutive triples; value from the last, band over all."""
    xs, ys = np.asarray(xs, dtype=np.float64), np.asarray(ys, dtype=np.float64)
    ests = []
    for i in range(len(xs) - 2):
        V = np.vander(xs[i:i + 3], 3, increasing=True)
        ests.append(float(np.linalg.solve(V, ys[i:i + 3])[0]))
    return ests[-1], ests


def _geometric_extrapolate(xs, ys):
    """Aitken-type limit for a halving ladder: y ~ L + c x^p with p fitted per triple.

    Handles the fractional rates of power-law data (p = 1 - 1/alpha for the
    heat reading), where polynomial extrapolation in x stalls.  Triples whose
    differences change sign or shrink by less than 10% fall back to Richardson.
    """
    xs, ys = np.asarray(xs, dtype=np.float64), np.asarray(ys, dtype=np.float64)
    ests = []
    for i in range(len(xs) - 2):
        d1, d2 = ys[i] - ys[i + 1], ys[i + 1] - ys[i + 2]
        if d1 * d2 > 0 and abs(d1) > 1.1 * abs(d2):
            ests.append(float(ys[i + 2] - d2 / (d1 / d2 - 1.0)))
        else:
            V = np.vander(xs[i:i + 3], 3, increasing=True)
            ests.append(float(np.linalg.solve(V, ys[i:i + 3])[0]))
    return ests[-1], ests


def zeta_residue(x, s_ladder=ZETA_LADDER) -> Optional[Estimate]:
    """lim_{s -> 1+} (s - 1) sum_n s_n^s, extrapolated in (s - 1) from certified rungs."""
    s_ladder = [float(s) for s in s_ladder]
    if any(s <= 1 for s in s_ladder) or any(b >= a for a, b in zip(s_ladder, s_ladder[1:])):
        raise DomainError("s_ladder must be strictly decreasing and > 1")
    xs, ys, errs, diags = [], [], [], []
    for s in s_ladder:
        try:
            v, e = x.power_integral(s)
        except TailBoundError as exc:
            diags.append(f"rung s={s} dropped: {exc}")
            continue
        xs.append(s - 1.0)
        ys.append((s - 1.0) * v)
        errs.append((s - 1.0) * e)
    if len(xs) < 3:
        if diags:
            raise TailBoundError("; ".join(diags))
        return None
    value, ests = _extrapolate(xs, ys)
    slack = 4 * max(errs)
    band = (min(ests) - slack, max(ests) + slack)
    return Estimate(value, band, [(s + 1.0, y) for s, y in zip(xs, ys)], diags)


def heat_kernel_estimate(x, eps_ladder=EPS_LADDER) -> Optional[Estimate]:
    """lim_{eps -> 0+} (2/sqrt(pi)) eps sum_n exp(-(eps/s_n)^2), extrapolated in eps.

    The exponent is read as (eps/s_n)^2, the reading under which s_n = 1/n
    gives 1.  The literal (eps s_n)^-2 reading is evaluated alongside and a
    diagnostic is attached when it degenerates.
    """
    eps_ladder = [float(e) for e in eps_ladder]
    if any(e <= 0 for e in eps_ladder) or any(b >= a for a, b in zip(eps_ladder, eps_ladder[1:])):
        raise DomainError("eps_ladder must be strictly decreasing and > 0")
    k = 2.0 / math.sqrt(math.pi)
    ys, errs = [], []
    for e in eps_ladder:
        v, err = x.heat_integral(e, "gaussian")
        ys.append(k * e * v)
        errs.append(k * e * err)
    diags = []
    try:
        printed = [k * e * x.heat_integral(e, "printed")[0] for e in eps_ladder]
        if all(abs(p) < 1e-12 for p in printed) and any(abs(y) > 1e-12 for y in ys):
            diags.append("the (eps s_n)^-2 exponent reading degenerates to 0 on this ladder; "
                         "the (eps/s_n)^2 reading is used")
        elif not all(math.isfinite(p) for p in printed):
            diags.append("the (eps s_n)^-2 exponent reading diverges; the (eps/s_n)^2 reading is used")
    except TailBoundError:
        diags.append("the (eps s_n)^-2 exponent reading could not be evaluated")
    if len(ys) < 3:
        return None
    ratios = np.asarray(eps_ladder[:-1]) / np.asarray(eps_ladder[1:])
    geometric = np.allclose(ratios, ratios[0], rtol=1e-12)
    value, ests = (_geometric_extrapolate if geometric else _extrapolate)(eps_ladder, ys)
    slack = 4 * max(errs)
    band = (min(ests) - slack, max(ests) + slack)
    return Estimate(value, band, list(zip(eps_ladder, ys)), diags)


def norming_identity_check(x, horizon=DEFAULT_HORIZON, tol=DEFAULT_TOL):
    """rho_1 against the top of the trace band, both ways."""
    band, riesz, lower, diags = trace_band_bounds(x, horizon, tol)
    H = theorem_constant()
    return {
        "riesz": riesz,
        "sup_band_hi": band.hi,
        "delta": riesz - band.hi,
        "upper_ok": riesz - band.hi >= -tol,
        "lower_bound": riesz / (math.e * H),
        "lower_ok": band.hi >= riesz / (math.e * H) - tol,
        "diagnostics": diags,
    }
