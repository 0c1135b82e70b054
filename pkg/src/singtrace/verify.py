"""Seeded property corpus behind ``singtrace verify``.

Every check draws from its own generator, seeded by ``(seed, check index)``,
so results do not depend on scheduling.  Trace reports for the corpus run in
a thread pool whose size is capped by ``SINGTRACE_THREADS``; ``map`` keeps the
output order fixed.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import probes
from .analysis_core import (BoundedSequence, integer_averages, piecewise_linear_extension,
                            restrict_to_integers)
from .convergence import (DEFAULT_TOL, classify, cesaro_of_composition, log_grid, m_k_transform,
                          tauberian_derivative_bound)
from .dixmier import KAPPA, PSI, phi_exp, trace_analyze
from .errors import SingtraceError
from .families import build_family, finite_rank, harmonic, log_oscillator, power
from .io import ReportEnvelope, dumps, to_jsonable
from .kappa_growth import (Restricted, classify_kappa, log_psi_kappa, psi_dichotomies,
                           restricted_growth_check, exponential_increase_check)
from .marcinkiewicz import (KAPPA_CATALOGUE, PSI_CATALOGUE, get_kappa, get_psi, kappa_perturbed,
                            kappa_pow2t, marcinkiewicz_norm, phi_derivative_bounds, psi_log1p,
                            riesz_seminorm, weighted_mean, weighted_mean_on_clock)
from .singular_values import (DirectSumData, ScaledData, SumData, decreasing_rearrangement,
                              distribution_measure)

CORPUS_HORIZON = 1e7
STRUCTURAL_CASES = 10_000
FUNCTION_CASES = 1_000
FUNCTION_HORIZON = 1e7
M_K_CASES = 1_000
M_K_RTOL = 1e-9
SLACK = 1e-12
MAX_EXAMPLES = 3


def thread_cap(requested=None):
    """Worker count: ``requested`` (default: CPU count) capped by SINGTRACE_THREADS."""
    n = requested or os.cpu_count() or 1
    env = os.environ.get("SINGTRACE_THREADS")
    if env:
        try:
            n = min(n, max(int(env), 1))
        except ValueError:
            pass
    return max(int(n), 1)


@dataclass
class CheckResult:
    name: str
    module: str
    cases: int = 0
    violations: int = 0
    max_error: Optional[float] = None
    examples: list = field(default_factory=list)

    def case(self, ok, error=None, example=None):
        self.cases += 1
        if error is not None and math.isfinite(error):
            self.max_error = error if self.max_error is None else max(self.max_error, error)
        if not ok:
            self.violations += 1
            if len(self.examples) < MAX_EXAMPLES and example is not None:
                self.examples.append(example() if callable(example) else str(example))
        return ok


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


# ---------------------------------------------------------------------------
# analysis_core
# ---------------------------------------------------------------------------

def _random_alpha(rng, m=None):
    m = int(rng.integers(1, 30)) if m is None else m
    vals = rng.normal(size=m) * rng.uniform(0.1, 10.0)
    return vals, BoundedSequence.from_array(vals)


def check_isometry(rng, cases=STRUCTURAL_CASES):
    res = CheckResult("p_isometry", "analysis_core")
    for _ in range(cases):
        vals, alpha = _random_alpha(rng)
        m = vals.size
        p = piecewise_linear_extension(alpha)
        sup = float(np.max(np.abs(vals)))
        at_nodes = float(np.max(np.abs(p(np.arange(0, m + 3, dtype=np.float64)))))
        between = float(np.max(np.abs(p(rng.uniform(0, m + 3, 32)))))
        res.case(at_nodes == sup and between <= sup * (1 + SLACK), abs(at_nodes - sup),
                 lambda: f"m={m}: sup p = {at_nodes!r}, sup alpha = {sup!r}")
    return res


def check_translation(rng, cases=STRUCTURAL_CASES):
    """p(T_k a)(t) = p(a)(t+k) for t >= 1 (a_0 := 0 makes [0, 1) differ),
    E(T_{a+k} g) = T_k E(T_a g), and r(T_k g) = T_k r(g)."""
    res = CheckResult("translation_compatibility", "analysis_core")
    fams = [lambda: probes.sin_log(rng.uniform(-2, 2), rng.uniform(0.2, 3)),
            lambda: probes.sin(rng.uniform(-2, 2), rng.uniform(0.2, 5)),
            lambda: probes.decay(rng.uniform(-2, 2)),
            lambda: probes.zigzag(rng.uniform(-2, 2))]
    for i in range(cases):
        vals, alpha = _random_alpha(rng)
        k = int(rng.integers(0, 12))
        t = rng.uniform(1.0, vals.size + 4.0, 8)
        lhs = piecewise_linear_extension(alpha.shift(k))(t)
        rhs = piecewise_linear_extension(alpha)(t + k)
        err_p = float(np.max(np.abs(lhs - rhs)))
        g = fams[i % len(fams)]()
        a = float(rng.uniform(0, 1))
        n = np.arange(1, 9, dtype=np.float64)
        e1 = integer_averages(g.shift(a + k))(n)
        e2 = integer_averages(g.shift(a)).shift(k)(n)
        err_e = float(np.max(np.abs(e1 - e2)))
        r1 = restrict_to_integers(g.shift(k))(n)
        r2 = restrict_to_integers(g).shift(k)(n)
        err_r = float(np.max(np.abs(r1 - r2)))
        scale = max(alpha.declared_bound, g.declared_bound, 1.0)
        err = max(err_p, err_e, err_r) / scale
        res.case(err <= SLACK, err, lambda: f"k={k}, a={a!r}, {g.label}: errors p {err_p!r}, "
                                            f"E {err_e!r}, r {err_r!r}")
    return res


def check_section_retraction(rng, cases=STRUCTURAL_CASES):
    res = CheckResult("section_retraction", "analysis_core")
    for _ in range(cases):
        vals, alpha = _random_alpha(rng)
        n = np.arange(1, vals.size + 6, dtype=np.float64)
        back = restrict_to_integers(piecewise_linear_extension(alpha))(n)
        ok = bool(np.array_equal(back, alpha(n)))
        res.case(ok, float(np.max(np.abs(back - alpha(n)))), lambda: f"values {vals[:4].tolist()}")
    return res


def check_linearity(rng, cases=STRUCTURAL_CASES):
    """Linearity of p, r and E on random pairs and positivity on non-negative inputs."""
    res = CheckResult("linearity_positivity", "analysis_core")
    for i in range(cases):
        m = int(rng.integers(1, 30))
        va, a = _random_alpha(rng, m)
        vb, b = _random_alpha(rng, m)
        t = rng.uniform(0, m + 3, 16)
        pa, pb = piecewise_linear_extension(a), piecewise_linear_extension(b)
        err_p = float(np.max(np.abs(piecewise_linear_extension(a + b)(t) - (pa(t) + pb(t)))))
        g = probes.sin_log(rng.uniform(-2, 2), rng.uniform(0.2, 3))
        h = probes.zigzag(rng.uniform(-2, 2)) if i % 2 else probes.sin(rng.uniform(-2, 2), rng.uniform(0.2, 5))
        n = np.arange(1, 9, dtype=np.float64)
        gh = probes.combine([g, h])
        err_r = float(np.max(np.abs(restrict_to_integers(gh)(n) - restrict_to_integers(g)(n)
                                    - restrict_to_integers(h)(n))))
        err_e = float(np.max(np.abs(integer_averages(gh)(n) - integer_averages(g)(n)
                                    - integer_averages(h)(n))))
        pos = BoundedSequence.from_array(np.abs(va))
        f_pos = probes.combine([probes.const(2.0), probes.sin(1.0, rng.uniform(0.2, 5))])
        positive = (np.all(piecewise_linear_extension(pos)(t) >= 0)
                    and np.all(restrict_to_integers(f_pos)(n) >= 0)
                    and np.all(integer_averages(f_pos)(n) >= 0))
        scale = max(a.declared_bound + b.declared_bound, gh.declared_bound, 1.0)
        err = max(err_p, err_r, err_e) / scale
        res.case(err <= SLACK and bool(positive), err,
                 lambda: f"m={m}: errors p {err_p!r}, r {err_r!r}, E {err_e!r}, positive {bool(positive)}")
    return res


def _random_pieces(rng, count=None):
    count = int(rng.integers(1, 8)) if count is None else count
    vals = np.round(rng.uniform(0.0, 3.0, count), 3)
    meas = np.round(rng.uniform(0.05, 2.0, count), 3)
    return [(float(v), float(m)) for v, m in zip(vals, meas)]


def check_rearrangement(rng, cases=1000):
    res = CheckResult("rearrangement", "analysis_core")
    for _ in range(cases):
        pieces = _random_pieces(rng)
        x = decreasing_rearrangement(pieces)
        again = decreasing_rearrangement(x.pieces)
        idem = again.pieces == x.pieces
        s = rng.uniform(-0.5, 3.5, 100)
        brute = np.array([sum(m for v, m in pieces if v > si) for si in s])
        got = np.array([distribution_measure(x.pieces, si) for si in s])
        err = float(np.max(np.abs(brute - got)))
        res.case(idem and err <= SLACK * max(1.0, float(brute.max())), err,
                 lambda: f"pieces {pieces}: idempotent {idem}, measure error {err!r}")
    return res


# ---------------------------------------------------------------------------
# marcinkiewicz
# ---------------------------------------------------------------------------

def _random_data(rng):
    kind = int(rng.integers(0, 5))
    lam = float(rng.uniform(0.3, 3.0))
    if kind == 0:
        return ScaledData(harmonic(), lam)
    if kind == 1:
        return ScaledData(power(float(rng.uniform(1.2, 3.0))), lam)
    if kind == 2:
        return ScaledData(finite_rank(int(rng.integers(1, 20))), lam)
    if kind == 3:
        return ScaledData(log_oscillator(float(rng.uniform(0.0, 0.6))), lam)
    return decreasing_rearrangement(_random_pieces(rng))


def check_clock_inequality(rng, cases=60, horizon=1e4):
    """-||x|| log(psi(k2)/psi(k1)) <= phi_{k2} - phi_{k1} <= ||x|| log(k2/k1) for k1 <= k2."""
    res = CheckResult("clock_change_inequality", "marcinkiewicz")
    psi = psi_log1p()
    bases = ["exp", "expm1", "pow2t", "identity"]
    for i in range(cases):
        x = _random_data(rng)
        name = bases[i % len(bases)]
        if name == "expm1" and i % 8 == 1:
            k1, k2 = get_kappa("expm1"), get_kappa("exp")
        else:
            k1 = get_kappa(name)
            k2 = kappa_perturbed(k1, float(rng.uniform(0.05, 1.0)))
        norm = marcinkiewicz_norm(x, psi, 1e12).value
        t = np.sort(rng.uniform(0.05, math.log(horizon), 64))
        kk1, kk2 = np.asarray(k1(t)), np.asarray(k2(t))
        diff = np.asarray(weighted_mean(x, psi, kk2)) - np.asarray(weighted_mean(x, psi, kk1))
        upper = norm * np.log(kk2 / kk1)
        lower = -norm * np.log(np.asarray(psi(kk2)) / np.asarray(psi(kk1)))
        slack = 1e-9 * max(norm, 1.0)
        over = float(max(np.max(diff - upper), np.max(lower - diff)))
        res.case(over <= slack, max(over, 0.0), lambda: f"{x.label}, {k1.name} -> {k2.name}: excess {over!r}")
    return res


def check_derivative_bounds(rng, cases=60):
    res = CheckResult("weighted_mean_derivative_bounds", "marcinkiewicz")
    psi = psi_log1p()
    for _ in range(cases):
        x = _random_data(rng)
        norm = marcinkiewicz_norm(x, psi, 1e12).value
        t = np.exp(rng.uniform(math.log(0.05), math.log(1e8), 32))
        h = 1e-6 * t
        fd = (np.asarray(weighted_mean(x, psi, t + h)) - np.asarray(weighted_mean(x, psi, t - h))) / (2 * h)
        lo, hi = phi_derivative_bounds(x, psi, t, norm)
        scale = 1e-5 * np.maximum(np.abs(hi), np.abs(fd))
        over = float(max(np.max((fd - hi) / scale), np.max((lo - fd) / scale)))
        bad = over > 1.0
        res.case(not bad, None, lambda: f"{x.label}: finite difference outside the bounds")
    return res


def check_norm_monotonicity(rng, cases=60, horizon=1e4):
    """Dominated primitives give dominated phi samples."""
    res = CheckResult("norm_monotonicity", "marcinkiewicz")
    psi = psi_log1p()
    for _ in range(cases):
        x = _random_data(rng)
        extra = _random_data(rng)
        y = SumData(x, extra) if rng.random() < 0.5 else ScaledData(x, float(rng.uniform(1.0, 2.0)))
        grid = log_grid(1e-3, horizon)
        px, py = np.asarray(x.primitive(grid)), np.asarray(y.primitive(grid))
        if not np.all(px <= py):
            continue
        fx, fy = np.asarray(weighted_mean(x, psi, grid)), np.asarray(weighted_mean(y, psi, grid))
        over = float(np.max(fx - fy))
        res.case(over <= 0.0, max(over, 0.0), lambda: f"{x.label} vs {y.label}: excess {over!r}")
    return res


def check_riesz_below_norm(rng, cases=40, horizon=1e6):
    res = CheckResult("riesz_below_norm", "marcinkiewicz")
    for _ in range(cases):
        x = _random_data(rng)
        kappa = KAPPA if rng.random() < 0.5 else None
        norm = marcinkiewicz_norm(x, PSI, horizon, kappa)
        rho = riesz_seminorm(x, PSI, horizon, kappa, norm=norm).estimate
        res.case(rho <= norm.value * (1 + SLACK), rho - norm.value,
                 lambda: f"{x.label}: rho_1 {rho!r} > norm {norm.value!r}")
    return res


def check_homogeneity(rng, cases=40, horizon=1e6):
    res = CheckResult("homogeneity", "marcinkiewicz")
    for _ in range(cases):
        x = _random_data(rng)
        lam = float(rng.uniform(0.1, 10.0))
        y = ScaledData(x, lam)
        nx, ny = marcinkiewicz_norm(x, PSI, horizon, KAPPA), marcinkiewicz_norm(y, PSI, horizon, KAPPA)
        rx = riesz_seminorm(x, PSI, horizon, KAPPA, norm=nx).estimate
        ry = riesz_seminorm(y, PSI, horizon, KAPPA, norm=ny).estimate
        t = log_grid(1e-3, horizon, 8)
        sx = np.asarray(weighted_mean_on_clock(x, PSI, KAPPA, t))
        sy = np.asarray(weighted_mean_on_clock(y, PSI, KAPPA, t))
        err = max(_rel(lam * nx.value, ny.value), _rel(lam * rx, ry),
                  float(np.max(np.abs(lam * sx - sy) / np.maximum(np.abs(sy), 1e-300))))
        res.case(err <= 1e-12, err, lambda: f"{x.label}, lambda={lam!r}: relative error {err!r}")
    return res


# ---------------------------------------------------------------------------
# convergence
# ---------------------------------------------------------------------------

def _function_verdicts(rng, cases):
    out = []
    for _ in range(cases):
        g = probes.random_function(rng)
        out.append((g, classify(g, FUNCTION_HORIZON)))
    return out


def check_function_corpus(rng, cases=FUNCTION_CASES):
    """Chain, band range and collapse, Tauberian, and the discrete bound on random functions."""
    verdicts = _function_verdicts(rng, cases)
    tol = DEFAULT_TOL
    chain = CheckResult("chain_S_F_C", "convergence")
    band = CheckResult("band_within_range", "convergence")
    taub = CheckResult("tauberian_implication", "convergence")
    disc = CheckResult("discrete_derivative_bound", "convergence")
    for g, v in verdicts:
        chain.case(v.chain_ok, None, lambda: f"{g.label}: " + ", ".join(
            f"{k}={'pass' if o.passed else 'fail'}" for k, o in v.tests.items()))
        h = FUNCTION_HORIZON
        vals = np.asarray(g(log_grid(v.band.window[0] * 1e-3, h)))
        lo, hi = float(vals.min()), float(vals.max())
        inside = v.band.lo >= lo - SLACK and v.band.hi <= hi + SLACK
        s = v.tests["S"]
        collapsed = True
        if s.passed:
            collapsed = v.band.width < tol and abs(0.5 * (v.band.lo + v.band.hi) - s.limit) < tol
        band.case(inside and collapsed, v.band.width if s.passed else None,
                  lambda: f"{g.label}: band [{v.band.lo!r}, {v.band.hi!r}] vs range [{lo!r}, {hi!r}]")
        if v.tauberian_H is not None and v.tests["C"].passed:
            c_lim = v.tests["C"].limit
            med = float(np.median(g(log_grid(h / 10, h))))
            ok = s.spread < 3 * tol and abs(med - c_lim) < 3 * tol
            taub.case(ok, s.spread, lambda: f"{g.label}: C limit {c_lim!r}, S spread {s.spread!r}")
        tb = tauberian_derivative_bound(g, h)
        if tb.H is not None:
            disc.case(bool(tb.discrete_ok), None, lambda: f"{g.label}: {tb.diagnostics}")
    return [chain, band, taub, disc]


def check_m_k_identity(rng, cases=M_K_CASES):
    """M_k(g)(lam) = C(g o k^{-1})(k(lam)) to quadrature tolerance."""
    res = CheckResult("m_k_identity", "convergence")
    kappas = [get_kappa("expm1"), get_kappa("identity"), get_kappa("log1p"),
              kappa_perturbed(get_kappa("identity"), 0.5), kappa_perturbed(get_kappa("expm1"), 2.0)]
    for i in range(cases):
        g = probes.combine([probes.const(rng.uniform(-1, 1)),
                            probes.sin_log(rng.uniform(0, 1), rng.uniform(0.3, 2)),
                            probes.sin(rng.uniform(0, 1), rng.uniform(0.3, 2))])
        k = kappas[i % len(kappas)]
        lam = float(rng.uniform(0.2, 6.0))
        a, b = m_k_transform(g, k, lam), cesaro_of_composition(g, k, lam)
        err = abs(a - b) / max(abs(a), abs(b), 1e-3)
        res.case(err < M_K_RTOL, err, lambda: f"{g.label}, k={k.name}, lambda={lam!r}: {a!r} vs {b!r}")
    return res


# ---------------------------------------------------------------------------
# kappa_growth
# ---------------------------------------------------------------------------

def _catalogue_pairs(rng, extra=12):
    psis = [get_psi("log1p"), get_psi("identity"), get_psi("loglog"), get_psi("pow", 0.5),
            get_psi("logpow", 2.0)]
    kappas = [get_kappa(n) for n in sorted(KAPPA_CATALOGUE) if n != "psi_inverse"]
    pairs = [(k, p) for p in psis for k in kappas]
    for _ in range(extra):
        p = get_psi("pow", float(rng.uniform(0.1, 0.9))) if rng.random() < 0.5 else \
            get_psi("logpow", float(rng.uniform(0.5, 3.0)))
        k = kappa_perturbed(kappas[int(rng.integers(0, len(kappas)))], float(rng.uniform(0.1, 2.0)))
        pairs.append((k, p))
    return pairs


def check_growth(rng):
    """Containment D => SR => R, the growth inequality audit, and reparameterization stability."""
    contain = CheckResult("growth_containment", "kappa_growth")
    audit = CheckResult("growth_inequality_audit", "kappa_growth")
    stable = CheckResult("reparameterization_stability", "kappa_growth")
    for k, p in _catalogue_pairs(rng):
        v = classify_kappa(k, p)
        # D => SR; SR => R holds by construction since a strong pass is a pass.
        # An undetermined restricted verdict (clamped horizon) is not a counterexample.
        if v.dominated is None or v.restricted != Restricted.UNDETERMINED:
            ok = v.dominated is None or v.restricted == Restricted.STRONG
            contain.case(ok, None, lambda: f"{p.name}/{k.name}: dominated {v.dominated!r}, "
                                       f"restricted {v.restricted.value}")
        if v.dominated is not None:
            t = np.exp(rng.uniform(math.log(1e-2), math.log(1e4), 200))
            T = np.exp(rng.uniform(math.log(1e-3), math.log(1e4), 200))
            with np.errstate(invalid="ignore"):
                lhs = log_psi_kappa(p, k, t + T) - log_psi_kappa(p, k, t)
            rhs = v.dominated * np.log((t + T) / t)
            fine = np.isfinite(lhs)
            bad = fine & ~(lhs < rhs)
            audit.case(not np.any(bad), None, lambda: f"{p.name}/{k.name}: fails at t={t[bad][0]!r}")
        if "tanh" not in k.name:
            w = classify_kappa(kappa_perturbed(k, float(rng.uniform(0.1, 2.0))), p)
            same = (w.restricted == v.restricted and (w.dominated is None) == (v.dominated is None)
                    and (w.exponential is None) == (v.exponential is None))
            stable.case(same, None, lambda: f"{p.name}/{k.name}: {v.restricted.value}/{v.dominated}/"
                                            f"{v.exponential} vs {w.restricted.value}/{w.dominated}/{w.exponential}")
    return [contain, audit, stable]


def check_doubling_witness(rng):
    """Whenever dichotomy B passes, kappa = 2^t is strongly restricted and of exponential increase."""
    res = CheckResult("doubling_witness", "kappa_growth")
    psis = [get_psi("log1p"), get_psi("loglog"), get_psi("identity"), get_psi("logpow", 2.0)]
    psis += [get_psi("pow", float(rng.uniform(0.1, 0.9))) for _ in range(2)]
    psis += [get_psi("logpow", float(rng.uniform(0.3, 3.0))) for _ in range(2)]
    beta = kappa_pow2t()
    for p in psis:
        d = psi_dichotomies(p)
        if not d.B.passed:
            continue
        r = restricted_growth_check(beta, p)
        e = exponential_increase_check(beta)
        res.case(r.verdict == Restricted.STRONG and e.constant is not None, None,
                 lambda: f"{p.name}: restricted {r.verdict.value}, exponential {e.constant}")
    return res


# ---------------------------------------------------------------------------
# dixmier corpus
# ---------------------------------------------------------------------------

def corpus_specs(seed, size):
    """Deterministic list of member descriptions."""
    rng = np.random.default_rng([seed, 0xC0])
    kinds = ["harmonic", "power", "finite_rank", "step", "log_oscillator", "osc_mix", "measurable_mix"]
    weights = [0.2, 0.1, 0.1, 0.1, 0.3, 0.1, 0.1]
    out = []
    for i in range(size):
        kind = kinds[int(rng.choice(len(kinds), p=weights))]
        if kind == "harmonic":
            spec = {"family": "harmonic", "scale": round(float(rng.uniform(0.3, 3.0)), 4)}
        elif kind == "power":
            spec = {"family": f"power({round(float(rng.uniform(1.5, 3.0)), 4)!r})",
                    "scale": round(float(rng.uniform(0.3, 1.5)), 4)}
        elif kind == "finite_rank":
            k = int(rng.integers(1, 6))
            spec = {"family": f"finite_rank({k})", "scale": round(float(rng.uniform(0.2, 5.0 / k)), 4)}
        elif kind == "step":
            # total mass at most 5, the finite-rank cap
            pieces = _random_pieces(rng)
            mass = sum(v * m for v, m in pieces)
            shrink = min(1.0, 5.0 / mass) if mass > 0 else 1.0
            spec = {"step": [(round(v * shrink, 4), m) for v, m in pieces]}
        elif kind == "log_oscillator":
            a = round(float(rng.uniform(0.15, 0.5)), 4)
            spec = {"family": f"log_oscillator({a!r})",
                    "scale": round(float(rng.uniform(max(0.5, 0.1 / a), 2.0)), 4)}
        elif kind == "osc_mix":
            a = round(float(rng.uniform(0.2, 0.5)), 4)
            spec = {"sum": [{"family": "harmonic", "scale": round(float(rng.uniform(0.2, 1.0)), 4)},
                            {"family": f"log_oscillator({a!r})",
                             "scale": round(float(rng.uniform(0.5 / a * 0.4, 2.0)), 4)}]}
        else:
            spec = {"sum": [{"family": "harmonic", "scale": round(float(rng.uniform(0.3, 2.0)), 4)},
                            {"family": f"power({round(float(rng.uniform(1.5, 3.0)), 4)!r})",
                             "scale": round(float(rng.uniform(0.2, 1.0)), 4)}]}
        spec["id"] = f"m{i:03d}"
        out.append(spec)
    return out


def build_member(spec):
    if "sum" in spec:
        a, b = (build_member(s) for s in spec["sum"])
        x = SumData(a, b)
    elif "step" in spec:
        x = decreasing_rearrangement(spec["step"])
    else:
        x = build_family(spec["family"], spec.get("scale", 1.0))
    x.label = spec.get("id", x.label)
    return x


def expected_trace(spec):
    """Closed-form trace where one exists: lambda for harmonic parts, 0 for summable data."""
    if "sum" in spec:
        parts = [expected_trace(s) for s in spec["sum"]]
        return None if any(p is None for p in parts) else sum(parts)
    if "step" in spec:
        return 0.0
    name = spec["family"].split("(")[0]
    if name == "harmonic":
        return spec.get("scale", 1.0)
    if name in ("power", "finite_rank"):
        return 0.0
    return None


@dataclass
class MemberResult:
    spec: dict
    report: object
    discrete_ok: Optional[bool]
    error: Optional[str] = None


def analyze_member(spec, horizon=CORPUS_HORIZON):
    x = build_member(spec)
    try:
        measurable_guess = expected_trace(spec) is not None and "sum" not in spec
        rep = trace_analyze(x, horizon, cross_checks=measurable_guess)
        g = phi_exp(x, rep.norm)
        tb = tauberian_derivative_bound(g, rep.horizon)
        return MemberResult(spec, rep, tb.discrete_ok if tb.H is not None else None)
    except SingtraceError as exc:
        return MemberResult(spec, None, None, f"{type(exc).__name__}: {exc}")


def check_corpus(members, tol=DEFAULT_TOL):
    equiv = CheckResult("tauberian_band_equivalence", "dixmier")
    bounds = CheckResult("two_sided_trace_bound", "dixmier")
    chain = CheckResult("corpus_chain_and_tauberian", "dixmier")
    disc = CheckResult("corpus_discrete_bound", "dixmier")
    closure = CheckResult("cross_check_closure", "dixmier")
    single = CheckResult("singularity", "dixmier")
    oracle = CheckResult("trace_oracle", "dixmier")
    errors = CheckResult("corpus_completed", "dixmier")
    for m in members:
        mid = m.spec["id"]
        errors.case(m.report is not None, None, lambda: f"{mid}: {m.error}")
        r = m.report
        if r is None:
            continue
        band = r.trace_band
        s = r.tauberian.tests["S"]
        if r.H_tauberian is not None:
            collapsed = band.width < tol
            equiv.case(s.passed == collapsed, None,
                       lambda: f"{mid}: S {s.passed} (spread {s.spread!r}), band width {band.width!r}")
            lo = r.riesz / (math.e * r.H_theorem) - tol
            ok = lo <= band.hi <= r.riesz + tol
            bounds.case(ok, None, lambda: f"{mid}: {lo!r} <= {band.hi!r} <= {r.riesz + tol!r} fails")
        v = r.measurable
        c_ok = True
        if v.tauberian_H is not None and v.tests["C"].passed:
            s_v = v.tests["S"]
            c_ok = s_v.passed and abs(s_v.limit - v.tests["C"].limit) < 3 * tol
        chain.case(v.chain_ok and c_ok, None, lambda: f"{mid}: chain {v.chain_ok}, tauberian {c_ok}")
        if m.discrete_ok is not None:
            disc.case(m.discrete_ok, None, lambda: f"{mid}: discrete bound fails")
        if r.trace_value is not None:
            widths = band.width
            for est in (r.zeta_residue, r.heat_kernel):
                if est is None:
                    continue
                allowed = 2 * (widths + (est.band[1] - est.band[0]))
                ref = r.trace_value_extrapolated if r.trace_value_extrapolated is not None else r.trace_value
                gap = abs(ref - est.value)
                closure.case(gap <= allowed + tol, gap, lambda: f"{mid}: |trace - estimate| {gap!r} > {allowed!r}")
        exp = expected_trace(m.spec)
        fin = "step" in m.spec or m.spec.get("family", "").startswith("finite_rank")
        if fin:
            ok = r.trace_value is not None and abs(r.trace_value) < tol and abs(r.riesz) < tol
            single.case(ok, abs(r.riesz), lambda: f"{mid}: trace {r.trace_value!r}, rho_1 {r.riesz!r}")
        if exp is not None:
            ok = r.trace_value is not None and abs(r.trace_value - exp) < 0.04
            oracle.case(ok, None if r.trace_value is None else abs(r.trace_value - exp),
                        lambda: f"{mid}: trace {r.trace_value!r}, expected {exp!r}")
        elif "family" in m.spec or "sum" in m.spec:
            oracle.case(r.trace_value is None, None, lambda: f"{mid}: oscillating member reported measurable")
    return [errors, equiv, bounds, chain, disc, closure, single, oracle]


def _report_scalars(r):
    out = {"band_lo": r.trace_band.lo, "band_hi": r.trace_band.hi, "riesz": r.riesz, "norm": r.norm}
    for key in ("trace_value", "trace_value_extrapolated", "lower_bound", "H_tauberian"):
        if getattr(r, key) is not None:
            out[key] = getattr(r, key)
    for key in ("zeta_residue", "heat_kernel"):
        if getattr(r, key) is not None:
            out[key] = getattr(r, key).value
    return out


def check_report_homogeneity(rng, cases=6, horizon=CORPUS_HORIZON):
    res = CheckResult("report_homogeneity", "dixmier")
    bases = ["harmonic", "power(2.0)", "finite_rank(3)", "log_oscillator(0.4)"]
    for i in range(cases):
        name = bases[i % len(bases)]
        lam = float(rng.uniform(0.5, 2.0))
        rx = trace_analyze(build_family(name), horizon)
        ry = trace_analyze(build_family(name, lam), horizon)
        sx, sy = _report_scalars(rx), _report_scalars(ry)
        err = 0.0
        ok = sx.keys() == sy.keys() and rx.measurable.cls == ry.measurable.cls
        for k in sx.keys() & sy.keys():
            gap = abs(lam * sx[k] - sy[k])
            if k in ("zeta_residue", "heat_kernel"):
                if rx.trace_value is None:
                    continue   # no limit to be homogeneous
                # finite-ladder rungs scale like lambda^s, only the limit is homogeneous
                ok = ok and gap <= DEFAULT_TOL * max(1.0, lam)
            elif gap > 1e-12:
                e = gap / max(abs(sy[k]), 1e-12)
                err = max(err, e)
                ok = ok and e <= 1e-9
        res.case(ok, err, lambda: f"{name}, lambda={lam!r}: relative error {err!r}")
    return res


def check_additivity(rng, cases=2, horizon=CORPUS_HORIZON, tol=DEFAULT_TOL):
    """Trace of a direct sum equals the sum of traces.

    One harmonic pair goes through :class:`DirectSumData`; the other cases
    merge a harmonic with a finite step function, whose trace is zero, and
    check that the merge leaves the trace unchanged.
    """
    res = CheckResult("additivity", "dixmier")
    for i in range(cases):
        a = build_family("harmonic", float(rng.uniform(0.3, 2.0)))
        if i == 0:
            b = build_family("harmonic", float(rng.uniform(0.3, 2.0)))
        else:
            b = decreasing_rearrangement(_random_pieces(rng, int(rng.integers(1, 6))))
        ra, rb = trace_analyze(a, horizon, cross_checks=False), trace_analyze(b, horizon, cross_checks=False)
        if ra.trace_value is None or rb.trace_value is None:
            continue
        rs = trace_analyze(DirectSumData(a, b), horizon, cross_checks=False)
        err = None if rs.trace_value is None else abs(rs.trace_value - ra.trace_value - rb.trace_value)
        res.case(err is not None and err < tol, err,
                 lambda: f"{a.label} + {b.label}: {rs.trace_value!r} vs {ra.trace_value!r} + {rb.trace_value!r}")
    return res


def _comparable(report):
    data = to_jsonable(report)
    data.pop("input_id", None)
    return dumps(data)


def check_unitary_invariance(rng, cases=3, horizon=CORPUS_HORIZON):
    res = CheckResult("permutation_invariance", "dixmier")
    for _ in range(cases):
        pieces = _random_pieces(rng, int(rng.integers(2, 8)))
        base = _comparable(trace_analyze(decreasing_rearrangement(pieces), horizon))
        perm = [pieces[j] for j in rng.permutation(len(pieces))]
        other = _comparable(trace_analyze(decreasing_rearrangement(perm), horizon))
        res.case(base == other, None, lambda: f"pieces {pieces}: reports differ under permutation")
    return res


# ---------------------------------------------------------------------------
# cli_io
# ---------------------------------------------------------------------------

def check_serialization(members):
    schema = CheckResult("schema_and_round_trip", "cli_io")
    try:
        import jsonschema
        from .io import load_schema
        validator = jsonschema.Draft202012Validator(load_schema())
    except ImportError:
        validator = None
    import json
    for m in members:
        if m.report is None:
            continue
        env = ReportEnvelope("analyze", {"id": m.spec["id"]}, m.report)
        text = env.to_json()
        data = json.loads(text)
        ok = dumps(data) == text
        if validator is not None:
            ok = ok and validator.is_valid(data)
        schema.case(ok, None, lambda: f"{m.spec['id']}: schema or round-trip failure")
    return schema


def check_determinism(members, horizon=CORPUS_HORIZON):
    res = CheckResult("repeat_determinism", "cli_io")
    for m in members[:3]:
        if m.report is None:
            continue
        again = analyze_member(m.spec, horizon)
        res.case(_comparable(again.report) == _comparable(m.report), None,
                 lambda: f"{m.spec['id']}: second run differs")
    return res


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

INDEPENDENT = [
    check_isometry, check_translation, check_section_retraction, check_linearity, check_rearrangement,
    check_clock_inequality, check_derivative_bounds, check_norm_monotonicity, check_riesz_below_norm,
    check_homogeneity, check_function_corpus, check_m_k_identity, check_growth, check_doubling_witness,
    check_report_homogeneity, check_additivity, check_unitary_invariance,
]


@dataclass
class VerifyReport:
    seed: int
    corpus_size: int
    checks: list
    violations: int
    passed: bool
    corpus: list


def _summary(m):
    r = m.report
    if r is None:
        return {"id": m.spec["id"], "spec": m.spec, "error": m.error}
    return {"id": m.spec["id"], "spec": m.spec, "class": r.measurable.cls.value,
            "trace_value": r.trace_value, "band": [r.trace_band.lo, r.trace_band.hi],
            "riesz": r.riesz, "H_tauberian": r.H_tauberian}


def run_verify(seed=42, corpus_size=200, threads=None, horizon=CORPUS_HORIZON,
               scale=1.0) -> VerifyReport:
    """Run every property check; ``scale`` < 1 shrinks the per-check case counts (for smoke runs)."""
    workers = thread_cap(threads)
    specs = corpus_specs(seed, corpus_size)

    def independent(i):
        fn = INDEPENDENT[i]
        rng = np.random.default_rng([seed, i + 1])
        if scale != 1.0 and fn.__defaults__ and isinstance(fn.__defaults__[0], int):
            return fn(rng, max(int(fn.__defaults__[0] * scale), 1))
        return fn(rng)

    with ThreadPoolExecutor(max_workers=workers) as ex:
        members = list(ex.map(lambda s: analyze_member(s, horizon), specs))
        outs = list(ex.map(independent, range(len(INDEPENDENT))))
    checks = []
    for o in outs:
        checks.extend(o if isinstance(o, list) else [o])
    checks.extend(check_corpus(members))
    checks.append(check_serialization(members))
    checks.append(check_determinism(members, horizon))
    order = ["analysis_core", "marcinkiewicz", "convergence", "kappa_growth", "dixmier", "cli_io"]
    checks.sort(key=lambda c: order.index(c.module))
    total = sum(c.violations for c in checks)
    return VerifyReport(int(seed), len(specs), checks, total, total == 0, [_summary(m) for m in members])
