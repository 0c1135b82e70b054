"""Singular-value data: the only operator information the package consumes.

Three representations share one interface:

* :class:`SequenceData` -- a non-increasing sequence s_1 >= s_2 >= ... read as
  the right-continuous step function mu_t = s(ceil t), so that
  int_0^N mu = s_1 + ... + s_N exactly;
* :class:`StepFunctionData` -- finitely many (value, measure) pieces;
* :class:`AnalyticData` -- a declared-monotone callable mu_t.

Every representation provides ``primitive(t) = int_0^t mu`` and
``primitive_exp(u) = primitive(e^u - 1)``; the latter may be evaluated far past
the floating-point range of t when the data carries an asymptotic form.
"""
from __future__ import annotations

import math
import threading

import numpy as np

from .analysis_core import _as_array, _restore, integrate
from .errors import DomainError, HorizonOverflow, InputError, TailBoundError
from .kernels import compensated_sum, kahan_cumsum

# largest u for which expm1(u) is comfortably finite
EXP_SAFE = 700.0
# required relative accuracy of certified truncation tails
TAIL_RTOL = 1e-6


class SingularValueData:
    """Base class. Subclasses implement ``mu`` and ``primitive``."""

    label = "x"
    #: sup of mu (= mu_0)
    bound = 0.0
    #: largest t at which ``primitive`` can be evaluated
    max_t = math.inf

    def mu(self, t):
        raise NotImplementedError

    def primitive(self, t):
        raise NotImplementedError

    def primitive_exp(self, u):
        """int_0^{e^u - 1} mu, stable for u beyond the float range of e^u."""
        arr, scalar = _as_array(u)
        flat = np.atleast_1d(arr)
        out = np.empty(flat.shape, dtype=np.float64)
        small = flat <= EXP_SAFE
        if np.any(small):
            t = np.expm1(flat[small])
            if np.any(t > self.max_t):
                raise HorizonOverflow(f"{self.label}: primitive unavailable beyond t={self.max_t:g}",
                                      limit=math.log1p(self.max_t))
            out[small] = self.primitive(t)
        if np.any(~small):
            out[~small] = self._primitive_exp_large(flat[~small])
        return _restore(out.reshape(arr.shape), scalar)

    @property
    def max_log_horizon(self):
        """Largest u accepted by ``primitive_exp``."""
        if type(self)._primitive_exp_large is not SingularValueData._primitive_exp_large:
            return math.inf
        return min(math.log1p(self.max_t), EXP_SAFE)

    def _primitive_exp_large(self, u):
        raise HorizonOverflow(f"{self.label}: no asymptotic primitive past u={EXP_SAFE}",
                              limit=self.max_log_horizon)

    def total(self):
        """int_0^inf mu (inf for non-integrable data)."""
        return math.inf

    def is_finite_rank(self):
        return False

    def power_integral(self, s):
        """(value, abs_err) of int_0^inf mu^s = sum_n s_n^s."""
        raise TailBoundError(f"{self.label}: power sums not available")

    def heat_integral(self, eps, convention="gaussian"):
        """(value, abs_err) of int_0^inf exp(-(eps/mu)^2) (``gaussian``) or
        int_0^inf exp(-(eps*mu)^-2) (``printed``)."""
        raise TailBoundError(f"{self.label}: heat sums not available")

    def scaled(self, lam):
        return ScaledData(self, lam)

    def audit(self, points=None):
        """Check non-negativity and monotonicity of mu on a sample grid."""
        if points is None:
            hi = min(self.max_t, 1e12)
            points = np.concatenate([[0.0], np.geomspace(1e-3, hi, 400)])
        pts = np.sort(np.asarray(points, dtype=np.float64))
        vals = np.asarray(self.mu(pts), dtype=np.float64)
        if np.any(vals < 0):
            i = int(np.argmax(vals < 0))
            raise InputError(f"{self.label}: negative singular value at t={pts[i]!r}", index=i)
        rises = np.diff(vals) > 1e-12 * np.maximum(1.0, np.abs(vals[:-1]))
        if np.any(rises):
            i = int(np.argmax(rises)) + 1
            raise InputError(f"{self.label}: mu increases at t={pts[i]!r}", index=i)


# ---------------------------------------------------------------------------
# sequences
# ---------------------------------------------------------------------------

def validate_sequence(values):
    """Reject negative or increasing data; indices in errors are 1-based."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise InputError("empty sequence")
    if not np.all(np.isfinite(values)):
        i = int(np.argmax(~np.isfinite(values)))
        raise InputError(f"non-finite value at index {i + 1}", index=i + 1)
    neg = values < 0
    if np.any(neg):
        i = int(np.argmax(neg))
        raise InputError(f"negative value at index {i + 1}", index=i + 1)
    up = values[1:] > values[:-1]
    if np.any(up):
        i = int(np.argmax(up)) + 2
        raise InputError(f"sequence is not non-increasing at index {i}", index=i)
    return values


class SequenceData(SingularValueData):
    """s_1 >= s_2 >= ... >= 0, finite (``values``) or lazy (``term``).

    Lazy sequences memoize compensated prefix sums in a table whose size is a
    power of two and grows on demand up to ``cap`` entries.  Past the table,
    ``asymptotics`` (an object with ``partial_sum(n)`` and optionally
    ``primitive_exp(u)``, ``power_tail(N, s)``, ``heat_tail(N, eps, convention)``)
    takes over; without it, evaluation past ``cap`` raises ``HorizonOverflow``.
    """

    def __init__(self, values=None, *, term=None, asymptotics=None, label="sequence",
                 cap=1 << 24, table_size=None):
        if (values is None) == (term is None):
            raise InputError("give exactly one of values / term")
        self.label = label
        self._lock = threading.Lock()
        self.asymptotics = asymptotics
        self.cap = int(cap)
        if values is not None:
            self._values = validate_sequence(values)
            self._term = None
            self._prefix = kahan_cumsum(np.ascontiguousarray(self._values))
            self.length = self._values.shape[0]
        else:
            self._values = None
            self._term = term
            self.length = math.inf
            self._prefix = np.zeros(1)
            if table_size:
                self._ensure_table(table_size)
        self.bound = float(self.term(np.array([1.0]))[0])
        if asymptotics is None and self.length == math.inf:
            self.max_t = float(self.cap)

    # -- raw terms ---------------------------------------------------------
    def term(self, n):
        n = np.asarray(n, dtype=np.float64)
        if self._values is not None:
            out = np.zeros(n.shape, dtype=np.float64)
            inside = n <= self.length
            out[inside] = self._values[n[inside].astype(np.int64) - 1]
            return out
        return np.asarray(self._term(n), dtype=np.float64)

    def _ensure_table(self, n_needed):
        size = self._prefix.shape[0] - 1
        if n_needed <= size:
            return
        if n_needed > self.cap:
            raise HorizonOverflow(f"{self.label}: prefix sums past {self.cap} terms", limit=self.cap)
        with self._lock:
            size = self._prefix.shape[0] - 1
            if n_needed <= size:
                return
            new = 1 << max(10, int(math.ceil(math.log2(n_needed))))
            new = min(new, self.cap)
            vals = self.term(np.arange(1, new + 1, dtype=np.float64))
            self._prefix = kahan_cumsum(np.ascontiguousarray(vals))

    def partial_sum(self, n):
        """S(n) = s_1 + ... + s_n for a float array of non-negative integers."""
        n = np.asarray(n, dtype=np.float64)
        if self._values is not None:
            idx = np.minimum(n, self.length).astype(np.int64)
            return self._prefix[idx]
        out = np.empty(n.shape, dtype=np.float64)
        table_n = self._prefix.shape[0] - 1
        big = n > table_n
        if self.asymptotics is not None:
            limit = getattr(self.asymptotics, "switch", table_n)
            self._ensure_table(min(limit, max(float(np.max(n, initial=0.0)), 1.0)))
            table_n = self._prefix.shape[0] - 1
            big = n > table_n
            if np.any(big):
                out[big] = self.asymptotics.partial_sum(n[big])
        elif np.any(big):
            self._ensure_table(float(np.max(n)))
            big = np.zeros(n.shape, dtype=bool)
        small = ~big
        out[small] = self._prefix[n[small].astype(np.int64)]
        return out

    # -- interface ---------------------------------------------------------
    def mu(self, t):
        arr, scalar = _as_array(t)
        n = np.maximum(np.ceil(arr), 1.0)
        return _restore(self.term(n), scalar)

    def primitive(self, t):
        arr, scalar = _as_array(t)
        if np.any(arr < 0):
            raise DomainError("primitive needs t >= 0")
        flat = np.atleast_1d(arr)
        out = np.empty(flat.shape, dtype=np.float64)
        if self._values is not None:
            beyond = flat >= self.length
            out[beyond] = self._prefix[-1]
            inside = ~beyond
            n = np.floor(flat[inside])
            out[inside] = self.partial_sum(n) + (flat[inside] - n) * self.term(n + 1.0)
        else:
            if np.any(flat > self.max_t):
                raise HorizonOverflow(f"{self.label}: t beyond {self.max_t:g}",
                                      limit=math.log1p(self.max_t))
            n = np.floor(flat)
            out[:] = self.partial_sum(n) + (flat - n) * self.term(n + 1.0)
        return _restore(out.reshape(arr.shape), scalar)

    def _primitive_exp_large(self, u):
        if self._values is not None:
            return np.full(np.shape(u), self._prefix[-1])
        hook = getattr(self.asymptotics, "primitive_exp", None)
        if hook is None:
            return SingularValueData._primitive_exp_large(self, u)
        return hook(np.asarray(u, dtype=np.float64))

    @property
    def max_log_horizon(self):
        if self._values is not None:
            return math.inf
        if self.asymptotics is not None and hasattr(self.asymptotics, "primitive_exp"):
            return math.inf
        if self.asymptotics is not None:
            return EXP_SAFE
        return math.log1p(self.cap)

    def total(self):
        if self._values is not None:
            return float(self._prefix[-1])
        hook = getattr(self.asymptotics, "total", None)
        return hook() if hook else math.inf

    def is_finite_rank(self):
        return self._values is not None

    def values(self):
        return None if self._values is None else self._values.copy()

    def power_integral(self, s, n_terms=1 << 20):
        if s <= 0:
            raise DomainError("power sums need s > 0")
        if self._values is not None:
            terms = self._values ** s
            return compensated_sum(np.ascontiguousarray(terms)), 1e-16 * self.length * float(terms.sum())
        tail = getattr(self.asymptotics, "power_tail", None)
        if tail is None:
            raise TailBoundError(f"{self.label}: no certified tail for sum s_n^{s}")
        head = compensated_sum(np.ascontiguousarray(self.term(np.arange(1, n_terms + 1, dtype=np.float64)) ** s))
        lo, hi = tail(n_terms, s)
        value = head + 0.5 * (lo + hi)
        err = 0.5 * (hi - lo) + 1e-16 * n_terms * value
        if not math.isfinite(value) or err > TAIL_RTOL * abs(value):
            raise TailBoundError(f"{self.label}: tail for s={s} not certified below {TAIL_RTOL} relative")
        return value, err

    def heat_integral(self, eps, convention="gaussian"):
        if eps <= 0:
            raise DomainError("heat sums need eps > 0")

        def weights(vals):
            with np.errstate(divide="ignore", over="ignore", under="ignore"):
                if convention == "gaussian":
                    return np.exp(-np.square(eps / vals))
                return np.exp(-1.0 / np.square(eps * vals))

        if self._values is not None:
            w = weights(self._values)
            return compensated_sum(np.ascontiguousarray(w)), 1e-16 * self.length * max(float(w.sum()), 1e-300)
        # lazy: sum doubling blocks until a block contributes negligibly
        total, start, block, err = 0.0, 1, 1024, math.inf
        while start <= self.cap:
            idx = np.arange(start, start + block, dtype=np.float64)
            w = weights(self.term(idx))
            part = compensated_sum(np.ascontiguousarray(w))
            total += part
            start += block
            if w[-1] == 0.0 or part < 1e-18 * max(total, 1e-300):
                break
            block *= 2
        tail = getattr(self.asymptotics, "heat_tail", None)
        if tail is not None:
            lo, hi = tail(start - 1, eps, convention)
            total += 0.5 * (lo + hi)
            err = 0.5 * (hi - lo) + 1e-15 * total
        elif w[-1] == 0.0:
            err = 1e-15 * total
        else:
            raise TailBoundError(f"{self.label}: heat tail not certified at eps={eps}")
        return total, err


# ---------------------------------------------------------------------------
# step functions and the decreasing rearrangement
# ---------------------------------------------------------------------------

class StepFunctionData(SingularValueData):
    """Finitely many pieces, already in non-increasing order of value."""

    def __init__(self, values, measures, label="step_function"):
        self.label = label
        self.values_ = np.asarray(values, dtype=np.float64)
        self.measures = np.asarray(measures, dtype=np.float64)
        self.edges = np.concatenate([[0.0], np.cumsum(self.measures)])
        self._prim_edges = kahan_cumsum(np.ascontiguousarray(self.values_ * self.measures))
        self.bound = float(self.values_[0]) if self.values_.size else 0.0

    @property
    def pieces(self):
        return list(zip(self.values_.tolist(), self.measures.tolist()))

    def mu(self, t):
        arr, scalar = _as_array(t)
        k = np.searchsorted(self.edges, arr, side="right") - 1
        vals = np.zeros(arr.shape, dtype=np.float64)
        inside = k < self.values_.shape[0]
        vals[inside] = self.values_[k[inside]]
        return _restore(vals, scalar)

    def primitive(self, t):
        arr, scalar = _as_array(t)
        flat = np.atleast_1d(arr)
        if self.values_.size == 0:
            out = np.zeros(flat.shape)
        else:
            tt = np.minimum(flat, self.edges[-1])
            k = np.clip(np.searchsorted(self.edges, tt, side="right") - 1, 0, self.values_.size - 1)
            out = self._prim_edges[k] + (tt - self.edges[k]) * self.values_[k]
        return _restore(out.reshape(arr.shape), scalar)

    def _primitive_exp_large(self, u):
        return np.full(np.shape(u), self._prim_edges[-1])

    def total(self):
        return float(self._prim_edges[-1])

    def is_finite_rank(self):
        return True

    def power_integral(self, s):
        terms = self.values_ ** s * self.measures
        return compensated_sum(np.ascontiguousarray(terms)), 1e-15 * float(terms.sum())

    def heat_integral(self, eps, convention="gaussian"):
        with np.errstate(divide="ignore", under="ignore"):
            if convention == "gaussian":
                w = np.exp(-np.square(eps / self.values_))
            else:
                w = np.exp(-1.0 / np.square(eps * self.values_))
        terms = w * self.measures
        return compensated_sum(np.ascontiguousarray(terms)), 1e-15 * float(terms.sum())


def decreasing_rearrangement(pieces, label="step_function"):
    """x* of a finite step function given as (value, measure) pairs.

    Zero-valued pieces do not contribute to x*; equal values merge.  Pieces
    of infinite measure with a positive value are rejected.
    """
    vals, meas = [], []
    for i, (v, m) in enumerate(pieces):
        v, m = float(v), float(m)
        if not (m > 0):
            raise InputError(f"piece {i + 1}: measure must be > 0", index=i + 1)
        if not (v >= 0):
            raise InputError(f"piece {i + 1}: value must be >= 0", index=i + 1)
        if v == 0:
            continue
        if math.isinf(m):
            raise InputError(f"piece {i + 1}: infinite measure with value {v}", index=i + 1)
        vals.append(v)
        meas.append(m)
    order = sorted(range(len(vals)), key=lambda i: -vals[i])
    merged_v, merged_m = [], []
    for i in order:
        if merged_v and merged_v[-1] == vals[i]:
            merged_m[-1] += meas[i]
        else:
            merged_v.append(vals[i])
            merged_m.append(meas[i])
    return StepFunctionData(merged_v, merged_m, label=label)


def distribution_measure(pieces, s):
    """m({|x| > s}) for a step function given as pieces."""
    return math.fsum(m for v, m in pieces if abs(v) > s)


# ---------------------------------------------------------------------------
# analytic data and combinators
# ---------------------------------------------------------------------------

class AnalyticData(SingularValueData):
    """mu given as a vectorized callable declared non-increasing.

    Closed forms for the primitive (and its large-u form), power integral,
    and heat integral are used when supplied; otherwise quadrature.
    """

    def __init__(self, mu, *, primitive=None, primitive_exp_large=None, power_integral=None,
                 heat_integral=None, label="analytic", total=math.inf):
        self.label = label
        self._mu = mu
        self._primitive = primitive
        self._pel = primitive_exp_large
        self._power = power_integral
        self._heat = heat_integral
        self._total = total
        self.bound = float(np.asarray(mu(np.array([0.0])))[0])

    def mu(self, t):
        arr, scalar = _as_array(t)
        return _restore(np.asarray(self._mu(np.atleast_1d(arr)), dtype=np.float64).reshape(arr.shape), scalar)

    def primitive(self, t):
        arr, scalar = _as_array(t)
        if self._primitive is not None:
            return _restore(np.asarray(self._primitive(arr), dtype=np.float64), scalar)
        flat = np.atleast_1d(arr)
        out = np.array([integrate(self._mu, 0.0, float(v))[0] for v in flat])
        return _restore(out.reshape(arr.shape), scalar)

    def _primitive_exp_large(self, u):
        if self._pel is None:
            return SingularValueData._primitive_exp_large(self, u)
        return np.asarray(self._pel(u), dtype=np.float64)

    @property
    def max_log_horizon(self):
        return math.inf if self._pel is not None else EXP_SAFE

    def total(self):
        return self._total

    def power_integral(self, s):
        if self._power is not None:
            return self._power(s)
        mu = self._mu

        def integrand(v):
            t = np.exp(v)
            return np.asarray(mu(np.atleast_1d(t)))[0] ** s * t

        lo, e1 = integrate(lambda v: integrand(v), -60.0, 0.0)
        hi, e2 = _tail_quad(integrand)
        return lo + hi, e1 + e2

    def heat_integral(self, eps, convention="gaussian"):
        if self._heat is not None:
            return self._heat(eps, convention)
        mu = self._mu

        def integrand(v):
            t = np.exp(v)
            m = float(np.asarray(mu(np.atleast_1d(t)))[0])
            if m <= 0:
                return 0.0
            if convention == "gaussian":
                return math.exp(-(eps / m) ** 2) * t
            return math.exp(-1.0 / (eps * m) ** 2) * t

        lo, e1 = integrate(integrand, -60.0, 0.0)
        hi, e2 = _tail_quad(integrand)
        return lo + hi, e1 + e2


def _tail_quad(integrand, start=0.0, step=8.0, max_panels=200):
    """int_start^inf by panels until a panel contributes < 1e-16 of the total."""
    total, err, a = 0.0, 0.0, start
    for _ in range(max_panels):
        val, e = integrate(integrand, a, a + step, epsrel=1e-11)
        total += val
        err += e
        a += step
        if abs(val) <= 1e-16 * max(abs(total), 1e-300):
            return total, err
    raise TailBoundError("tail integral did not decay")


class ScaledData(SingularValueData):
    """lam * x."""

    def __init__(self, base, lam):
        if not lam > 0:
            raise DomainError("scale must be > 0")
        self.base = base
        self.lam = float(lam)
        self.label = f"{lam!r}*{base.label}"
        self.bound = self.lam * base.bound
        self.max_t = base.max_t

    def mu(self, t):
        return self.lam * self.base.mu(t)

    def primitive(self, t):
        return self.lam * self.base.primitive(t)

    def primitive_exp(self, u):
        return self.lam * self.base.primitive_exp(u)

    @property
    def max_log_horizon(self):
        return self.base.max_log_horizon

    def total(self):
        return self.lam * self.base.total()

    def is_finite_rank(self):
        return self.base.is_finite_rank()

    def power_integral(self, s):
        v, e = self.base.power_integral(s)
        f = self.lam ** s
        return f * v, f * e

    def heat_integral(self, eps, convention="gaussian"):
        if convention == "gaussian":
            return self.base.heat_integral(eps / self.lam, convention)
        return self.base.heat_integral(eps * self.lam, convention)


class SumData(SingularValueData):
    """Pointwise sum mu_x + mu_y (non-increasing when both are)."""

    def __init__(self, a, b):
        self.a, self.b = a, b
        self.label = f"({a.label}+{b.label})"
        self.bound = a.bound + b.bound
        self.max_t = min(a.max_t, b.max_t)

    def mu(self, t):
        return self.a.mu(t) + self.b.mu(t)

    def primitive(self, t):
        return self.a.primitive(t) + self.b.primitive(t)

    def primitive_exp(self, u):
        return self.a.primitive_exp(u) + self.b.primitive_exp(u)

    @property
    def max_log_horizon(self):
        return min(self.a.max_log_horizon, self.b.max_log_horizon)

    def total(self):
        return self.a.total() + self.b.total()

    def is_finite_rank(self):
        return self.a.is_finite_rank() and self.b.is_finite_rank()


class DirectSumData(SingularValueData):
    """x (+) y: the union of both singular-value families, rearranged.

    int_0^t (x (+) y)* = max over a in [0, t] of F_x(a) + F_y(t - a).  The
    objective is concave with slope mu_x(a) - mu_y(t - a), so the maximizer is
    found by bisection on that sign; past the float range of t a golden-section
    search runs on the log clock instead.
    Power and heat integrals are additive.
    """

    _ITER = 60
    _BISECT = 64

    def __init__(self, a, b):
        self.a, self.b = a, b
        self.label = f"({a.label}(+){b.label})"
        self.bound = max(a.bound, b.bound)
        self.max_t = min(a.max_t, b.max_t)

    def _maximize(self, obj, hi):
        """Vectorized golden-section max of a concave ``obj`` on [0, hi], endpoints included."""
        lo = np.zeros_like(hi)
        hi = hi.copy()
        g = (math.sqrt(5.0) - 1.0) / 2.0
        x1 = hi - g * (hi - lo)
        x2 = lo + g * (hi - lo)
        f1, f2 = obj(x1), obj(x2)
        for _ in range(self._ITER):
            left = f1 >= f2
            hi = np.where(left, x2, hi)
            lo = np.where(left, lo, x1)
            x2n = np.where(left, x1, lo + g * (hi - lo))
            x1n = np.where(left, hi - g * (hi - lo), x2)
            x1, x2 = x1n, x2n
            f1, f2 = obj(x1), obj(x2)
        return 0.5 * (lo + hi)

    def _split(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))

        def obj(w):
            return self.a.primitive(w) + self.b.primitive(np.maximum(t - w, 0.0))

        # the concave objective peaks where mu_a(w) = mu_b(t - w): bisect on that sign
        lo, hi = np.zeros_like(t), t.copy()
        for _ in range(self._BISECT):
            mid = 0.5 * (lo + hi)
            right = np.asarray(self.a.mu(mid)) >= np.asarray(self.b.mu(np.maximum(t - mid, 0.0)))
            lo = np.where(right, mid, lo)
            hi = np.where(right, hi, mid)
        w = 0.5 * (lo + hi)
        # endpoints can be optimal (e.g. one summand is zero)
        cands = np.stack([obj(w), obj(np.zeros_like(t)), obj(t)])
        best = np.argmax(cands, axis=0)
        w = np.choose(best, [w, np.zeros_like(t), t])
        return w, np.max(cands, axis=0)

    def _primitive_exp_large(self, u):
        # split t = e^u - 1 as theta*t + (1-theta)*t; log(1 + theta*t) ~ u + log(theta) here
        u = np.atleast_1d(np.asarray(u, dtype=np.float64))

        def obj(theta):
            with np.errstate(divide="ignore"):
                ua = np.maximum(u + np.log(theta), 0.0)
                ub = np.maximum(u + np.log1p(-theta), 0.0)
            return self.a.primitive_exp(ua) + self.b.primitive_exp(ub)

        theta = self._maximize(obj, np.ones_like(u))
        cands = np.stack([obj(theta), self.b.primitive_exp(u), self.a.primitive_exp(u)])
        return np.max(cands, axis=0)

    @property
    def max_log_horizon(self):
        return min(self.a.max_log_horizon, self.b.max_log_horizon)

    def primitive(self, t):
        arr, scalar = _as_array(t)
        _, val = self._split(arr)
        return _restore(val.reshape(arr.shape), scalar)

    def mu(self, t):
        arr, scalar = _as_array(t)
        w, _ = self._split(arr)
        m = np.maximum(self.a.mu(w), self.b.mu(np.maximum(np.atleast_1d(arr) - w, 0.0)))
        return _restore(m.reshape(arr.shape), scalar)

    def total(self):
        return self.a.total() + self.b.total()

    def is_finite_rank(self):
        return self.a.is_finite_rank() and self.b.is_finite_rank()

    def power_integral(self, s):
        v1, e1 = self.a.power_integral(s)
        v2, e2 = self.b.power_integral(s)
        return v1 + v2, e1 + e2

    def heat_integral(self, eps, convention="gaussian"):
        v1, e1 = self.a.heat_integral(eps, convention)
        v2, e2 = self.b.heat_integral(eps, convention)
        return v1 + v2, e1 + e2


def direct_sum_sequences(x: SequenceData, y: SequenceData) -> SequenceData:
    """Exact x (+) y for finite sequences: merge and re-sort."""
    if not (x.is_finite_rank() and y.is_finite_rank()):
        raise InputError("exact merge needs finite sequences; use DirectSumData")
    merged = np.sort(np.concatenate([x.values(), y.values()]))[::-1]
    return SequenceData(merged, label=f"({x.label}(+){y.label})")
