"""Built-in singular-value families with closed-form asymptotics.

* ``harmonic``       s_n = 1/n
* ``power(alpha)``   s_n = n^-alpha
* ``finite_rank(k)`` s_n = 1 for n <= k, then 0
* ``log_oscillator(a)``  mu_t = (1 + a sin L + a cos L)/t with L = log log t
  for t >= e^2 and constant below; int_0^t mu = (1 + a sin(log log t)) log t.
"""
from __future__ import annotations

import math
import re

import numpy as np
from scipy.special import erfc, gamma, gammaincc, zeta

from .analysis_core import integrate
from .errors import DomainError, InputError, TailBoundError
from .singular_values import AnalyticData, ScaledData, SequenceData

EULER_GAMMA = 0.57721566490153286061
TABLE_SWITCH = 1 << 20


class PowerAsymptotics:
    """Euler-Maclaurin partial sums and certified tails for s_n = n^-alpha."""

    switch = TABLE_SWITCH

    def __init__(self, alpha):
        self.alpha = float(alpha)
        if not self.alpha > 0:
            raise DomainError("power(alpha) needs alpha > 0")

    def partial_sum(self, n):
        n = np.asarray(n, dtype=np.float64)
        a = self.alpha
        with np.errstate(under="ignore"):
            return (zeta(a) + n ** (1 - a) / (1 - a) + 0.5 * n ** -a - a * n ** (-a - 1) / 12
                    + a * (a + 1) * (a + 2) * n ** (-a - 3) / 720)

    def primitive_exp(self, u):
        u = np.asarray(u, dtype=np.float64)
        a = self.alpha
        if a > 1:
            return np.full(u.shape, zeta(a))
        with np.errstate(over="ignore"):
            return np.exp((1 - a) * u) / (1 - a)

    def total(self):
        return float(zeta(self.alpha)) if self.alpha > 1 else math.inf

    def power_tail(self, N, s):
        p = self.alpha * s
        if p <= 1:
            return math.inf, math.inf
        return (N + 1.0) ** (1 - p) / (p - 1), float(N) ** (1 - p) / (p - 1)

    def heat_tail(self, N, eps, convention):
        # sum_{n>N} exp(-(c n^alpha)^2) bracketed by integrals of the decreasing summand
        c = eps if convention == "gaussian" else 1.0 / eps
        a = 0.5 / self.alpha

        def tail_integral(x):
            return a * c ** (-2 * a) * gamma(a) * gammaincc(a, (c * x ** self.alpha) ** 2)

        return float(tail_integral(N + 1.0)), float(tail_integral(float(N)))


class HarmonicAsymptotics(PowerAsymptotics):
    def __init__(self):
        super().__init__(1.0)

    def partial_sum(self, n):
        n = np.asarray(n, dtype=np.float64)
        r = 1.0 / n
        r2 = r * r
        return np.log(n) + EULER_GAMMA + 0.5 * r - r2 / 12 + r2 * r2 / 120 - r2 * r2 * r2 / 252

    def primitive_exp(self, u):
        # H_t with log t = u + log(1 - e^-u); the 1/(2t) term is below float resolution here
        u = np.asarray(u, dtype=np.float64)
        return u + np.log1p(-np.exp(-u)) + EULER_GAMMA

    def total(self):
        return math.inf

    def heat_tail(self, N, eps, convention):
        c = eps if convention == "gaussian" else 1.0 / eps
        k = math.sqrt(math.pi) / (2 * c)
        return float(k * erfc(c * (N + 1.0))), float(k * erfc(c * N))


def harmonic(table_size=None):
    return SequenceData(term=lambda n: 1.0 / n, asymptotics=HarmonicAsymptotics(), label="harmonic",
                        table_size=table_size)


def power(alpha):
    a = float(alpha)
    if a == 1.0:
        return harmonic()
    return SequenceData(term=lambda n: np.exp(-a * np.log(n)), asymptotics=PowerAsymptotics(a),
                        label=f"power({a!r})")


def finite_rank(k):
    k = int(k)
    if k < 1:
        raise DomainError("finite_rank(k) needs k >= 1")
    return SequenceData(np.ones(k), label=f"finite_rank({k})")


LOG_OSC_MAX_AMPLITUDE = 0.6


def log_oscillator(a=0.5):
    """Non-measurable example: phi_exp oscillates like 1 + a sin(log u)."""
    a = float(a)
    if not 0 <= a <= LOG_OSC_MAX_AMPLITUDE:
        raise DomainError(f"log_oscillator amplitude must lie in [0, {LOG_OSC_MAX_AMPLITUDE}]")
    t0 = math.e ** 2
    c = 2.0 * (1 + a * math.sin(math.log(2.0))) / t0

    def mu(t):
        t = np.asarray(t, dtype=np.float64)
        flat = np.atleast_1d(t)
        out = np.full(flat.shape, c)
        big = flat >= t0
        with np.errstate(invalid="ignore"):
            L = np.log(np.log(flat[big]))
            out[big] = np.where(np.isinf(flat[big]), 0.0, (1 + a * np.sin(L) + a * np.cos(L)) / flat[big])
        return out.reshape(t.shape)

    def primitive(t):
        t = np.asarray(t, dtype=np.float64)
        flat = np.atleast_1d(t)
        out = c * flat
        big = flat >= t0
        lt = np.log(flat[big])
        out[big] = (1 + a * np.sin(np.log(lt))) * lt
        return out.reshape(t.shape)

    def primitive_exp_large(u):
        lt = np.asarray(u, dtype=np.float64) + np.log1p(-np.exp(-np.asarray(u, dtype=np.float64)))
        return (1 + a * np.sin(np.log(lt))) * lt

    def power_integral(s):
        # in w = log t: int_2^inf (1 + a sin L + a cos L)^s e^{(1-s) w} dw, L = log w
        if s <= 1:
            raise TailBoundError(f"log_oscillator: sum of s_n^{s} diverges")
        head = c ** s * t0
        top = (1 + a * math.sqrt(2.0)) ** s
        W = 2.0 + math.log(top / ((s - 1) * 1e-9)) / (s - 1)

        def f(w):
            L = math.log(w)
            return (1 + a * math.sin(L) + a * math.cos(L)) ** s * math.exp((1 - s) * w)

        body, err = integrate(f, 2.0, W, epsrel=1e-12)
        tail = top * math.exp((1 - s) * W) / (s - 1)
        return head + body + 0.5 * tail, err + 0.5 * tail

    return AnalyticData(mu, primitive=primitive, primitive_exp_large=primitive_exp_large,
                        power_integral=power_integral, label=f"log_oscillator({a!r})")


FAMILIES = {
    "harmonic": (harmonic, 0),
    "power": (power, 1),
    "finite_rank": (finite_rank, 1),
    "log_oscillator": (log_oscillator, (0, 1)),
}

_SPEC = re.compile(r"^\s*([a-z_][a-z0-9_]*)\s*(?:\(([^()]*)\))?\s*$")


def parse_call(text):
    """``'name(1, 2.5)'`` -> ``('name', [1.0, 2.5])``."""
    m = _SPEC.match(text)
    if not m:
        raise InputError(f"cannot parse {text!r}; expected name or name(params)")
    name, args = m.group(1), m.group(2)
    params = []
    if args and args.strip():
        try:
            params = [float(p) for p in args.split(",")]
        except ValueError as exc:
            raise InputError(f"bad parameter list in {text!r}") from exc
    return name, params


def build_family(text, scale=1.0):
    """Instantiate a family from ``'power(1.5)'``-style text, optionally scaled."""
    name, params = parse_call(text)
    if name not in FAMILIES:
        raise InputError(f"unknown family {name!r}; known: {sorted(FAMILIES)}")
    factory, arity = FAMILIES[name]
    allowed = arity if isinstance(arity, tuple) else (arity,)
    if len(params) not in allowed:
        raise InputError(f"{name} takes {' or '.join(map(str, allowed))} parameter(s), got {len(params)}")
    try:
        x = factory(*params)
    except DomainError as exc:
        raise InputError(str(exc)) from exc
    return x if scale == 1.0 else ScaledData(x, scale)
