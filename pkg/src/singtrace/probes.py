"""Named bounded functions and sequences with closed-form primitives.

Used by the ``band`` command and by the property corpus.  Each function
carries its derivative and primitive, so Cesaro means and integer averages
are exact up to rounding.
"""
from __future__ import annotations

import numpy as np

from .analysis_core import BoundedFunction, BoundedSequence, Smoothness
from .errors import InputError
from .families import parse_call


def const(c=1.0):
    return BoundedFunction.constant(c)


def decay(b=1.0):
    """b / (1 + t): S-convergent to 0."""
    b = float(b)
    return BoundedFunction(lambda t: b / (1.0 + np.asarray(t)), abs(b), Smoothness.DIFFERENTIABLE,
                           lambda t: -b / np.square(1.0 + np.asarray(t)),
                           lambda t: b * np.log1p(t), f"decay({b!r})")


def sin_log(a=1.0, w=1.0):
    """a sin(w log(1+t)): bounded Tauberian constant, Cesaro band of width 2a/sqrt(1+w^2)."""
    a, w = float(a), float(w)
    k = a / (1.0 + w * w)

    def prim(t):
        t = np.asarray(t, dtype=np.float64)
        L = np.log1p(t)
        return k * ((1.0 + t) * (np.sin(w * L) - w * np.cos(w * L)) + w)

    return BoundedFunction(lambda t: a * np.sin(w * np.log1p(t)), abs(a), Smoothness.DIFFERENTIABLE,
                           lambda t: a * w * np.cos(w * np.log1p(t)) / (1.0 + np.asarray(t)),
                           prim, f"sin_log({a!r}, {w!r})")


def sin(a=1.0, w=1.0):
    """a sin(w t): almost convergent to 0, not convergent."""
    a, w = float(a), float(w)
    return BoundedFunction(lambda t: a * np.sin(w * np.asarray(t)), abs(a), Smoothness.DIFFERENTIABLE,
                           lambda t: a * w * np.cos(w * np.asarray(t)),
                           lambda t: a * (1.0 - np.cos(w * np.asarray(t))) / w, f"sin({a!r}, {w!r})")


def zigzag(a=1.0):
    """a p((-1)^n): the piecewise-linear extension of an alternating sequence."""
    a = float(a)

    def parts(t):
        t = np.asarray(t, dtype=np.float64)
        n = np.floor(t)
        sgn = np.where(np.mod(n, 2.0) == 0, 1.0, -1.0)
        return t, n, sgn

    def fn(t):
        t, n, sgn = parts(t)
        first = t < 1
        return a * np.where(first, -t, sgn * (1.0 - 2.0 * (t - n)))

    def deriv(t):
        t, n, sgn = parts(t)
        return a * np.where(t < 1, -1.0, -2.0 * sgn)

    def prim(t):
        t, n, sgn = parts(t)
        f = t - n
        return a * np.where(t < 1, -0.5 * t * t, -0.5 + sgn * (f - f * f))

    return BoundedFunction(fn, abs(a), Smoothness.PIECEWISE_DIFFERENTIABLE, deriv, prim, f"zigzag({a!r})")


def combine(parts, label=None):
    """Sum of functions, keeping derivative and primitive when every part has them."""
    parts = list(parts)
    fns = [p.fn for p in parts]
    ders = [p.derivative for p in parts]
    prims = [p.primitive for p in parts]
    deriv = None if any(d is None for d in ders) else (lambda t: sum(np.asarray(d(t)) for d in ders))
    prim = None if any(q is None for q in prims) else (lambda t: sum(np.asarray(q(t)) for q in prims))
    return BoundedFunction(lambda t: sum(np.asarray(f(t), dtype=np.float64) for f in fns),
                           sum(p.declared_bound for p in parts), Smoothness.PIECEWISE_DIFFERENTIABLE,
                           deriv, prim, label or " + ".join(p.label for p in parts))


FUNCTIONS = {"const": (const, (1,)), "decay": (decay, (1,)), "sin_log": (sin_log, (1, 2)),
             "sin": (sin, (1, 2)), "zigzag": (zigzag, (1,))}


def seq_const(c=1.0):
    c = float(c)
    return BoundedSequence.from_callable(lambda n: np.full(np.shape(n), c), abs(c), f"const({c!r})")


def seq_alternating(a=1.0):
    a = float(a)
    return BoundedSequence.from_callable(lambda n: a * (1.0 - 2.0 * np.mod(n, 2.0)), abs(a),
                                         f"alternating({a!r})")


def seq_decay(b=1.0):
    b = float(b)
    return BoundedSequence.from_callable(lambda n: b / n, abs(b), f"decay({b!r})")


def seq_sin_log(a=1.0):
    a = float(a)
    return BoundedSequence.from_callable(lambda n: a * np.sin(np.log(n)), abs(a), f"sin_log({a!r})")


SEQUENCES = {"const": (seq_const, (1,)), "alternating": (seq_alternating, (1,)),
             "decay": (seq_decay, (1,)), "sin_log": (seq_sin_log, (1,))}


def _build(catalogue, kind, text):
    name, params = parse_call(text)
    if name not in catalogue:
        raise InputError(f"unknown {kind} {name!r}; known: {sorted(catalogue)}")
    factory, arity = catalogue[name]
    if params and len(params) not in arity:
        raise InputError(f"{kind} {name} takes {' or '.join(map(str, arity))} parameter(s)")
    return factory(*params)


def build_function(text) -> BoundedFunction:
    """``'sin_log(0.5, 2)'`` -> a :class:`BoundedFunction`."""
    return _build(FUNCTIONS, "function", text)


def build_sequence(text) -> BoundedSequence:
    return _build(SEQUENCES, "sequence", text)


def random_function(rng):
    """A random sum of catalogue functions, kept clear of the tolerance scale.

    Oscillating parts get amplitudes of at least 0.1 or at most 1e-3, so no
    finite-horizon test sits on the edge of a 1e-2 tolerance.
    """
    parts = [const(rng.uniform(-1, 1)), decay(rng.uniform(-2, 2))]

    def amp():
        return rng.uniform(0.1, 1.0) if rng.random() < 0.6 else rng.uniform(0.0, 1e-3)

    if rng.random() < 0.5:
        parts.append(sin_log(amp(), rng.uniform(0.5, 2.0)))
    if rng.random() < 0.4:
        parts.append(sin(amp(), rng.uniform(0.5, 3.0)))
    if rng.random() < 0.3:
        parts.append(zigzag(amp()))
    return combine(parts)
