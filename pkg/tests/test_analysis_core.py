"""Structural maps p, r, E and the quadrature helpers."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from singtrace import probes
from singtrace.analysis_core import (BoundedFunction, BoundedSequence, adaptive_panels,
                                     cumulative_integral, integer_averages, integrate,
                                     panel_integrals, piecewise_linear_extension,
                                     restrict_to_integers, unit_integrals)
from singtrace.errors import BoundViolation, DomainError

finite = st.floats(min_value=-50, max_value=50, allow_nan=False, allow_infinity=False)
value_lists = st.lists(finite, min_size=1, max_size=25)


def test_p_interpolates_with_zero_start():
    alpha = BoundedSequence.from_array([2.0, -1.0, 3.0])
    p = piecewise_linear_extension(alpha)
    assert p(0.0) == 0.0
    assert p(0.5) == pytest.approx(1.0)
    assert p(1.0) == 2.0
    assert p(1.5) == pytest.approx(0.5)
    assert p(2.25) == pytest.approx(-1.0 + 0.25 * 4.0)
    assert p(10.0) == 0.0


def test_sequence_rejects_bad_indices():
    alpha = BoundedSequence.from_array([1.0])
    with pytest.raises(DomainError):
        alpha(0)
    with pytest.raises(DomainError):
        alpha(1.5)


def test_declared_bound_is_enforced():
    alpha = BoundedSequence.from_callable(lambda n: n, 3.0, "growing")
    assert alpha(3) == 3.0
    with pytest.raises(BoundViolation):
        alpha(4)


@given(value_lists)
def test_p_is_isometric(vals):
    alpha = BoundedSequence.from_array(vals)
    p = piecewise_linear_extension(alpha)
    t = np.linspace(0, len(vals) + 2, 401)
    assert np.max(np.abs(p(t))) <= max(abs(v) for v in vals) * (1 + 1e-12)
    nodes = np.arange(1, len(vals) + 1, dtype=np.float64)
    assert np.max(np.abs(p(nodes))) == max(abs(v) for v in vals)


@given(value_lists)
def test_r_is_left_inverse_of_p(vals):
    alpha = BoundedSequence.from_array(vals)
    n = np.arange(1, len(vals) + 4, dtype=np.float64)
    assert np.array_equal(restrict_to_integers(piecewise_linear_extension(alpha))(n), alpha(n))


@given(value_lists, st.integers(min_value=0, max_value=10))
def test_p_commutes_with_translation_from_one(vals, k):
    alpha = BoundedSequence.from_array(vals)
    t = np.linspace(1.0, len(vals) + 3.0, 97)
    lhs = piecewise_linear_extension(alpha.shift(k))(t)
    rhs = piecewise_linear_extension(alpha)(t + k)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1.0, max(abs(v) for v in vals))


@given(st.floats(-2, 2), st.floats(0.2, 3), st.floats(0, 1), st.integers(0, 8))
@settings(max_examples=60)
def test_E_commutes_with_translation(a, w, s, k):
    g = probes.sin_log(a, w)
    n = np.arange(1, 9, dtype=np.float64)
    lhs = integer_averages(g.shift(s + k))(n)
    rhs = integer_averages(g.shift(s)).shift(k)(n)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_E_matches_closed_form():
    g = probes.sin(1.0, 2.0)
    n = np.arange(1, 6, dtype=np.float64)
    exact = (np.cos(2 * (n - 1)) - np.cos(2 * n)) / 2
    assert np.allclose(integer_averages(g)(n), exact, atol=1e-13)


def test_unit_integrals_without_primitive():
    g = BoundedFunction(lambda t: np.sin(np.asarray(t)), 1.0)
    n = np.arange(1, 6, dtype=np.float64)
    exact = np.cos(n - 1) - np.cos(n)
    assert np.allclose(unit_integrals(g, n), exact, atol=1e-12)


def test_quadrature_oracles():
    assert integrate(np.exp, 0.0, 1.0)[0] == pytest.approx(math.e - 1, rel=1e-13)
    left = np.array([0.0, 1.0])
    right = np.array([1.0, 3.0])
    assert np.allclose(panel_integrals(np.square, left, right), [1 / 3, 26 / 3], rtol=1e-13)
    kink = adaptive_panels(lambda t: np.abs(t - 0.3), np.array([0.0]), np.array([1.0]))
    assert kink[0] == pytest.approx(0.045 + 0.245, abs=1e-12)
    grid = np.geomspace(1.0, 1e6, 50)
    cum = cumulative_integral(lambda t: 1.0 / t, grid, start_value=0.0)
    assert np.allclose(cum, np.log(grid), atol=1e-10)


def test_linearity_of_maps():
    a = BoundedSequence.from_array([1.0, 2.0, -3.0])
    b = BoundedSequence.from_array([0.5, -4.0, 1.0])
    t = np.linspace(0, 5, 41)
    pa, pb = piecewise_linear_extension(a), piecewise_linear_extension(b)
    assert np.allclose(piecewise_linear_extension(a + b)(t), pa(t) + pb(t), atol=1e-14)
