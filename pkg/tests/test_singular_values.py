"""Singular-value containers, families and ingestion validation."""
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from singtrace.errors import DomainError, InputError
from singtrace.families import EULER_GAMMA, build_family, finite_rank, harmonic, log_oscillator, power
from singtrace.singular_values import (DirectSumData, SequenceData, SumData, decreasing_rearrangement,
                                       distribution_measure, validate_sequence)

pieces_st = st.lists(st.tuples(st.floats(0.0, 5.0), st.floats(0.01, 3.0)), min_size=1, max_size=8)


def test_harmonic_partial_sums_match_mpmath():
    x = harmonic()
    for n in (1, 10, 1000, 10**6, 10**9):
        exact = float(mpmath.harmonic(n))
        assert x.primitive(float(n)) == pytest.approx(exact, rel=1e-13)


def test_harmonic_large_clock_is_asymptotic():
    x = harmonic()
    u = 1e5
    assert x.primitive_exp(u) == pytest.approx(u + EULER_GAMMA, rel=1e-14)


def test_power_total_is_zeta():
    x = power(2.0)
    assert x.total() == pytest.approx(math.pi**2 / 6, rel=1e-10)


def test_finite_rank_primitive_is_piecewise_linear():
    x = finite_rank(3)
    assert x.primitive(np.array([0.5, 2.0, 3.0, 10.0])).tolist() == [0.5, 2.0, 3.0, 3.0]
    assert x.is_finite_rank()


def test_validate_sequence_reports_index():
    with pytest.raises(InputError, match="index 3"):
        validate_sequence([3.0, 2.0, 2.5])
    with pytest.raises(InputError, match="negative"):
        validate_sequence([1.0, -1.0])
    with pytest.raises(InputError):
        validate_sequence([])


def test_log_oscillator_amplitude_domain():
    with pytest.raises(DomainError):
        log_oscillator(0.9)
    x = log_oscillator(0.5)
    x.audit()


def test_build_family_scaling_and_errors():
    x = build_family("harmonic", 2.0)
    assert x.primitive(10.0) == pytest.approx(2 * float(mpmath.harmonic(10)), rel=1e-13)
    with pytest.raises(InputError):
        build_family("nope")
    with pytest.raises(InputError):
        build_family("power")


@given(pieces_st)
def test_rearrangement_preserves_distribution(pieces):
    x = decreasing_rearrangement(pieces)
    x.audit()
    for s in (0.0, 0.5, 1.0, 2.5):
        expected = distribution_measure(pieces, s)
        got = math.fsum(m for v, m in x.pieces if v > s)
        assert got == pytest.approx(expected, rel=1e-12, abs=1e-12)


@given(pieces_st, st.randoms(use_true_random=False))
def test_rearrangement_is_order_free(pieces, rnd):
    shuffled = list(pieces)
    rnd.shuffle(shuffled)
    a, b = decreasing_rearrangement(pieces), decreasing_rearrangement(shuffled)
    t = np.linspace(0, 20, 81)
    assert np.allclose(a.primitive(t), b.primitive(t), rtol=1e-13, atol=1e-13)


@given(st.lists(st.floats(0.0, 4.0), min_size=1, max_size=10),
       st.lists(st.floats(0.0, 4.0), min_size=1, max_size=10))
@settings(max_examples=40, deadline=None)
def test_direct_sum_of_finite_sequences_is_merge(a, b):
    xa = SequenceData(sorted(a, reverse=True))
    xb = SequenceData(sorted(b, reverse=True))
    merged = SequenceData(sorted(a + b, reverse=True))
    d = DirectSumData(xa, xb)
    t = np.arange(0, len(a) + len(b) + 2, dtype=np.float64)
    assert np.allclose(d.primitive(t), merged.primitive(t), rtol=1e-12, atol=1e-12)


def test_sum_data_is_pointwise():
    x = SumData(harmonic(), finite_rank(2))
    assert x.primitive(5.0) == pytest.approx(float(mpmath.harmonic(5)) + 2.0, rel=1e-13)


def test_heat_and_power_integrals_of_finite_rank():
    x = finite_rank(4)
    v, _ = x.power_integral(2.0)
    assert v == pytest.approx(4.0)
