"""Closed-form worked examples, one or two per operation."""
import math

import numpy as np
import pytest

from singtrace import probes
from singtrace.analysis_core import (BoundedFunction, BoundedSequence, integer_averages,
                                     piecewise_linear_extension, restrict_to_integers)
from singtrace.convergence import cesaro_band, classify, ConvergenceClass, tauberian_derivative_bound
from singtrace.dixmier import heat_kernel_estimate, norming_identity_check, zeta_residue
from singtrace.errors import NotInSpaceError
from singtrace.families import EULER_GAMMA, finite_rank, harmonic
from singtrace.kappa_growth import (Restricted, dominated_growth_check, exponential_increase_check,
                                    psi_dichotomies, restricted_growth_check)
from singtrace.marcinkiewicz import (get_kappa, get_psi, marcinkiewicz_norm, weighted_mean,
                                     weighted_mean_on_clock)
from singtrace.singular_values import AnalyticData, decreasing_rearrangement

LOG1P = get_psi("log1p")


def test_rearrangement_examples():
    x = decreasing_rearrangement([(1, 2), (3, 1)])
    assert list(x.mu(np.array([0.0, 0.99, 1.0, 2.9, 3.0, 7.0]))) == [3, 3, 1, 1, 0, 0]
    y = decreasing_rearrangement([(2, 1), (2, 3)])
    assert list(y.mu(np.array([0.0, 3.99, 4.0]))) == [2, 2, 0]


def test_p_examples():
    assert piecewise_linear_extension(BoundedSequence.from_array([4.0] * 5))(0.5) == pytest.approx(2.0)
    assert piecewise_linear_extension(BoundedSequence.from_array([0.0, 1.0, 0.0, 0.0]))(1.5) == pytest.approx(0.5)


def test_r_and_E_examples():
    r = restrict_to_integers(BoundedFunction(lambda t: 1.0 / (1.0 + np.asarray(t)), 1.0, "decay"))
    assert [r(n) for n in (1, 2, 3)] == pytest.approx([1 / 2, 1 / 3, 1 / 4])
    ramp = BoundedFunction(lambda t: np.minimum(np.asarray(t, dtype=float), 10.0), 10.0, "ramp")
    E = integer_averages(ramp)
    assert [E(n) for n in (1, 2, 3)] == pytest.approx([0.5, 1.5, 2.5])
    wave = integer_averages(BoundedFunction(lambda t: np.sin(2 * np.pi * np.asarray(t)), 1.0, "wave"))
    assert max(abs(wave(n)) for n in range(1, 20)) < 1e-12


def test_weighted_mean_examples():
    assert weighted_mean(harmonic(), LOG1P, 3.0) == pytest.approx((11 / 6) / math.log(4), rel=1e-12)
    assert weighted_mean(finite_rank(5), LOG1P, 100.0) == pytest.approx(5 / math.log(101), rel=1e-12)


def test_constant_sequence_is_not_in_the_space():
    with pytest.raises(NotInSpaceError):
        marcinkiewicz_norm(AnalyticData(lambda t: np.ones_like(np.asarray(t, dtype=float)),
                                        primitive=lambda t: np.asarray(t, dtype=float), label="ones"),
                           LOG1P, 1e6)


def test_expm1_clock_profile():
    # phi(x)(e^10 - 1) ~ H_{e^10 - 1} / 10 ~ (10 + gamma) / 10
    val = weighted_mean_on_clock(harmonic(), LOG1P, get_kappa("expm1"), 10.0)
    assert val == pytest.approx((10 + EULER_GAMMA) / 10, abs=1e-4)


def test_cesaro_band_of_sin_log():
    band = cesaro_band(probes.sin_log(1.0, 1.0), 1e7)
    assert band.lo == pytest.approx(-math.sqrt(0.5), abs=2e-2)
    assert band.hi == pytest.approx(math.sqrt(0.5), abs=2e-2)
    assert classify(probes.sin_log(1.0, 1.0), 1e7).cls == ConvergenceClass.UNDETERMINED


def test_tauberian_constant_examples():
    assert tauberian_derivative_bound(probes.sin_log(1.0, 1.0), 1e6).H == pytest.approx(1.1, rel=0.02)
    assert tauberian_derivative_bound(probes.sin(1.0, 1.0), 1e5).H is None


def test_restricted_growth_examples():
    assert restricted_growth_check(get_kappa("exp"), LOG1P).verdict == Restricted.STRONG
    assert restricted_growth_check(get_kappa("exp"), get_psi("identity")).verdict == Restricted.FAIL
    assert restricted_growth_check(get_kappa("identity"), LOG1P).verdict == Restricted.STRONG


def test_dominated_growth_examples():
    assert dominated_growth_check(get_kappa("psi_inverse", LOG1P), LOG1P).constant == pytest.approx(1.1)
    # log(1 + e^{t^2}) ~ t^2, so the product tends to 2
    assert dominated_growth_check(get_kappa("exp_square"), LOG1P).constant == pytest.approx(2.2, rel=1e-3)
    assert dominated_growth_check(get_kappa("exp_exp"), LOG1P).constant is None


def test_exponential_increase_examples():
    assert exponential_increase_check(get_kappa("exp")).constant == pytest.approx(1.1 * math.log(2), rel=1e-6)
    assert exponential_increase_check(get_kappa("pow2t")).constant == pytest.approx(1.1, rel=1e-6)
    assert exponential_increase_check(get_kappa("identity")).constant is None


def test_psi_dichotomy_examples():
    d = psi_dichotomies(LOG1P)
    assert d.A.passed and d.B.passed and d.C.passed
    assert d.fitted_C == pytest.approx(1.0, abs=0.15)
    assert not psi_dichotomies(get_psi("pow", 0.5)).A.passed
    d2 = psi_dichotomies(get_psi("logpow", 2.0))
    assert d2.A.passed and d2.B.passed
    assert d2.fitted_C == pytest.approx(2.0, abs=0.3)


def test_zeta_and_heat_examples():
    z = zeta_residue(harmonic())
    assert z.value == pytest.approx(1.0, abs=1e-2)
    assert zeta_residue(finite_rank(3)).value == pytest.approx(0.0, abs=1e-3)
    h = heat_kernel_estimate(harmonic())
    assert h.value == pytest.approx(1.0, abs=1e-2)
    assert heat_kernel_estimate(harmonic().scaled(2.0)).value == pytest.approx(2.0, abs=2e-2)


def test_norming_identity_for_harmonic():
    rec = norming_identity_check(harmonic(), 1e6)
    assert rec["riesz"] == pytest.approx(1.0, abs=0.04)
    assert rec["delta"] >= -1e-2
