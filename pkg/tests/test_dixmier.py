"""Trace reports: values, bands, rho_1 bounds and the zeta / heat cross-checks."""
import math

import pytest

from singtrace.convergence import ConvergenceClass
from singtrace.dixmier import (heat_kernel_estimate, phi_exp, theorem_constant, trace_analyze,
                               trace_band_bounds, zeta_residue)
from singtrace.errors import DomainError
from singtrace.families import build_family, finite_rank, harmonic, log_oscillator, power
from singtrace.singular_values import DirectSumData, SumData, decreasing_rearrangement


@pytest.fixture(scope="module")
def harmonic_report():
    return trace_analyze(harmonic(), 1e7)


def test_harmonic_trace(harmonic_report):
    r = harmonic_report
    assert r.measurable.cls == ConvergenceClass.S
    assert r.trace_value == pytest.approx(1.0, abs=1e-5)
    assert r.trace_value_extrapolated == pytest.approx(1.0, abs=1e-6)
    assert r.riesz == pytest.approx(1.0, abs=1e-5)
    assert r.riesz_stabilized


def test_harmonic_cross_checks(harmonic_report):
    assert harmonic_report.zeta_residue.value == pytest.approx(1.0, abs=1e-3)
    assert harmonic_report.heat_kernel.value == pytest.approx(1.0, abs=1e-6)


def test_log_oscillator_band():
    r = trace_analyze(log_oscillator(0.5), 1e7, cross_checks=False)
    assert r.trace_value is None
    assert r.measurable.cls == ConvergenceClass.UNDETERMINED
    # Cesaro mean of phi_exp = 1 + a sin(log u) swings by a / sqrt(2)
    half = 0.5 / math.sqrt(2.0)
    assert r.trace_band.lo == pytest.approx(1 - half, abs=2e-3)
    assert r.trace_band.hi == pytest.approx(1 + half, abs=2e-3)
    assert r.riesz == pytest.approx(1.5, abs=1e-3)
    assert r.riesz / (math.e * r.H_theorem) - 1e-2 <= r.trace_band.hi <= r.riesz + 1e-2


def test_summable_data_have_zero_trace():
    for x in (finite_rank(3), power(2.0), decreasing_rearrangement([(2.0, 0.5), (1.0, 1.5)])):
        r = trace_analyze(x, 1e7, cross_checks=False)
        assert r.trace_value == pytest.approx(0.0, abs=1e-5)


def test_scaling_is_linear():
    a = trace_analyze(harmonic(), 1e7, cross_checks=False)
    b = trace_analyze(build_family("harmonic", 2.5), 1e7, cross_checks=False)
    assert b.trace_value == pytest.approx(2.5 * a.trace_value, rel=1e-12)
    assert b.riesz == pytest.approx(2.5 * a.riesz, rel=1e-12)


def test_sum_is_additive():
    x = SumData(harmonic(), build_family("harmonic", 0.5))
    r = trace_analyze(x, 1e7, cross_checks=False)
    assert r.trace_value == pytest.approx(1.5, abs=1e-4)


@pytest.mark.slow
def test_direct_sum_is_additive():
    x = DirectSumData(harmonic(), decreasing_rearrangement([(2.0, 1.5)]))
    r = trace_analyze(x, 1e7, cross_checks=False)
    assert r.trace_value == pytest.approx(1.0, abs=1e-2)


def test_zeta_residue_oracles():
    assert zeta_residue(finite_rank(4)).value == pytest.approx(0.0, abs=1e-6)
    assert zeta_residue(build_family("harmonic", 3.0)).value == pytest.approx(3.0, abs=3e-3)
    with pytest.raises(DomainError):
        zeta_residue(harmonic(), (1.1, 1.2, 1.3))


def test_heat_estimate_handles_power_law_rate():
    # eps sum exp(-(eps n^a)^2) vanishes like eps^(1 - 1/a): not polynomial in eps
    assert heat_kernel_estimate(power(1.5)).value == pytest.approx(0.0, abs=2e-2)
    assert heat_kernel_estimate(power(3.0)).value == pytest.approx(0.0, abs=2e-3)


def test_theorem_constant_and_band_bounds():
    H = theorem_constant()
    assert H == pytest.approx(1.1, rel=1e-9)
    band, upper, lower, _ = trace_band_bounds(log_oscillator(0.5), 1e6)
    assert lower - 1e-2 <= band.hi <= upper + 1e-2


def test_phi_exp_starts_at_first_value():
    g = phi_exp(harmonic())
    assert g(0.0) == 1.0
    assert g(1e6) == pytest.approx(1.0, abs=1e-5)
