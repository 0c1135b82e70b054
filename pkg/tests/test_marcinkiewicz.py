"""Gauges, reparameterizations, weighted means, norm and Riesz seminorm."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from singtrace.errors import DomainError, NotInSpaceError
from singtrace.families import finite_rank, harmonic, log_oscillator, power
from singtrace.marcinkiewicz import (KAPPA_CATALOGUE, PSI_CATALOGUE, get_kappa, get_psi, kappa_perturbed,
                                     marcinkiewicz_norm, phi_derivative_bounds, riesz_seminorm,
                                     weighted_mean, weighted_mean_on_clock)
from singtrace.singular_values import AnalyticData

PSI = get_psi("log1p")
EXPM1 = get_kappa("expm1")


@pytest.mark.parametrize("name,param", [("identity", None), ("log1p", None), ("pow", 0.5), ("loglog", None),
                                        ("logpow", 0.5)])
def test_psi_catalogue_audits_clean(name, param):
    assert get_psi(name, param).audit() == []


@pytest.mark.parametrize("name", ["identity", "expm1", "log1p"])
def test_kappa_audit_clean(name):
    assert get_kappa(name).audit(t_max=20.0) == []


@pytest.mark.parametrize("name", ["exp", "pow2t"])
def test_unit_at_origin_fails_audit(name):
    assert any("kappa(0)" in p for p in get_kappa(name).audit())


def test_psi_inverse_composes_to_identity():
    psi = get_psi("pow", 0.5)
    k = get_kappa("psi_inverse", psi)
    t = np.geomspace(1e-3, 1e3, 20)
    assert np.allclose(psi(k(t)), t, rtol=1e-12)


def test_unknown_names():
    with pytest.raises(KeyError):
        get_psi("nope")
    with pytest.raises(KeyError):
        get_kappa("nope")
    with pytest.raises(DomainError):
        get_psi("pow", 1.5)


@given(st.sampled_from(sorted(set(KAPPA_CATALOGUE) - {"psi_inverse", "exp_exp", "exp_square"})),
       st.floats(0.05, 30.0))
def test_log_forms_agree(name, t):
    k = get_kappa(name)
    assert float(k.log_fn(np.array([t]))[0]) == pytest.approx(math.log(float(k(t))), rel=1e-10, abs=1e-12)
    assert float(k.clock(t)) == pytest.approx(math.log1p(float(k(t))), rel=1e-10)


@given(st.floats(0.1, 5.0), st.floats(0.1, 20.0))
@settings(max_examples=50)
def test_perturbed_elasticity_matches_finite_difference(b, t):
    k = kappa_perturbed(get_kappa("expm1"), b)
    h = 1e-6 * t
    fd = t * (math.log(float(k(t + h))) - math.log(float(k(t - h)))) / (2 * h)
    assert float(k.elasticity(np.array([t]))[0]) == pytest.approx(fd, rel=1e-5)


def test_harmonic_weighted_mean_oracle():
    x = harmonic()
    t = np.array([10.0, 1e3])
    expected = np.array([sum(1 / n for n in range(1, 11)) / math.log(11),
                         sum(1 / n for n in range(1, 1001)) / math.log(1001)])
    assert np.allclose(weighted_mean(x, PSI, t), expected, rtol=1e-13)
    with pytest.raises(DomainError):
        weighted_mean(x, PSI, 0.0)


def test_clock_form_matches_direct_form():
    x = harmonic()
    t = np.array([0.5, 2.0, 5.0])
    direct = weighted_mean(x, PSI, np.expm1(t))
    assert np.allclose(weighted_mean_on_clock(x, PSI, EXPM1, t), direct, rtol=1e-12)


def test_norm_of_harmonic_is_first_value_ratio():
    # phi decreases from 1/log 2 at t = 1 towards 1
    res = marcinkiewicz_norm(harmonic(), PSI, 1e4)
    assert res.value == pytest.approx(1 / math.log(2), rel=1e-9)


def test_norm_detects_non_membership():
    x = AnalyticData(lambda t: 1.0 / np.sqrt(np.maximum(np.asarray(t), 1.0)),
                     primitive=lambda t: np.where(np.asarray(t) < 1, t, 2 * np.sqrt(np.maximum(t, 1.0)) - 1),
                     label="sqrt")
    with pytest.raises(NotInSpaceError):
        marcinkiewicz_norm(x, PSI, 1e6)


def test_riesz_oracles():
    assert riesz_seminorm(harmonic(), PSI, 1e7, EXPM1).estimate == pytest.approx(1.0, abs=1e-5)
    # finite rank: phi = 3/u, so the window [1e5, 1e7] peaks at 3e-5
    assert riesz_seminorm(finite_rank(3), PSI, 1e7, EXPM1).estimate == pytest.approx(3e-5, rel=1e-9)
    osc = riesz_seminorm(log_oscillator(0.5), PSI, 1e7, EXPM1)
    assert osc.estimate == pytest.approx(1.5, abs=1e-3)


@given(st.floats(0.1, 10.0))
@settings(max_examples=20, deadline=None)
def test_norm_is_homogeneous(lam):
    x = power(1.5)
    a = marcinkiewicz_norm(x, PSI, 1e4).value
    b = marcinkiewicz_norm(x.scaled(lam), PSI, 1e4).value
    assert b == pytest.approx(lam * a, rel=1e-12)


def test_derivative_bounds_hold_for_harmonic():
    x = harmonic()
    norm = marcinkiewicz_norm(x, PSI, 1e4).value
    t = np.geomspace(1.5, 1e4, 40)
    lo, hi = phi_derivative_bounds(x, PSI, t, norm)
    h = 1e-7 * t
    d = (weighted_mean(x, PSI, t + h) - weighted_mean(x, PSI, t - h)) / (2 * h)
    assert np.all(d >= lo - 1e-6) and np.all(d <= hi + 1e-6)


def test_catalogues_are_named():
    assert set(PSI_CATALOGUE) >= {"identity", "log1p"}
    assert set(KAPPA_CATALOGUE) >= {"exp", "expm1", "identity", "pow2t"}
