"""Growth classes of reparameterizations and the large-t dichotomies of psi."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from singtrace.kappa_growth import (Restricted, classify_kappa, doubling_shift, dominated_growth_check,
                                    exponential_increase_check, log_psi_kappa, psi_dichotomies,
                                    restricted_growth_check)
from singtrace.marcinkiewicz import get_kappa, get_psi, kappa_perturbed

LOG1P = get_psi("log1p")
IDENTITY = get_psi("identity")


@pytest.mark.parametrize("kname", ["exp", "expm1", "pow2t"])
def test_exponential_kappas_against_log1p(kname):
    v = classify_kappa(get_kappa(kname), LOG1P)
    assert v.restricted == Restricted.STRONG
    assert v.dominated is not None
    assert v.exponential is not None


def test_exp_constants():
    v = classify_kappa(get_kappa("exp"), LOG1P)
    # log(1 + e^t) has elasticity below 1; the doubling shift tends to log 2
    assert v.dominated_sup == pytest.approx(1.0, abs=1e-6)
    assert v.exponential_shift == pytest.approx(math.log(2.0), rel=1e-6)


def test_identity_kappa_has_no_exponential_increase():
    v = classify_kappa(get_kappa("identity"), LOG1P)
    assert v.exponential is None
    assert exponential_increase_check(get_kappa("identity")).constant is None


@pytest.mark.parametrize("kname", ["exp", "expm1", "pow2t"])
def test_identity_psi_fails_restricted_growth(kname):
    v = classify_kappa(get_kappa(kname), IDENTITY)
    assert v.restricted == Restricted.FAIL
    assert v.dominated is None


def test_doubling_shift_oracle():
    k = get_kappa("pow2t")
    t = np.array([1.0, 5.0, 20.0])
    assert np.allclose(doubling_shift(k, t), 1.0, atol=1e-9)


def test_dominated_constant_of_power_product():
    # psi(kappa(t)) = t for (log1p, expm1): elasticity identically 1
    d = dominated_growth_check(get_kappa("expm1"), LOG1P)
    assert d.constant == pytest.approx(1.1, rel=1e-9)


@given(st.floats(0.01, 1e3), st.floats(1e-3, 1e3))
@settings(max_examples=100)
def test_growth_inequality_for_exp(t, T):
    k = get_kappa("exp")
    C = classify_kappa(k, LOG1P).dominated
    lhs = log_psi_kappa(LOG1P, k, np.array([t + T]))[0] - log_psi_kappa(LOG1P, k, np.array([t]))[0]
    assert lhs < C * math.log((t + T) / t)


@given(st.floats(0.1, 2.0))
@settings(max_examples=10, deadline=None)
def test_bounded_perturbation_keeps_classes(b):
    for kname in ("exp", "identity"):
        base = classify_kappa(get_kappa(kname), LOG1P)
        pert = classify_kappa(kappa_perturbed(get_kappa(kname), b), LOG1P)
        assert pert.restricted == base.restricted
        assert (pert.exponential is None) == (base.exponential is None)


def test_restricted_check_reports_strong_pass():
    r = restricted_growth_check(get_kappa("expm1"), LOG1P)
    assert r.verdict == Restricted.STRONG


@pytest.mark.parametrize("name,param,expected", [("log1p", None, True), ("loglog", None, True),
                                                 ("logpow", 2.0, True), ("identity", None, False),
                                                 ("pow", 0.5, False)])
def test_psi_dichotomies(name, param, expected):
    d = psi_dichotomies(get_psi(name, param))
    assert d.A.passed == expected
    assert d.B.passed == expected
    assert d.C.passed == expected
    if expected:
        # B passing makes 2^t a strongly restricted witness
        assert classify_kappa(get_kappa("pow2t"), get_psi(name, param)).restricted == Restricted.STRONG


def test_log1p_fitted_constant():
    d = psi_dichotomies(LOG1P)
    assert d.fitted_C == pytest.approx(1.0, abs=1e-3)
    assert d.r_squared > 0.999
