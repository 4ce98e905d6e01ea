"""Elliptic building blocks checked against scipy and direct quadrature."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from orbita.elliptic import (QuarticRootData, carlson_rc, carlson_rf, carlson_rj, ellipf,
                             ellipk, ellipk_flagged, ellippi, jacobi_am, jacobi_sn, legendre)
from orbita.errors import CharacteristicPole, OutsideClassicalRegion, ParameterOutOfRange

m_values = st.floats(min_value=0.0, max_value=0.999, allow_nan=False)
angles = st.floats(min_value=-1.5, max_value=1.5, allow_nan=False)


@given(m_values)
def test_K_matches_scipy(m):
    assert ellipk(m) == pytest.approx(special.ellipk(m), rel=1e-13)


@given(angles, m_values)
def test_F_matches_scipy(phi, m):
    assert ellipf(phi, m) == pytest.approx(special.ellipkinc(phi, m), rel=1e-12, abs=1e-15)


def test_F_beyond_half_period():
    m = 0.3
    for phi in (2.0, 4.5, -3.3):
        assert ellipf(phi, m) == pytest.approx(special.ellipkinc(phi, m), rel=1e-12)


@given(st.floats(min_value=-3.0, max_value=0.9), angles, m_values)
@settings(max_examples=40)
def test_Pi_matches_quadrature(n, phi, m):
    ref, _ = integrate.quad(lambda t: 1.0 / ((1 - n * math.sin(t) ** 2)
                                             * math.sqrt(1 - m * math.sin(t) ** 2)), 0.0, phi,
                            epsabs=1e-14, epsrel=1e-13)
    assert ellippi(n, phi, m) == pytest.approx(ref, rel=1e-10, abs=1e-13)


def test_carlson_special_values():
    # R_F(x, x, x) = x^-1/2, R_C(x, x) = x^-1/2, R_J(x, x, x, x) = x^-3/2
    assert carlson_rf(4.0, 4.0, 4.0) == pytest.approx(0.5)
    assert carlson_rc(9.0, 9.0) == pytest.approx(1.0 / 3.0)
    assert carlson_rj(2.0, 2.0, 2.0, 2.0) == pytest.approx(2.0 ** -1.5)
    # R_F(0, 1, 1) = pi / 2
    assert carlson_rf(0.0, 1.0, 1.0) == pytest.approx(math.pi / 2)


def test_K_large_period_branch():
    K, flag = ellipk_flagged(1 - 1e-14)
    assert flag
    assert K == pytest.approx(special.ellipk(1 - 1e-14), rel=1e-9)
    assert ellipk_flagged(1.0) == (math.inf, True)
    assert not ellipk_flagged(0.5)[1]


def test_parameter_errors():
    with pytest.raises(ParameterOutOfRange):
        ellipk(1.2)
    with pytest.raises(ParameterOutOfRange):
        jacobi_am(0.3, 1.5)
    with pytest.raises(ParameterOutOfRange):
        ellippi(0.2, 2.0, 0.3)
    with pytest.raises(CharacteristicPole):
        ellippi(2.0, 1.2, 0.3)
    with pytest.raises(ValueError):
        legendre("E", 0.3)


def test_legendre_dispatch():
    assert legendre("K", 0.2) == ellipk(0.2)
    assert legendre("F", 0.7, 0.2) == ellipf(0.7, 0.2)
    assert legendre("Pi", 0.1, 0.7, 0.2) == ellippi(0.1, 0.7, 0.2)


@given(angles, m_values)
def test_amplitude_inverts_F(phi, m):
    assert jacobi_am(ellipf(phi, m), m) == pytest.approx(phi, abs=1e-12)


@given(st.floats(min_value=-5, max_value=5), st.floats(min_value=0.0, max_value=0.99))
def test_sn_period_and_scipy(u, m):
    K = ellipk(m)
    assert jacobi_sn(u + 4 * K, m) == pytest.approx(jacobi_sn(u, m), abs=1e-11)
    assert jacobi_sn(u, m) == pytest.approx(special.ellipj(u, m)[0], abs=1e-12)


def test_am_limits():
    u = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(jacobi_am(u, 0.0), u)
    np.testing.assert_allclose(jacobi_am(u, 1.0), special.ellipj(u, 1.0)[3], atol=1e-14)


ROOT_CASES = [QuarticRootData(60.0, 20.0, 0.0, 10.0, -1),
              QuarticRootData(60.0, 20.0, 0.0, 30.0, 1),
              QuarticRootData(165.0, 115.0, 100.0, 110.0, -1)]


@pytest.mark.parametrize("R", ROOT_CASES)
def test_I_derivative_is_integrand(R):
    lo, hi = R.interval
    x = np.linspace(lo, hi, 9)[1:-1]
    h = 1e-5 * (hi - lo)
    dI = (R.I(x + h) - R.I(x - h)) / (2 * h)
    dJ = (R.J(x + h) - R.J(x - h)) / (2 * h)
    np.testing.assert_allclose(dI, [R.integrand(t, -1) for t in x], rtol=1e-7)
    np.testing.assert_allclose(dJ, [R.integrand(t, 1) for t in x], rtol=1e-7)


@pytest.mark.parametrize("R", ROOT_CASES)
def test_I_inverse_roundtrip(R):
    lo, hi = R.interval
    x = np.linspace(lo, hi, 21)
    np.testing.assert_allclose(R.I_inverse(R.I(x)), x, atol=1e-12 * hi)
    assert R.I(R.b) == 0.0
    assert R.J(R.b) == 0.0


@pytest.mark.parametrize("R", ROOT_CASES)
def test_factored_inverse_matches(R):
    a, b, c, _ = R._abcd
    y = np.linspace(-3.0, 3.0, 31) / math.sqrt(R.C)
    x, xa, xb, xc = R.I_inverse_factored(y)
    np.testing.assert_allclose(x, R.I_inverse(y), rtol=1e-13)
    np.testing.assert_allclose(xa, x - a, atol=1e-11 * abs(a))
    np.testing.assert_allclose(xb, x - b, atol=1e-11 * abs(a))
    np.testing.assert_allclose(xc, x - c, atol=1e-11 * abs(a))


def test_outside_interval_raises():
    R = ROOT_CASES[0]
    with pytest.raises(OutsideClassicalRegion):
        R.I(5.0)
    with pytest.raises(ValueError):
        QuarticRootData(3, 2, 1, 0, 0)
