"""Action-angle map, flow and body-frame quantities."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbita import action_angle as A
from orbita import orbit as O
from orbita.errors import BoundaryState, OutsideProjection, ParameterOutOfRange
from orbita.poisson import WeightVector

PV = WeightVector(60, 20, 0)
H = A.HamiltonianSpec(PV)


@st.composite
def interior_points(draw):
    seed = draw(st.integers(0, 2 ** 31))
    L, p, g = O.sample_chart_points(PV, 1, seed, margin=1e-2)[0]
    phi = draw(st.floats(0.0, 2 * math.pi, exclude_max=True))
    return float(L), float(p), phi, float(g)


@given(interior_points())
def test_kappa_roundtrip(c):
    a = A.kappa_forward(c, PV)
    assert -a.Delta < a.theta <= a.Delta
    back = A.kappa_inverse(a, PV)
    assert back.p == pytest.approx(c[1], abs=1e-9 * 60)
    assert back.gamma == pytest.approx(c[3], abs=1e-8)
    d = (back.phi - c[2] + math.pi) % (2 * math.pi) - math.pi
    assert abs(d) < 1e-8


@given(interior_points())
@settings(max_examples=15)
def test_kappa_is_canonical(c):
    assert A.symplectic_defect(PV, *c) < 1e-6


def test_turning_point_is_flagged_in_strict_mode():
    with pytest.raises(BoundaryState):
        A.kappa_forward((30.0, 25.0, 1.0, 0.0), PV, strict=True)
    a = A.kappa_forward((30.0, 25.0, 1.0, 0.0), PV)
    assert a.theta == pytest.approx(0.0, abs=1e-12) or a.theta == pytest.approx(a.Delta)


def test_separatrix_has_no_torus():
    with pytest.raises(OutsideProjection):
        A.torus_data(30.0, 20.0, PV)


def test_reduce_theta_window():
    t = A.reduce_theta(np.array([-3.0, -1.0, 0.0, 1.0, 5.0]), 1.0)
    assert np.all(t > -1.0) and np.all(t <= 1.0)
    assert A.reduce_theta(-1.0, 1.0) == 1.0


class TestFlow:
    c0 = (30.0, 25.0, 1.0, 0.3)

    def test_trajectory_closes_after_one_period(self):
        a = A.kappa_forward(self.c0, PV)
        T = A.period(a.L, a.Q, H)
        tr = A.trajectory(self.c0, H, [0.0, 0.5 * T, T])
        assert tr["p"][-1] == pytest.approx(self.c0[1], abs=1e-9)
        assert tr["gamma"][-1] == pytest.approx(self.c0[3], abs=1e-9)
        assert np.ptp(tr["E"]) == 0.0

    def test_frequency_matches_period(self):
        a = A.kappa_forward(self.c0, PV)
        T = A.period(a.L, a.Q, H)
        assert A.omega_theta(a.L, a.Q, H) * T == pytest.approx(2 * math.pi, rel=1e-12)

    def test_closed_form_agrees_with_rk4(self):
        a = A.kappa_forward(self.c0, PV)
        T = A.period(a.L, a.Q, H)
        om = float(H.omega_L(a.L))
        ref = A.rk4_oracle(PV, a.L, self.c0[1], self.c0[3], om, T, n_steps=4000, n_out=40)
        tr = A.trajectory(self.c0, H, ref["t"])
        assert np.abs(ref["p"][:, 0] - tr["p"]).max() < 1e-6
        assert np.abs(ref["gamma"][:, 0] - tr["gamma"]).max() < 1e-6

    def test_custom_omega(self):
        Hc = A.HamiltonianSpec(PV, omega_fn=lambda L: 0.01 * np.asarray(L) ** 3)
        assert float(Hc.domega_L(2.0)) == pytest.approx(0.12, rel=1e-6)


def test_invalid_hamiltonian_parameters():
    with pytest.raises(ParameterOutOfRange):
        A.HamiltonianSpec(PV, r=3.0)
    with pytest.raises(ParameterOutOfRange):
        A.HamiltonianSpec(PV, s=-1.0)


@pytest.mark.parametrize("L,Q", [(30.0, 7.25), (30.0, 30.0), (55.0, 19.0)])
def test_bodyframe_squares_sum_to_L2(L, Q):
    td = A.torus_data(L, Q, PV)
    th = np.linspace(-td.Delta, td.Delta, 17)
    m = A.bodyframe_momenta(L, Q, th, PV)
    np.testing.assert_allclose((m ** 2).sum(-1), L * L, rtol=1e-9)


def test_wobbling_frequency_vanishes_on_saddle():
    band = [b for b in O.band_list(PV) if b.tag == "unstable"][0]
    L = np.linspace(1.0, band.L_hi - 1.0, 5)
    assert np.all(A.wobbling_frequency(band, PV, L, H) == 0.0)
    stable = [b for b in O.band_list(PV) if b.kind == "S1"][0]
    assert np.all(A.wobbling_frequency(stable, PV, np.array([5.0, 10.0]), H) > 0)


def test_generating_function_derivative_is_minus_gamma():
    a = A.kappa_forward((30.0, 25.0, 1.0, 0.3), PV)
    h = 1e-5
    S = lambda p: A.generating_function(PV, a.L, a.Q, p, 1)  # noqa: E731
    assert (S(25 + h) - S(25 - h)) / (2 * h) == pytest.approx(-0.3, abs=1e-8)
