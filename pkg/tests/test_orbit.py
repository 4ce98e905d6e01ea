import math
import unittest

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbita import orbit as O
from orbita.errors import DegenerateOrbit, OutOfDomain, OutsideProjection, LOutOfRange
from orbita.poisson import WeightVector

PV = WeightVector(60, 20, 0)
PV_SWAP = WeightVector.from_lam_mu(15, 50, 100)


@st.composite
def chart_points(draw, pv=PV):
    seed = draw(st.integers(0, 2 ** 31))
    L, p, g = O.sample_chart_points(pv, 1, seed, margin=1e-3)[0]
    phi = draw(st.floats(0.0, 2 * math.pi, exclude_max=True))
    return float(L), float(p), phi, float(g)


@given(chart_points())
def test_chart_roundtrip(c):
    s = O.chart_forward(c, PV)
    assert O.casimir_residual(PV, s) < 1e-9
    back = O.chart_inverse(s, PV)
    np.testing.assert_allclose(back.as_array()[:4], c, atol=1e-9 * PV.L_max)


@given(chart_points(PV_SWAP))
@settings(max_examples=30)
def test_chart_roundtrip_swapped_orbit(c):
    back = O.chart_inverse(O.chart_forward(c, PV_SWAP), PV_SWAP)
    np.testing.assert_allclose(back.as_array()[:4], c, atol=1e-9 * PV_SWAP.p.max())


def test_out_of_domain_point_rejected():
    assert not O.in_domain(PV, 30.0, 59.0, 0.0)
    with pytest.raises(OutOfDomain):
        O.make_chart_point(PV, 30.0, 59.0, 0.0, 0.0)


@pytest.mark.parametrize("pv", [PV, WeightVector.from_lam_mu(50, 15, 100), PV_SWAP])
def test_eigenvalues_agree_with_companion_roots(pv):
    for L in np.linspace(0.5, pv.L_max - 0.5, 13):
        qmin, qmax = O.q_range(L, pv)
        for Q in np.linspace(qmin, qmax, 11)[1:-1]:
            e = O.eigenvalues(L, Q, pv)
            c = O.eigenvalues_companion(L, Q, pv)
            assert np.abs(e.P - c).max() < 1e-10 * pv.p.max()
            assert O.ordering_holds(e, pv)


def test_q_range_examples():
    assert O.q_range(10, PV) == (0, 60)
    lo, hi = O.q_range(50, PV)
    assert lo == pytest.approx(float(O.q_bar(PV, 50, -1)))
    assert hi == pytest.approx(float(O.q_bar(PV, 50, +1)))
    with pytest.raises(LOutOfRange):
        O.q_range(61, PV)
    with pytest.raises(OutsideProjection):
        O.eigenvalues(50, 30.0, PV)


def test_hfun():
    assert O.hfun(3, 1) == 4
    assert O.hfun(1, 4) == pytest.approx(4.0)


def test_det_matches_eigen_product():
    L, Q = 25.0, 33.0
    e = O.eigenvalues(L, Q, PV)
    assert np.prod(e.P) == pytest.approx(float(O.quadrupole_det(PV, L, Q)), rel=1e-12)


def test_kappa_of_s_and_log_limit():
    assert O.kappa_of_s(1.0) == 2.0
    assert O.kappa_of_s(0.0) == 0.0
    h0 = O.DetHamiltonian(PV, s=0.0)
    h_small = O.DetHamiltonian(PV, s=1e-9)
    # the s -> 0 member differs from the log limit by a constant only
    d1 = h_small(30, 25) - h0(30, 25)
    d2 = h_small(40, 10) - h0(40, 10)
    assert d1 == pytest.approx(d2, rel=1e-5)


class TestBands(unittest.TestCase):
    def test_layout_lam_above_mu(self):
        kinds = [(b.kind, b.tag) for b in O.band_list(PV)]
        self.assertIn(("S2", "unstable"), kinds)
        self.assertEqual(len(kinds), 6)
        P_plus = [b for b in O.band_list(PV) if b.kind == "P+"][0]
        self.assertAlmostEqual(P_plus.L_hi, 2 * math.sqrt(40 * 20))

    def test_layout_lam_below_mu(self):
        P_minus = [b for b in O.band_list(PV_SWAP) if b.kind == "P-"][0]
        self.assertAlmostEqual(P_minus.L_hi, 2 * math.sqrt(15 * 50))
        self.assertEqual(O.intersections(PV_SWAP)["P+&S2"][0], 65)

    def test_intersections_lie_on_both_bands(self):
        for name, (L, Q, _) in O.intersections(PV).items():
            for kind in name.split("&"):
                b = [b for b in O.band_list(PV) if b.kind == kind and b.tag != "unstable"][0]
                self.assertAlmostEqual(float(b.Q(L)), Q, delta=1e-9)

    def test_P_bands_are_stationary(self):
        for b in O.band_list(PV):
            if b.sigma:
                for L in np.linspace(b.L_lo + 0.5, b.L_hi - 0.5, 7):
                    self.assertLess(O.stationarity_residual(PV, b, L), 1e-5)

    def test_band_Q_is_chart_Q(self):
        k = O.kernels(PV)
        for b in O.band_list(PV):
            L = 0.5 * (b.L_lo + b.L_hi)
            self.assertAlmostEqual(float(k.Q_L(L, float(b.p(L)), float(b.gamma(L)))),
                                   float(b.Q(L)), delta=1e-9)

    def test_catalog_rows_and_degenerate(self):
        cat = O.band_catalog(PV)
        self.assertEqual(len(cat.rows(5)), 5 * len(cat))
        with self.assertRaises(DegenerateOrbit):
            O.band_catalog(WeightVector(3, 3, 0))
