import unittest

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbita import orbit as O
from orbita.errors import DegenerateOrbit, ZeroAngularMomentum
from orbita.poisson import (GENERATORS, PRINTED_TABLE_CONFLICTS, ReducedState, WeightVector,
                            angular_momentum, casimirs, element, full_bracket,
                            full_poisson_matrix, jacobi_residual, oracle_tensor,
                            printed_table_tensor, quadrupole, real_basis,
                            reduced_bracket_oracle, reduced_bracket_table, table_tensor,
                            u3_from_particles)


def random_states(pv, n, seed):
    rng = np.random.default_rng(seed)
    pts = O.sample_chart_points(pv, n, rng, margin=1e-4)
    return [O.chart_forward((L, p, rng.uniform(0, 6.28), g), pv) for L, p, g in pts]


class TestWeightVector(unittest.TestCase):
    def test_symmetric_functions(self):
        pv = WeightVector(60, 20, 0)
        self.assertEqual(pv.lam, 40)
        self.assertEqual(pv.mu, 20)
        self.assertEqual(pv.S1, 80)
        self.assertEqual(pv.S2, 4000)
        self.assertEqual(pv.L_max, 60)
        self.assertTrue(pv.is_integral())
        self.assertAlmostEqual(float(pv.G(pv.p2)), 0.0)

    def test_from_lam_mu(self):
        pv = WeightVector.from_lam_mu(50, 15, 100)
        np.testing.assert_array_equal(pv.p, [165, 115, 100])

    def test_degenerate_weights_raise(self):
        with self.assertRaises(DegenerateOrbit):
            WeightVector(1, 1, 0)
        with self.assertRaises(DegenerateOrbit):
            WeightVector(0, 1, 2)


class TestReducedBracket(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.pv = WeightVector(60, 20, 0)
        cls.states = random_states(cls.pv, 100, 5)

    def test_antisymmetry(self):
        for s in self.states[:20]:
            for T in (oracle_tensor(s), table_tensor(s)):
                np.testing.assert_allclose(T, -T.T, atol=1e-12)

    def test_table_matches_oracle(self):
        for s in self.states:
            Po, Pt = oracle_tensor(s), table_tensor(s)
            self.assertLess(np.abs(Po - Pt).max() / max(1, np.abs(Po).max()), 1e-9)

    def test_q1_q2_single_entry(self):
        s = self.states[0]
        a = reduced_bracket_oracle(s, "q1", "q2")
        b = reduced_bracket_table(s, 1.0, "q1", "q2")
        self.assertAlmostEqual(a, b, delta=1e-10 * max(1, abs(a)))

    def test_printed_table_conflicts_are_exactly_the_listed_entries(self):
        s = self.states[3]
        D = np.abs(printed_table_tensor(s) - oracle_tensor(s)) > 1e-9 * np.abs(oracle_tensor(s)).max()
        idx = {g: i for i, g in enumerate(GENERATORS)}
        listed = {frozenset((idx[a], idx[b])) for a, b, _ in PRINTED_TABLE_CONFLICTS}
        found = {frozenset((i, j)) for i, j in zip(*np.nonzero(D))}
        self.assertEqual(found, listed)

    def test_jacobi(self):
        for s in self.states[:15]:
            self.assertLess(jacobi_residual(s), 1e-7)
            self.assertLess(jacobi_residual(s, table_tensor), 1e-7)

    def test_casimirs_are_orbit_invariants(self):
        for s in self.states:
            C = casimirs(s)
            for k, c in enumerate(C, start=1):
                self.assertAlmostEqual(c / self.pv.S(k), 1.0, delta=1e-11)

    def test_zero_L_raises(self):
        with self.assertRaises(ZeroAngularMomentum):
            table_tensor(np.array([0.0, 1, 2, 3, 0.1, 0.2, 0.3]))

    def test_structure_parameter_range(self):
        with self.assertRaises(ValueError):
            reduced_bracket_table(self.states[0], 1.5, "q1", "q2")


def test_reduced_state_matrix_roundtrip():
    s = ReducedState(3.0, 1.0, -2.0, 0.5, 0.1, 0.2, -0.7)
    t = ReducedState.from_matrix(s.matrix())
    np.testing.assert_allclose(t.as_array(), s.as_array())
    np.testing.assert_allclose(angular_momentum(s.matrix()), [0, 0, 3.0])
    assert s.R2 == pytest.approx(0.05)


@given(st.integers(min_value=0, max_value=10_000))
def test_full_bracket_antisymmetric_and_G0_contraction(seed):
    rng = np.random.default_rng(seed)
    A = element(rng.normal(size=3), (lambda M: M + M.T)(rng.normal(size=(3, 3))))
    P = full_poisson_matrix(A)
    np.testing.assert_allclose(P, -P.T, atol=1e-12)
    basis = real_basis()
    for a in basis[3:]:
        for b in basis[3:]:
            assert abs(full_bracket(A, a, b, G=0.0)) < 1e-12


def test_particles_give_hermitian_element():
    rng = np.random.default_rng(1)
    x, p, m = rng.normal(size=(5, 3)), rng.normal(size=(5, 3)), rng.uniform(1, 2, 5)
    A = u3_from_particles(x, p, m, 0.7)
    assert np.abs(A - A.conj().T).max() < 1e-12
    # L from the matrix equals the centre-of-mass-subtracted sum of x cross p
    X = (m[:, None] * x).sum(0) / m.sum()
    P = p.sum(0)
    Ldirect = np.cross(x, p).sum(0) - np.cross(X, P)
    np.testing.assert_allclose(angular_momentum(A), Ldirect, atol=1e-12)
    Q = quadrupole(A)
    np.testing.assert_allclose(Q, Q.T)
