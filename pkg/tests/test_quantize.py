import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbita import quantize as qz
from orbita.errors import (LOutOfRange, NoStates, ParameterOutOfRange,
                           RootBracketFailure)
from orbita.poisson import WeightVector

PV = WeightVector(60, 20, 0)
small = st.integers(min_value=0, max_value=14)


@given(small, small)
def test_elliott_multiplicities_fill_the_irrep(lam, mu):
    total = sum(qz.elliott_d(lam, mu, L) * (2 * L + 1) for L in range(lam + mu + 1))
    assert total == qz.dimension(lam, mu)


@given(small, small, st.integers(0, 28))
def test_volume_and_parity_give_multiplicity(lam, mu, L):
    if L > lam + mu:
        assert qz.elliott_d(lam, mu, L) == 0
        return
    rec = qz.branching_d(lam, mu, L)
    assert rec.d_from_volume == rec.d
    assert rec.delta in (0, 1, 2, 3)


def test_branching_examples():
    r = qz.branching_d(40, 20, 1)
    assert (r.delta, r.d) == (3, 0)
    r = qz.branching_d(2, 1, 1)
    assert (r.delta, r.d) == (1, 1)
    assert qz.volume_closed(40, 20, 10) == 10
    assert qz.volume_closed(40, 20, 30) == 20
    assert qz.volume_closed(40, 20, 55) == 5
    with pytest.raises(ParameterOutOfRange):
        qz.branching_d(2, 1, 0.5)
    with pytest.raises(LOutOfRange):
        qz.volume_closed(2, 1, 4)


def test_u_s_values():
    assert qz.u_s(0, 0.3) == 0.0
    assert qz.u_s(1, 1.0) == 0.5
    assert qz.u_s(2, -1.0) == 0.5
    assert qz.u_s(3, 1.0) == 1.0
    with pytest.raises(ParameterOutOfRange):
        qz.u_s(1, 1.5)


def test_u_bar_reduces_for_even_weights():
    for L in range(0, 30):
        b = qz.delta_bits(40, 20, L)
        for s in (-1.0, 0.0, 1.0):
            assert qz.u_bar(40, 20, L, s) == qz.u_s(b["delta"], s)


@pytest.mark.parametrize("L", [5.0, 20.0, 33.0, 47.5, 59.0])
def test_quadrature_volume_matches_closed_form(L):
    assert qz.volume_Q(PV, L) == pytest.approx(qz.volume_closed_real(PV, L), abs=1e-7)


def test_volume_profile_is_monotone_and_invertible():
    prof = qz.VolumeProfile(PV, 25)
    Q = np.linspace(prof.qmin, prof.qmax, 40)
    V = np.array([prof(q) for q in Q])
    assert np.all(np.diff(V) > 0)
    assert prof.total == pytest.approx(20.0, abs=1e-8)
    for target in (0.3, 7.0, 19.9):
        assert prof(prof.inverse(target)) == pytest.approx(target, abs=1e-10)
    assert prof.inverse(0.0) == prof.qmin
    assert prof.inverse(prof.total) == prof.qmax
    with pytest.raises(RootBracketFailure):
        prof.inverse(25.0)


def test_volume_out_of_range():
    with pytest.raises(LOutOfRange):
        qz.volume_Q(PV, 50.0, Q=40.0)


def test_total_volume():
    assert qz.total_volume(PV) == 40 * 20 * 60 / 2
    assert qz.total_volume_quadrature(PV, 16) == pytest.approx(qz.total_volume(PV), rel=1e-6)


@pytest.mark.parametrize("s", [-1.0, 0.0, 1.0])
def test_levels_count_equal_multiplicity(s):
    L_values = [0, 2, 7, 21, 44, 59]
    tab = qz.bs_spectrum(PV, s, L_values=L_values)
    counts = tab.counts()
    for L in L_values:
        assert counts.get(L, 0) == qz.elliott_d(40, 20, L)
    for r in tab.rows:
        if r.L:
            lo, hi = qz.q_range(r.L, PV)
            assert lo <= r.Q <= hi


def test_levels_follow_volume_targets():
    rows = qz.bs_levels(PV, 10, 1.0)
    prof = qz.VolumeProfile(PV, 10)
    for r in rows:
        assert prof(r.Q) == pytest.approx(2 * (r.k + r.u - 1), abs=1e-9)
    assert [r.k for r in rows] == list(range(1, len(rows) + 1))


def test_no_states_raised():
    with pytest.raises(NoStates):
        qz.bs_levels(PV, 1, 0.0)


def test_singlet_sits_at_L0_limit():
    assert qz.L0_limit_Q(PV) == pytest.approx(23.854839, abs=1e-6)
    (row,) = qz.bs_levels(PV, 0, 1.0)
    assert row.Q == qz.L0_limit_Q(PV)


def test_quadrature_tolerance_from_environment(monkeypatch):
    monkeypatch.setenv("ORBITA_QUAD_TOL", "1e-6")
    assert qz.quad_tol() == 1e-6
    monkeypatch.setenv("ORBITA_QUAD_TOL", "-1")
    with pytest.raises(ParameterOutOfRange):
        qz.quad_tol()
    monkeypatch.delenv("ORBITA_QUAD_TOL")
    assert qz.quad_tol() == qz.DEFAULT_QUAD_TOL


def test_pi_sequence_members_and_gaps():
    pi = qz.pi_sequence(PV, 1)
    assert pi.q_limit == pytest.approx(23.854839, abs=1e-6)
    assert [m[:2] for m in pi.members[:3]] == [(4, 2), (8, 3), (12, 4)]
    assert pi.spread > 1e-3
    with pytest.raises(ParameterOutOfRange):
        qz.pi_sequence(PV, 0)


def test_gap_helper():
    assert qz.gap([(0, 1.0), (2, 2.0), (4, 1.0)]) == {2}
    assert qz.gap([(3, 1.0)]) == set()
