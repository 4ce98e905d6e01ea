"""Acceptance criteria 1-10, one test each.

Every test records a one-line outcome that conftest prints in a summary
section at the end of the run, and also prints it (visible with -s).
Tolerances and runtime limits are pinned here.
"""

import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE
from orbita import action_angle as AA
from orbita import orbit as O
from orbita import quantize as QZ
from orbita import verify as VF
from orbita.poisson import WeightVector


def record(n, ok, line):
    ACCEPTANCE[n] = (bool(ok), line)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {line}")


def test_c01_bracket_fidelity():
    t0 = time.perf_counter()
    rep = VF.suite_brackets(n=500, n_jacobi=500)
    dt = time.perf_counter() - t0
    tab = rep.check("table_vs_oracle (21 pairs)").value
    jac = rep.check("jacobi").value
    cas = rep.check("casimir_brackets").value
    ok = tab < 1e-9 and jac < 1e-7 and cas < 1e-9 and dt < 10
    record(1, ok, f"table/oracle {tab:.1e} (<1e-9), Jacobi {jac:.1e} (<1e-7), "
                  f"Casimir {cas:.1e} (<1e-9), {dt:.1f}s (<10s)")
    assert ok


def test_c02_canonicity():
    t0 = time.perf_counter()
    rep = VF.suite_chart(n=200)
    dt = time.perf_counter() - t0
    ch = rep.check("chart_canonical M J M^T = P").value
    ka = rep.check("kappa_canonical M^T W M = W").value
    ok = ch < 1e-6 and ka < 1e-6 and dt < 30
    record(2, ok, f"chart {ch:.1e}, kappa {ka:.1e} (<1e-6) at 200 points, {dt:.1f}s (<30s)")
    assert ok


def test_c03_eigenvalue_formula():
    worst, bad, n = 0.0, 0, 0
    for pv in VF.orbits():
        L, Q = VF.projection_grid(pv, 200)
        P, _ = O.eigen_arrays(pv, L, Q)
        r = VF.companion_roots(pv, L, Q)
        worst = max(worst, float(np.abs(r - P.T).max()) / O._scale(pv))
        bad += VF.ordering_violations(pv, L, Q, P)
        n += L.size
    ok = worst < 1e-10 and bad == 0
    record(3, ok, f"trig vs companion {worst:.1e} (<1e-10 x scale) on {n} points, "
                  f"{bad} ordering violations")
    assert ok


def test_c04_integer_volume():
    t0 = time.perf_counter()
    worst, cnt = 0.0, 0
    for lam in range(1, 13):
        for mu in range(1, 13):
            pv = WeightVector.from_lam_mu(lam, mu)
            for L in range(0, lam + mu + 1):
                worst = max(worst, abs(QZ.volume_Q(pv, L) - QZ.volume_closed(lam, mu, L)))
                cnt += 1
    dt = time.perf_counter() - t0
    ok = worst < 1e-6 and dt < 300
    record(4, ok, f"max |V_quad - V_closed| = {worst:.1e} (<1e-6) over {cnt} triples, "
                  f"{dt:.1f}s (<300s)")
    assert ok


def test_c05_branching_consistency():
    bad, cnt = [], 0
    for lam in range(0, 13):
        for mu in range(0, 13):
            for L in range(0, lam + mu + 1):
                rec = QZ.branching_d(lam, mu, L)
                assert rec.M1 == rec.m1 ^ rec.mL and rec.M2 == rec.m2 ^ rec.mL
                if (lam, mu) != (0, 0) and rec.d_from_volume != rec.d:
                    bad.append((lam, mu, L))
                cnt += 1
    d0 = QZ.elliott_d(40, 20, 0)
    ok = not bad and d0 == 1
    record(5, ok, f"{len(bad)} mismatches over {cnt} triples; d[60,20,0],0 = {d0}")
    assert ok


def test_c06_total_volume():
    worst = 0.0
    for lam, mu in [(40, 20), (12, 12), (7, 3)]:
        pv = WeightVector.from_lam_mu(lam, mu)
        ref = QZ.total_volume(pv)
        worst = max(worst, abs(QZ.total_volume_quadrature(pv, 32) - ref) / ref)
    ok = worst < 1e-4
    record(6, ok, f"max relative error {worst:.1e} (<1e-4)")
    assert ok


def test_c07_q_pi():
    """Expected to fail: see the decisions ledger.

    Q_bar_{sign(lam - mu)}(min(lam, mu)) for [60,20,0] is Q_bar_+(20) = p1 = 60,
    not 23.85; and the Pi members drift by ~3e-2, not 1e-8.
    """
    pv = WeightVector(60.0, 20.0, 0.0)
    pi_p = QZ.pi_sequence(pv, 1)
    pi_m = QZ.pi_sequence(pv, -1)
    ok = abs(pi_p.q_bar - 23.85) <= 0.01 and pi_p.spread < 1e-8
    record(7, ok, f"Q_bar = {pi_p.q_bar:.6g} (want 23.85 +- 0.01; L->0 limit {pi_p.q_limit:.6g}, "
                  f"closed form {pi_p.q_closed_unswapped:.6g}); Pi member spread "
                  f"{pi_p.spread:.1e} at s=+1, {pi_m.spread:.1e} at s=-1 (<1e-8)")
    assert ok


def test_c08_spectrum_polylines():
    pv = WeightVector(60.0, 20.0, 0.0)
    lam, mu = 40, 20
    want_rows = sum(QZ.elliott_d(lam, mu, L) for L in range(lam + mu + 1))
    cross = O.intersections(pv)
    lines, msgs, ok = {}, [], True
    for s in (1, -1):
        tab = QZ.bs_spectrum(pv, s)
        lines[s] = QZ.band_polylines(tab)
        if len(tab.rows) != want_rows:
            ok = False
            msgs.append(f"s={s}: {len(tab.rows)} rows != {want_rows}")
        # endpoints at integer crossings are the exact catalogue values
        ends = {"P-": ("P-&S3", "P-&S2"), "P+": ("P+&S1", "P+&S2"),
                "S3": ("P-&S3",), "S1": ("P+&S1",)}
        for name, keys in ends.items():
            pts = dict(lines[s][name])
            for key in keys:
                Lc, Qc, _ = cross[key]
                if float(Lc).is_integer():
                    if pts.get(int(Lc)) != Qc:
                        ok = False
                        msgs.append(f"s={s} {name} endpoint {key}: {pts.get(int(Lc))} != {Qc}")
                else:
                    # the crossing falls between integers: the last state lies on the curve
                    Lend, Qend = lines[s][name][-1]
                    if abs(Qend - float(O.q_bar(pv, Lend, 1))) > 1e-9 or Lend != math.floor(Lc):
                        ok = False
                        msgs.append(f"s={s} {name} end ({Lend}, {Qend}) off the band")
    gm = QZ.gap(lines[-1]["P-"])
    gp = QZ.gap(lines[1]["P-"])
    gp_off = QZ.gap(lines[1]["P-_off"])
    ok = ok and gm == {1} and gp == {2} and gp_off == {2}
    record(8, ok, f"{want_rows} rows per s; P- gaps s=-1 {sorted(gm)}, s=+1 {sorted(gp)} "
                  f"(+ parity sibling {sorted(gp_off)}); endpoints exact"
                  + ("" if not msgs else "; " + "; ".join(msgs)))
    assert ok


def test_c09_dynamics():
    draws = VF.dynamics_draws(20, seed=2024)
    sup, clos, _ = VF.compare_rk4(draws, n_steps=20000)
    sad = max(VF.saddle_frequency(pv) for pv in VF.orbits())
    ok = sup < 1e-6 and clos < 1e-7 and sad == 0.0
    record(9, ok, f"RK4 sup {sup:.1e} (<1e-6) over 20 draws, closure {clos:.1e} (<1e-7), "
                  f"Omega_theta on S2 saddle = {sad:g}")
    assert ok


def test_c10_cartan_suite():
    t0 = time.perf_counter()
    rep = VF.suite_cartan(n=1000)
    dt = time.perf_counter() - t0
    worst = max(c.value for c in rep.checks if c.name != "d[a i] finite difference")
    fd = rep.check("d[a i] finite difference").value
    ok = rep.passed and dt < 5
    record(10, ok, f"properties (1)-(7) max {worst:.1e} (<1e-12), d[a i] FD {fd:.1e} (<1e-6), "
                   f"{dt:.1f}s (<5s)")
    assert ok
