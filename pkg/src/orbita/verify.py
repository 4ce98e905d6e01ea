"""Invariant suites behind ``orbita verify`` and the acceptance tests.

Each suite returns a :class:`SuiteReport` holding named checks with their
largest residual and the tolerance it was held to.  Sample sizes default to
the acceptance values; ``quick=True`` trims the slow sweeps.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import action_angle as AA
from . import cartan as CT
from . import orbit as O
from . import poisson as PA
from . import quantize as QZ
from .poisson import WeightVector

#: default tolerances; every key can be overridden from the command line
TOLERANCES = {
    "bracket_table": 1e-9,
    "jacobi": 1e-7,
    "casimir_bracket": 1e-9,
    "cartan_identity": 1e-12,
    "cartan_fd": 1e-6,
    "chart_roundtrip": 1e-9,
    "chart_canonical": 1e-6,
    "kappa_canonical": 1e-6,
    "kappa_roundtrip": 1e-9,
    "eigen_roots": 1e-10,
    "volume": 1e-6,
    "total_volume": 1e-4,
    "rk4": 1e-6,
    "closure": 1e-7,
}


def orbits() -> list:
    """Test orbits: the (40, 20) multiplet and the lam <-> mu pair with p3 = 100."""
    return [WeightVector(60.0, 20.0, 0.0),
            WeightVector.from_lam_mu(50, 15, 100),
            WeightVector.from_lam_mu(15, 50, 100)]


@dataclass
class Check:
    name: str
    value: float
    tol: float
    n: int = 0
    exact: bool = False

    @property
    def passed(self) -> bool:
        if self.exact:
            return self.value == 0
        return bool(np.isfinite(self.value)) and self.value <= self.tol

    def as_dict(self) -> dict:
        return {"name": self.name, "max_residual": float(self.value), "tol": self.tol,
                "samples": self.n, "passed": self.passed}


@dataclass
class SuiteReport:
    suite: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "seconds": round(self.seconds, 3),
                "checks": [c.as_dict() for c in self.checks]}


def _tol(tols, key):
    return (tols or {}).get(key, TOLERANCES[key])


# ---------------------------------------------------------------------------
# brackets
# ---------------------------------------------------------------------------

_DB = np.zeros((7, 3, 3), dtype=complex)
for _k in range(7):
    _e = np.zeros(7)
    _e[_k] = 1.0
    _DB[_k] = PA.ReducedState.from_array(_e).matrix()


def casimir_gradients(s) -> np.ndarray:
    """Exact gradients of C1, C2, C3 in the seven generators (rows)."""
    B = PA.ReducedState.from_array(s).matrix() if not isinstance(s, PA.ReducedState) else s.matrix()
    B2 = B @ B
    g1 = np.real(np.einsum("kii->k", _DB))
    g2 = 2 * np.real(np.einsum("ij,kji->k", B, _DB))
    g3 = 3 * np.real(np.einsum("ij,kji->k", B2, _DB))
    return np.stack([g1, g2, g3])


def on_orbit_states(pv: WeightVector, n: int, seed: int) -> list:
    rng = np.random.default_rng(seed)
    pts = O.sample_chart_points(pv, n, rng, margin=1e-4)
    phis = rng.uniform(0, 2 * math.pi, n)
    return [O.chart_forward((L, p, ph, g), pv) for (L, p, g), ph in zip(pts, phis)]


def suite_brackets(n: int = 500, n_jacobi: int = 60, seed: int = 1, tols=None, quick=False) -> SuiteReport:
    t0 = time.perf_counter()
    if quick:
        n, n_jacobi = 100, 20
    rep = SuiteReport("brackets")
    obs = orbits()
    per = [n // len(obs) + (i < n % len(obs)) for i in range(len(obs))]
    states = [s for pv, m in zip(obs, per) for s in on_orbit_states(pv, m, seed)]
    worst_tab, worst_cas, worst_jac = 0.0, 0.0, 0.0
    for j, s in enumerate(states):
        Po = PA.oracle_tensor(s)
        Pt = PA.table_tensor(s)
        scale = max(1.0, float(np.abs(Po).max()))
        worst_tab = max(worst_tab, float(np.abs(Po - Pt).max()) / scale)
        gC = casimir_gradients(s)
        gscale = scale * float(np.abs(gC).max(axis=1).max())
        worst_cas = max(worst_cas, float(np.abs(gC @ Po).max()) / gscale,
                        float(np.abs(gC @ Pt).max()) / gscale)
        if j < n_jacobi:
            worst_jac = max(worst_jac, PA.jacobi_residual(s, PA.table_tensor))
    rep.checks += [Check("table_vs_oracle (21 pairs)", worst_tab, _tol(tols, "bracket_table"), len(states)),
                   Check("jacobi", worst_jac, _tol(tols, "jacobi"), min(n_jacobi, len(states))),
                   Check("casimir_brackets", worst_cas, _tol(tols, "casimir_bracket"), len(states))]
    rep.seconds = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# Cartan model and appendix
# ---------------------------------------------------------------------------

def suite_cartan(n: int = 1000, seed: int = 2, tols=None, quick=False) -> SuiteReport:
    t0 = time.perf_counter()
    if quick:
        n = 200
    rng = np.random.default_rng(seed)
    worst = {}
    fd, g1, g2, psi = 0.0, 0.0, 0.0, 0.0
    count = 0
    while count < n:
        x = rng.normal(size=3) * rng.uniform(0.1, 50)
        a = rng.normal(size=3)
        eps = 1 if rng.random() < 0.5 else -1
        r = np.linalg.norm(x)
        if (x[2] + r) < 1e-3 * r or (eps * x[2] + r) < 1e-2 * r:
            continue
        count += 1
        for k, v in CT.cartan_properties(x, a).items():
            worst[k] = max(worst.get(k, 0.0), v)
        co = CT.appendix_coeffs(x, eps * r)
        J = CT.cartan_jacobian_fd(x, eps)
        pred = np.stack([co.dcartan(np.eye(3)[c]) for c in range(3)])
        pred_f = np.stack([co.dcartan_frame(np.eye(3)[c]) for c in range(3)])
        sc = max(1.0, float(np.abs(J).max()))
        fd = max(fd, float(np.abs(J - pred).max()) / sc, float(np.abs(J - pred_f).max()) / sc)
        c1, c2 = CT.gamma_contractions(co)
        g1 = max(g1, float(np.abs(c1 - co.Gamma1).max()) / max(1e-300, float(np.abs(c1).max())))
        g2 = max(g2, float(np.abs(c2 - co.Gamma2).max()) / max(1e-300, float(np.abs(c2).max())))
    rep = SuiteReport("cartan")
    tol = _tol(tols, "cartan_identity")
    for k in sorted(worst):
        rep.checks.append(Check(k, worst[k], tol, n))
    rep.checks += [Check("d[a i] finite difference", fd, _tol(tols, "cartan_fd"), n),
                   Check("Gamma1 contraction", g1, tol, n),
                   Check("Gamma2 contraction", g2, tol, n)]
    rep.seconds = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# chart and action-angle canonicity
# ---------------------------------------------------------------------------

#: relative distance (in units of scale^2) from the chart domain boundary
#: that counts as interior for the canonicity checks; the chart has
#: square-root behaviour at the boundary, which finite differences cannot resolve
INTERIOR_MARGIN = 1e-2

#: Poisson tensor of the chart (L, p, phi, gamma): {phi, L} = {gamma, p} = 1
CHART_TENSOR = np.array([[0.0, 0.0, -1.0, 0.0],
                         [0.0, 0.0, 0.0, -1.0],
                         [1.0, 0.0, 0.0, 0.0],
                         [0.0, 1.0, 0.0, 0.0]])


def chart_jacobian(pv: WeightVector, c, h: float = 1e-6) -> np.ndarray:
    """7x4 central-difference Jacobian of the chart map at (L, p, phi, gamma)."""
    c = np.asarray(c, float)
    M = np.empty((7, 4))
    for k in range(4):
        hk = h * max(1.0, abs(c[k]))
        e = np.zeros(4)
        e[k] = hk
        M[:, k] = (O.chart_forward(tuple(c + e), pv).as_array()
                   - O.chart_forward(tuple(c - e), pv).as_array()) / (2 * hk)
    return M


def chart_poisson_defect(pv: WeightVector, c) -> float:
    """max |M J M^T - P| / max |P|: the chart pushes the canonical tensor onto the bracket."""
    M = chart_jacobian(pv, c)
    P = PA.oracle_tensor(O.chart_forward(tuple(c), pv))
    return float(np.abs(M @ CHART_TENSOR @ M.T - P).max() / max(1.0, np.abs(P).max()))


def suite_chart(n: int = 200, seed: int = 3, tols=None, quick=False) -> SuiteReport:
    t0 = time.perf_counter()
    if quick:
        n = 50
    rng = np.random.default_rng(seed)
    rt, can, kap, krt = 0.0, 0.0, 0.0, 0.0
    obs = orbits()
    for j in range(n):
        pv = obs[j % len(obs)]
        (L, p, g), = O.sample_chart_points(pv, 1, rng, margin=INTERIOR_MARGIN)
        phi = rng.uniform(-math.pi, math.pi)
        s = O.chart_forward((L, p, phi, g), pv)
        back = O.chart_inverse(s, pv)
        sc = O._scale(pv)
        dphi = (back.phi - phi + math.pi) % (2 * math.pi) - math.pi
        rt = max(rt, abs(back.p - p) / sc, abs(back.gamma - g), abs(dphi))
        can = max(can, chart_poisson_defect(pv, (L, p, phi, g)))
        kap = max(kap, AA.symplectic_defect(pv, L, p, phi, g))
        a = AA.kappa_forward((L, p, phi, g), pv)
        c = AA.kappa_inverse(a, pv)
        dphi = (c.phi - phi + math.pi) % (2 * math.pi) - math.pi
        krt = max(krt, abs(c.p - p) / sc, abs(c.gamma - g), abs(dphi))
    rep = SuiteReport("chart")
    rep.checks += [Check("chart_roundtrip", rt, _tol(tols, "chart_roundtrip"), n),
                   Check("chart_canonical M J M^T = P", can, _tol(tols, "chart_canonical"), n),
                   Check("kappa_canonical M^T W M = W", kap, _tol(tols, "kappa_canonical"), n),
                   Check("kappa_roundtrip", krt, _tol(tols, "kappa_roundtrip"), n)]
    rep.seconds = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# eigenvalues
# ---------------------------------------------------------------------------

def projection_grid(pv: WeightVector, n: int = 200) -> tuple:
    """Cell-centred n x n grid of the projected domain: L in (0, L_max), Q in (Q_min, Q_max)."""
    Ls = pv.L_max * (np.arange(n) + 0.5) / n
    u = (np.arange(n) + 0.5) / n
    L, Q = [], []
    for x in Ls:
        a, b = O.q_range(float(x), pv)
        L.append(np.full(n, x))
        Q.append(a + (b - a) * u)
    return np.concatenate(L), np.concatenate(Q)


def companion_roots(pv: WeightVector, L, Q) -> np.ndarray:
    """Descending roots of G(P) + (P - Q) L^2 / 4 by batched companion eigenvalues."""
    L = np.asarray(L, float)
    Q = np.asarray(Q, float)
    c = np.poly(pv.p)
    M = np.zeros(L.shape + (3, 3))
    M[..., 0, 0] = -c[1]
    M[..., 0, 1] = -(c[2] + 0.25 * L * L)
    M[..., 0, 2] = -(c[3] - 0.25 * Q * L * L)
    M[..., 1, 0] = 1.0
    M[..., 2, 1] = 1.0
    return np.sort(np.linalg.eigvals(M).real, axis=-1)[..., ::-1]


def ordering_violations(pv: WeightVector, L, Q, P, tol: float = 1e-9) -> int:
    p1, p2, p3 = pv.p
    t = tol * O._scale(pv)
    P1, P2, P3 = P
    low = Q <= p2
    chain_lo = [p3 <= P3 + t, P3 <= Q + t, Q <= p2 + t, p2 <= P2 + t, P2 <= P1 + t, P1 <= p1 + t]
    chain_hi = [p3 <= P3 + t, P3 <= P2 + t, P2 <= p2 + t, p2 <= Q + t, Q <= P1 + t, P1 <= p1 + t]
    ok = np.where(low, np.all(chain_lo, axis=0), np.all(chain_hi, axis=0))
    return int((~ok).sum())


def suite_eigen(n: int = 200, tols=None, quick=False) -> SuiteReport:
    t0 = time.perf_counter()
    if quick:
        n = 60
    worst, bad, tot = 0.0, 0, 0
    for pv in orbits():
        L, Q = projection_grid(pv, n)
        P, _ = O.eigen_arrays(pv, L, Q)
        r = companion_roots(pv, L, Q)
        worst = max(worst, float(np.abs(r - P.T).max()) / O._scale(pv))
        bad += ordering_violations(pv, L, Q, P)
        tot += L.size
    rep = SuiteReport("eigen")
    rep.checks += [Check("trig_vs_companion (relative to orbit scale)", worst, _tol(tols, "eigen_roots"), tot),
                   Check("ordering violations", bad, 0, tot, exact=True)]
    rep.seconds = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# volumes and branching
# ---------------------------------------------------------------------------

def suite_volume(max_lm: int = 12, tols=None, quick=False) -> SuiteReport:
    t0 = time.perf_counter()
    if quick:
        max_lm = 5
    worst, cnt = 0.0, 0
    for lam in range(1, max_lm + 1):
        for mu in range(1, max_lm + 1):
            pv = WeightVector.from_lam_mu(lam, mu)
            for L in range(0, lam + mu + 1):
                worst = max(worst, abs(QZ.volume_Q(pv, L) - QZ.volume_closed(lam, mu, L)))
                cnt += 1
    tv = 0.0
    for lam, mu in [(40, 20), (12, 12), (7, 3)]:
        pv = WeightVector.from_lam_mu(lam, mu)
        ref = QZ.total_volume(pv)
        tv = max(tv, abs(QZ.total_volume_quadrature(pv, 8 if quick else 24) - ref) / ref)
    rep = SuiteReport("volume")
    rep.checks += [Check(f"integer volume, lam, mu <= {max_lm}", worst, _tol(tols, "volume"), cnt),
                   Check("total volume", tv, _tol(tols, "total_volume"), 3)]
    rep.seconds = time.perf_counter() - t0
    return rep


def suite_branching(max_lm: int = 12, tols=None, quick=False) -> SuiteReport:
    t0 = time.perf_counter()
    mismatch, dim_bad, cnt = 0, 0, 0
    for lam in range(0, max_lm + 1):
        for mu in range(0, max_lm + 1):
            for L in range(0, lam + mu + 1):
                rec = QZ.branching_d(lam, mu, L)
                if (lam, mu) != (0, 0) and rec.d_from_volume != rec.d:
                    mismatch += 1
                cnt += 1
            s = sum((2 * L + 1) * QZ.elliott_d(lam, mu, L) for L in range(lam + mu + 1))
            dim_bad += int(s != QZ.dimension(lam, mu))
    rep = SuiteReport("branching")
    rep.checks += [Check(f"d = (V - delta)/2 + 1, lam, mu <= {max_lm}", mismatch, 0, cnt, exact=True),
                   Check("sum (2L+1) d = dim", dim_bad, 0, (max_lm + 1) ** 2, exact=True),
                   Check("d[60,20,0],0 = 1", abs(QZ.elliott_d(40, 20, 0) - 1), 0, 1, exact=True)]
    rep.seconds = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# dynamics
# ---------------------------------------------------------------------------

def random_LQ(pv: WeightVector, rng, margin: float = 0.05) -> tuple:
    """Random interior (L, Q) away from the separatrix Q = p2."""
    sc = O._scale(pv)
    while True:
        L = rng.uniform(0.05, 0.95) * pv.L_max
        a, b = O.q_range(L, pv)
        Q = a + (b - a) * rng.uniform(margin, 1 - margin)
        if abs(Q - pv.p2) > 1e-2 * sc:
            return L, Q


def dynamics_draws(n: int, seed: int) -> list:
    rng = np.random.default_rng(seed)
    obs = orbits()
    out = []
    for j in range(n):
        pv = obs[rng.integers(len(obs))]
        L, Q = random_LQ(pv, rng)
        td = AA.torus_data(L, Q, pv)
        theta = rng.uniform(-td.Delta, td.Delta)
        psi = rng.uniform(0, 2 * math.pi)
        p, phi, g = AA.kappa_inverse_arrays(pv, L, Q, psi, theta)
        out.append((pv, float(L), float(Q), float(p), float(phi), float(g)))
    return out


def compare_rk4(draws: list, n_steps: int = 20000, n_out: int = 200, omega: float = 1.0) -> tuple:
    """Sup-norm (p, gamma) gap between closed form and RK4, and the closure gaps, over one period."""
    sup, clos, clos_rk4 = 0.0, 0.0, 0.0
    for pv in {id(d[0]): d[0] for d in draws}.values():
        group = [d for d in draws if d[0] is pv]
        H = AA.HamiltonianSpec(pv, omega=omega)
        L = np.array([d[1] for d in group])
        Q = np.array([d[2] for d in group])
        p0 = np.array([d[3] for d in group])
        g0 = np.array([d[5] for d in group])
        T = np.array([AA.period(l, q, H) for l, q in zip(L, Q)])
        om = np.asarray(H.omega_L(L), float)
        r = AA.rk4_oracle(pv, L, p0, g0, om, T, n_steps, n_out)
        for j, d in enumerate(group):
            tr = AA.trajectory((d[1], d[3], d[4], d[5]), H, r["t"][:, j])
            sc = O._scale(pv)
            sup = max(sup, float(np.abs(tr["p"] - r["p"][:, j]).max()) / sc,
                      float(np.abs(tr["gamma"] - r["gamma"][:, j]).max()))
            clos = max(clos, abs(tr["p"][-1] - d[3]) / sc, abs(tr["gamma"][-1] - d[5]))
            clos_rk4 = max(clos_rk4, abs(r["p"][-1, j] - d[3]) / sc, abs(r["gamma"][-1, j] - d[5]))
    return sup, clos, clos_rk4


def saddle_frequency(pv: WeightVector, n: int = 25) -> float:
    """Largest wobbling frequency on the unstable S2 segment (zero expected)."""
    band = [b for b in O.band_list(pv) if b.tag == "unstable"][0]
    H = AA.HamiltonianSpec(pv)
    L = np.linspace(band.L_lo, band.L_hi, n + 2)[1:-1]
    return float(np.abs(AA.wobbling_frequency(band, pv, L, H)).max())


def suite_dynamics(n: int = 20, seed: int = 4, tols=None, quick=False) -> SuiteReport:
    t0 = time.perf_counter()
    if quick:
        n = 6
    draws = dynamics_draws(n, seed)
    sup, clos, clos_rk4 = compare_rk4(draws, 8000 if quick else 20000)
    sad = max(saddle_frequency(pv) for pv in orbits())
    # Omega_theta T = 2 pi at the same draws
    per = 0.0
    for pv, L, Q, *_ in draws:
        H = AA.HamiltonianSpec(pv)
        per = max(per, abs(AA.omega_theta(L, Q, H) * AA.period(L, Q, H) - 2 * math.pi))
    rep = SuiteReport("dynamics")
    rep.checks += [Check("closed form vs RK4 sup (p, gamma)", sup, _tol(tols, "rk4"), n),
                   Check("period closure (closed form)", clos, _tol(tols, "closure"), n),
                   Check("period closure (RK4)", clos_rk4, _tol(tols, "rk4"), n),
                   Check("Omega_theta on S2 saddle", sad, 0, 3, exact=True),
                   Check("Omega_theta T - 2 pi", per, 1e-12, n)]
    rep.seconds = time.perf_counter() - t0
    return rep


SUITES = {
    "brackets": suite_brackets,
    "cartan": suite_cartan,
    "chart": suite_chart,
    "eigen": suite_eigen,
    "volume": suite_volume,
    "branching": suite_branching,
    "dynamics": suite_dynamics,
}


def run(suites=None, tols=None, quick: bool = False) -> list:
    names = list(SUITES) if not suites else list(suites)
    for s in names:
        if s not in SUITES:
            raise KeyError(f"unknown suite {s!r}; choose from {', '.join(SUITES)}")
    return [SUITES[s](tols=tols, quick=quick) for s in names]


def format_table(reports: list) -> str:
    lines = [f"{'suite':<10} {'check':<46} {'max residual':>13} {'tol':>9}  result"]
    for r in reports:
        for c in r.checks:
            lines.append(f"{r.suite:<10} {c.name:<46} {c.value:>13.3e} {c.tol:>9.1e}  "
                         f"{'PASS' if c.passed else 'FAIL'}")
    return "\n".join(lines)
