"""Chart (L, p, phi, gamma) on [p1, p2, p3] orbits, the kernel polynomials,
eigenvalues of the quadrupole tensor and the catalogue of S and P bands.

All functions take a :class:`~orbita.poisson.WeightVector` as the orbit label.
Weights are indexed 1, 2, 3 in names and docstrings and 0, 1, 2 in arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (DegenerateOrbit, LOutOfRange, OffOrbit, OutOfDomain,
                     OutsideProjection, ParameterOutOfRange, ZeroR)
from .poisson import ReducedState, WeightVector, casimirs

#: Relative distance to a chart-domain boundary below which a point is
#: classified as a boundary point and rejected.
BOUNDARY_TOL = 1e-12


def _scale(pv: WeightVector) -> float:
    return max(1.0, float(np.max(np.abs(pv.p))), pv.L_max)


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

class KernelBundle:
    """Kernel polynomials of one orbit.

    Methods are vectorised over their real arguments.  ``w_hat`` uses the
    fourth power of the radial argument, which is the reading that makes
    ``V_L`` consistent with the chart (see the decisions ledger).
    """

    def __init__(self, pv: WeightVector):
        self.pv = pv
        self.p = pv.p

    # polynomials in one variable -------------------------------------
    def G(self, x):
        return self.pv.G(x)

    def dG(self, x):
        return self.pv.dG(x)

    def h(self, i: int, j: int, b, c):
        """h_ij(b, c) = (b - p_i)(b - p_j) + c^2 (i, j are 1-based)."""
        b = np.asarray(b, float)
        return (b - self.p[i - 1]) * (b - self.p[j - 1]) + np.asarray(c, float) ** 2

    def H(self, b, c):
        """H_p(b, c) = h_12 h_13 h_23."""
        return self.h(1, 2, b, c) * self.h(1, 3, b, c) * self.h(2, 3, b, c)

    def w_hat(self, a, b, c):
        """w(a, b, c) = c^4 a^2 / 4 + H_p(b, c)."""
        return 0.25 * np.asarray(c, float) ** 4 * np.asarray(a, float) ** 2 + self.H(b, c)

    def U(self, Q, R):
        """U(Q, R) = G_p(Q) + 3/2 (Q - <p>) R^2."""
        return self.G(Q) + 1.5 * (np.asarray(Q, float) - self.pv.mean) * np.asarray(R, float) ** 2

    def V_LQR(self, L, Q, R, eps=1):
        """V_L(Q, R) = eps sqrt(-w(L, Q, R)); eps carries the sign of -sin(gamma)."""
        w = self.w_hat(L, Q, R)
        return eps * np.sqrt(np.maximum(-w, 0.0))

    def V(self, L, Q, p):
        """Secular polynomial V_p(L, Q, p) = -G_p(p) - (p - Q) L^2 / 4."""
        L = np.asarray(L, float)
        return -self.G(p) - 0.25 * (np.asarray(p, float) - np.asarray(Q, float)) * L * L

    # chart kernels ---------------------------------------------------
    def h_hat(self, i: int, j: int, L, p, gamma):
        """h^_ij(L, p, gamma) = L^2 + 4 (p_i - p)(p_j - p) cos^2 gamma."""
        p = np.asarray(p, float)
        c2 = np.cos(gamma) ** 2
        return np.asarray(L, float) ** 2 + 4.0 * (self.p[i - 1] - p) * (self.p[j - 1] - p) * c2

    def F(self, L, p, gamma):
        """F_L(p, gamma) = h^_12 h^_13 h^_23 (negative on the chart domain)."""
        return (self.h_hat(1, 2, L, p, gamma) * self.h_hat(1, 3, L, p, gamma)
                * self.h_hat(2, 3, L, p, gamma))

    def Q_L(self, L, p, gamma):
        """Q_L(p, gamma) = p + 4 L^-2 G_p(p) cos^2 gamma."""
        L = np.asarray(L, float)
        return np.asarray(p, float) + 4.0 * self.G(p) * np.cos(gamma) ** 2 / (L * L)

    def R_L(self, L, p, gamma):
        """R_L(p, gamma) = sqrt(-F) / (2 L^2 |cos gamma|)."""
        L = np.asarray(L, float)
        F = self.F(L, p, gamma)
        return np.sqrt(np.maximum(-F, 0.0)) / (2.0 * L * L * np.abs(np.cos(gamma)))

    def V_L(self, L, p, gamma):
        """V_L composed with the chart: F sin(gamma) / (8 L^3 cos^3 gamma)."""
        L = np.asarray(L, float)
        return self.F(L, p, gamma) * np.sin(gamma) / (8.0 * L ** 3 * np.cos(gamma) ** 3)

    def H_chart(self, L, p, gamma):
        """H_p composed with the chart, -(2 L cos gamma)^-6 F^2."""
        L = np.asarray(L, float)
        return -self.F(L, p, gamma) ** 2 / (2.0 * L * np.cos(gamma)) ** 6

    def R2_of(self, Q, p):
        """R^2 = -G_p(Q) / (Q - p)."""
        return -self.G(Q) / (np.asarray(Q, float) - np.asarray(p, float))

    def cos2_gamma_of(self, L, Q, p):
        """cos^2 gamma = L^2 (Q - p) / (4 G_p(p))."""
        L = np.asarray(L, float)
        return 0.25 * L * L * (np.asarray(Q, float) - np.asarray(p, float)) / self.G(p)

    def Z(self, L, Q, p, sign: int = 1):
        """Z^+-(L, Q, p) = G_p(p)^-1/2 [L sqrt(Q - p) / 2 +- i sqrt(-V_p)]; gamma = -i log Z."""
        G = self.G(p)
        a = 0.5 * np.asarray(L, float) * np.sqrt(np.asarray(Q - p + 0j))
        b = np.sqrt(np.asarray(-self.V(L, Q, p) + 0j))
        return (a + sign * 1j * b) / np.sqrt(np.asarray(G + 0j))

    def gamma_of(self, L, Q, p, eps_gamma=1):
        """gamma = eps_gamma arccos(L/2 sqrt((Q - p)/G_p(p)))."""
        c2 = np.clip(self.cos2_gamma_of(L, Q, p), 0.0, 1.0)
        return eps_gamma * np.arccos(np.sqrt(c2))

    def p_bounds(self, i: int, l):
        """p^-+_i(l) = (p_{i+1} + p_{i+2} -+ sqrt((p_{i+1} - p_{i+2})^2 - l^2)) / 2."""
        a, b = self.p[i % 3], self.p[(i + 1) % 3]
        disc = np.sqrt(np.asarray((a - b) ** 2 - np.asarray(l, float) ** 2 + 0j))
        lo, hi = 0.5 * (a + b - disc), 0.5 * (a + b + disc)
        return np.real_if_close(lo), np.real_if_close(hi)

    def curly_L(self, p):
        """L_p(p) = 2 sqrt(-3 p^2 + 2 p S1 - S11); inverse of p_+-(L)."""
        p = np.asarray(p, float)
        return 2.0 * np.sqrt(np.maximum(-3 * p * p + 2 * p * self.pv.S1 - self.pv.S11, 0.0))


def kernels(pv: WeightVector) -> KernelBundle:
    return KernelBundle(pv)


# ---------------------------------------------------------------------------
# chart
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChartPoint:
    """A point (L, p, phi, gamma) of the physical chart (L > 0, cos gamma > 0)."""

    L: float
    p: float
    phi: float
    gamma: float
    region: int = 2
    sigma_Q: int = 0

    @property
    def eps_gamma(self) -> int:
        return 1 if self.gamma >= 0 else -1

    def as_array(self) -> np.ndarray:
        return np.array([self.L, self.p, self.phi, self.gamma])


def domain_violations(pv: WeightVector, L, p, gamma, tol: float = BOUNDARY_TOL) -> list:
    """Names of the chart-domain inequalities that (L, p, gamma) fails.

    The domain is L > 0, cos gamma > 0, h^_13 < 0, h^_12 > 0 and h^_23 > 0.
    Points within ``tol`` (relative to the orbit scale squared) of any
    boundary count as violations.
    """
    k = kernels(pv)
    s2 = _scale(pv) ** 2
    out = []
    if not L > tol * _scale(pv):
        out.append("L > 0")
    if not math.cos(gamma) > tol:
        out.append("cos(gamma) > 0")
    if not out:
        if not k.h_hat(1, 3, L, p, gamma) < -tol * s2:
            out.append("h13 < 0")
        if not k.h_hat(1, 2, L, p, gamma) > tol * s2:
            out.append("h12 > 0")
        if not k.h_hat(2, 3, L, p, gamma) > tol * s2:
            out.append("h23 > 0")
    return out


def in_domain(pv: WeightVector, L, p, gamma) -> bool:
    return not domain_violations(pv, L, p, gamma)


def in_domain_mask(pv: WeightVector, L, p, gamma, tol: float = BOUNDARY_TOL) -> np.ndarray:
    """Vectorised domain test."""
    k = kernels(pv)
    s2 = _scale(pv) ** 2
    L = np.asarray(L, float)
    return ((L > tol * _scale(pv)) & (np.cos(gamma) > tol)
            & (k.h_hat(1, 3, L, p, gamma) < -tol * s2)
            & (k.h_hat(1, 2, L, p, gamma) > tol * s2)
            & (k.h_hat(2, 3, L, p, gamma) > tol * s2))


def region_nonempty(pv: WeightVector, i: int, L: float) -> bool:
    """Whether region M_i at angular momentum L is nonempty (L <= p_> - p_<)."""
    a, b = pv.p[i % 3], pv.p[(i + 1) % 3]
    return 0 < L <= abs(a - b)


def make_chart_point(pv: WeightVector, L, p, phi, gamma) -> ChartPoint:
    """Validate and wrap a chart point; raises OutOfDomain naming the failed inequality."""
    bad = domain_violations(pv, L, p, gamma)
    if bad:
        raise OutOfDomain(f"(L, p, gamma) = ({L}, {p}, {gamma}) violates " + ", ".join(bad))
    Q = float(kernels(pv).Q_L(L, p, gamma))
    return ChartPoint(float(L), float(p), float(phi) % (2 * np.pi), float(gamma), 2,
                      int(np.sign(Q - pv.p2)))


def chart_forward_arrays(pv: WeightVector, L, p, phi, gamma) -> np.ndarray:
    """Vectorised forward map; returns an (..., 7) array of generators (no domain check)."""
    k = kernels(pv)
    L = np.asarray(L, float)
    p = np.asarray(p, float)
    c = np.cos(gamma)
    G = k.G(p)
    Q = p + 4.0 * G * c * c / (L * L)
    Qp = 0.5 * (pv.S1 - Q)
    q12 = np.exp(-1j * np.asarray(phi)) * np.sqrt(np.maximum(-k.F(L, p, gamma), 0.0)) / (2 * L * L * c)
    w = np.exp(2j * np.asarray(phi)) * (1.5 * (p - pv.mean) - 0.5j * L * np.tan(gamma)
                                        + 2.0 * G * c * c / (L * L))
    Qm, q3 = w.real, w.imag
    return np.stack(np.broadcast_arrays(L, Qp + Qm, Qp - Qm, Q, q12.real, q12.imag, q3), axis=-1)


def chart_forward(c, pv: WeightVector) -> ReducedState:
    """Map a chart point (ChartPoint or (L, p, phi, gamma)) to the seven generators."""
    if not isinstance(c, ChartPoint):
        c = make_chart_point(pv, *c)
    else:
        make_chart_point(pv, c.L, c.p, c.phi, c.gamma)
    return ReducedState.from_array(chart_forward_arrays(pv, c.L, c.p, c.phi, c.gamma))


def casimir_residual(pv: WeightVector, s) -> float:
    """Largest relative deviation of C_k(s) from S_k(p), k = 1, 2, 3."""
    C = casimirs(s)
    S = (pv.S1, pv.S2, pv.S3)
    sc = _scale(pv)
    return max(abs(C[k] - S[k]) / sc ** (k + 1) for k in range(3))


def chart_inverse(s, pv: WeightVector, orbit_tol: float = 1e-8) -> ChartPoint:
    """Recover (L, p, phi, gamma) from a state on the orbit with L3 > 0.

    Raises OffOrbit if the Casimirs differ from S_k(p) by more than
    ``orbit_tol`` (relative) or L3 <= 0, and ZeroR when q1 = q2 = 0 (the
    S-ellipsoid boundary, where the angles are not defined).
    """
    if not isinstance(s, ReducedState):
        s = ReducedState.from_array(s)
    res = casimir_residual(pv, s)
    if res > orbit_tol:
        raise OffOrbit(f"Casimir residual {res:.3g} exceeds {orbit_tol:g}")
    if not s.L3 > 0:
        raise OffOrbit("the physical chart needs L3 > 0")
    R2 = s.R2
    if R2 <= (BOUNDARY_TOL * _scale(pv)) ** 2:
        raise ZeroR("q1 = q2 = 0: S-ellipsoid state, angles undefined")
    L, Q = s.L3, s.Q3
    # w = exp(-2i phi)(Q_- + i q3) = 3/2 (p - <p>) + 2 G cos^2 / L^2 - i L tan(gamma) / 2.
    # Reading p and gamma off w is better conditioned near R = 0 than
    # p = Q + G(Q)/R^2, which is algebraically identical.
    w = complex(s.q1, s.q2) ** 2 * complex(s.Qminus, s.q3) / R2
    p = w.real + 1.5 * pv.mean - 0.5 * Q
    phi = (-math.atan2(s.q2, s.q1)) % (2 * np.pi)
    gamma = math.atan(-2.0 * w.imag / L)
    return ChartPoint(L, p, phi, gamma, 2, int(np.sign(Q - pv.p2)))


def sample_chart_points(pv: WeightVector, n: int, rng=None, L_range=None,
                        margin: float = 1e-6) -> np.ndarray:
    """Draw n chart points (L, p, gamma) uniformly from the chart domain by rejection.

    Returns an (n, 3) array.  ``margin`` (relative) keeps the samples away
    from the domain boundary.
    """
    rng = np.random.default_rng(rng)
    lo, hi = L_range if L_range is not None else (0.0, pv.L_max)
    out = []
    got = 0
    while got < n:
        m = max(4 * (n - got), 64)
        L = rng.uniform(lo, hi, m)
        p = rng.uniform(pv.p3, pv.p1, m)
        g = rng.uniform(-np.pi / 2, np.pi / 2, m)
        ok = in_domain_mask(pv, L, p, g, tol=margin)
        pts = np.column_stack([L, p, g])[ok]
        out.append(pts)
        got += len(pts)
    return np.concatenate(out)[:n]


# ---------------------------------------------------------------------------
# eigenvalues and Q range
# ---------------------------------------------------------------------------

def hfun(x: float, y: float) -> float:
    """h(x, y) = x + y if x >= y else 2 sqrt(x y)."""
    return x + y if x >= y else 2.0 * math.sqrt(x * y)


def p_pm(pv: WeightVector, L, sigma: int):
    """p_sigma(L) = (S1 - sigma S_L) / 3."""
    return (pv.S1 - sigma * pv.SL(L)) / 3.0


def q_bar(pv: WeightVector, L, sigma: int):
    """Q_sigma(L) = Q_L(p_sigma(L), 0), the Q value along the P_sigma band."""
    L = np.asarray(L, float)
    x = p_pm(pv, L, sigma)
    with np.errstate(divide="ignore", invalid="ignore"):
        return x + 4.0 * pv.G(x) / (L * L)


def q_range(L: float, pv: WeightVector) -> tuple:
    """(Q_min, Q_max) of the projection of the orbit onto the (L, Q) plane at L."""
    lam, mu = pv.lam, pv.mu
    Lm = pv.L_max
    if not (-1e-12 * Lm <= L <= Lm * (1 + 1e-12)):
        raise LOutOfRange(f"L = {L} outside [0, {Lm}]")
    L = min(max(L, 0.0), Lm)
    if L <= lam:
        qmin = pv.p3
    elif L <= hfun(lam, mu):
        qmin = float(q_bar(pv, L, -1))
    else:
        qmin = pv.p2
    if L <= mu:
        qmax = pv.p1
    elif L <= hfun(mu, lam):
        qmax = float(q_bar(pv, L, +1))
    else:
        qmax = pv.p2
    return qmin, qmax


@dataclass(frozen=True)
class EigenTriple:
    """Ordered eigenvalues P1 >= P2 >= P3 of the quadrupole tensor and their shape angles."""

    P: np.ndarray
    beta: float
    Gamma: float
    L: float = float("nan")
    Q: float = float("nan")

    @property
    def P1(self):
        return float(self.P[0])

    @property
    def P2(self):
        return float(self.P[1])

    @property
    def P3(self):
        return float(self.P[2])


def eigen_arrays(pv: WeightVector, L, Q):
    """Vectorised trigonometric roots; returns (P, Gamma) with P of shape (3, ...)."""
    L = np.asarray(L, float)
    Q = np.asarray(Q, float)
    SL = pv.SL(L)
    arg = -(4 * pv.SA + 9 * L * L * (pv.S1 - 3 * Q)) / (8 * SL ** 3)
    Gam = np.arccos(np.clip(arg, -1.0, 1.0)) / 3.0
    P = np.stack([pv.S1 / 3 + (2.0 / 3.0) * SL * np.cos(Gam - 2 * np.pi * a / 3) for a in range(3)])
    return P, Gam


def eigenvalues(L: float, Q: float, pv: WeightVector, tol: float = 1e-9) -> EigenTriple:
    """Roots of V_p(L, Q, P) = 0 from the trigonometric formula.

    Raises OutsideProjection when (L, Q) lies outside the projected domain
    (with relative slack ``tol``).
    """
    try:
        qmin, qmax = q_range(L, pv)
    except LOutOfRange as exc:
        raise OutsideProjection(str(exc)) from exc
    sc = _scale(pv)
    if not (qmin - tol * sc <= Q <= qmax + tol * sc):
        raise OutsideProjection(f"Q = {Q} outside [{qmin}, {qmax}] at L = {L}")
    SL = float(pv.SL(L))
    arg = -(4 * pv.SA + 9 * L * L * (pv.S1 - 3 * Q)) / (8 * SL ** 3)
    if abs(arg) > 1 + 1e-6:
        raise OutsideProjection(f"complex roots at (L, Q) = ({L}, {Q})")
    P, Gam = eigen_arrays(pv, L, Q)
    return EigenTriple(np.asarray(P, float), SL / pv.S1 if pv.S1 != 0 else float("inf"),
                       float(Gam), float(L), float(Q))


def eigenvalues_companion(L: float, Q: float, pv: WeightVector) -> np.ndarray:
    """Roots of the cubic G_p(P) + (P - Q) L^2 / 4 via numpy's companion matrix, descending."""
    c = np.poly(pv.p)
    c[2] += 0.25 * L * L
    c[3] -= 0.25 * Q * L * L
    return np.sort(np.roots(c).real)[::-1]


def ordering_holds(e: EigenTriple, pv: WeightVector, tol: float = 1e-9) -> bool:
    """Check the interlacing rule for sigma = sign(Q - p2)."""
    t = tol * _scale(pv)
    P1, P2, P3 = e.P
    Q = e.Q
    p1, p2, p3 = pv.p
    if Q <= p2:
        chain = (p3, P3, Q, p2, P2, P1, p1)
    else:
        chain = (p3, P3, P2, p2, Q, P1, p1)
    return all(chain[i] <= chain[i + 1] + t for i in range(len(chain) - 1))


def shape_projection(e: EigenTriple) -> tuple:
    """(x, y) = (beta cos Gamma, beta sin Gamma)."""
    return e.beta * math.cos(e.Gamma), e.beta * math.sin(e.Gamma)


def quadrupole_det(pv: WeightVector, L, Q):
    """det Q = p1 p2 p3 + Q L^2 / 4."""
    return pv.S111 + 0.25 * np.asarray(Q, float) * np.asarray(L, float) ** 2


# ---------------------------------------------------------------------------
# Hamiltonians of the quadrupole determinant
# ---------------------------------------------------------------------------

def kappa_of_s(s: float) -> float:
    return 6.0 * s / (s + 2.0)


@dataclass(frozen=True)
class DetHamiltonian:
    """H_{omega,r,s} = kappa^-1 omega_r g^(1 - 3 kappa) det(Q)^kappa.

    ``g`` is the geometric mean of the weights.  At s = 0 the kappa -> 0
    limit omega_r g log(det / g^3) is used (an additive constant dropped).
    """

    pv: WeightVector
    r: float = 1.0
    s: float = 2.0
    omega: float = 1.0
    A: float | None = None

    def __post_init__(self):
        if self.r > 2 or self.s < 0:
            raise ParameterOutOfRange(f"need r <= 2 and s >= 0, got r={self.r}, s={self.s}")

    @property
    def kappa(self) -> float:
        return kappa_of_s(self.s)

    @property
    def g(self) -> float:
        g = self.pv.gmean
        return g if g > 0 else self.pv.mean

    @property
    def omega_r(self) -> float:
        if self.A is None:
            return self.omega
        pV = (1.5 * self.A) ** (4.0 / 3.0) / 6.0
        return (pV / self.g) ** (self.r - 1) * self.omega

    def of_det(self, det):
        det = np.asarray(det, float)
        k, g = self.kappa, self.g
        if k == 0:
            return self.omega_r * g * np.log(det / g ** 3)
        return self.omega_r * g ** (1 - 3 * k) * np.sign(det) * np.abs(det) ** k / k

    def d_of_det(self, det):
        det = np.asarray(det, float)
        k, g = self.kappa, self.g
        if k == 0:
            return self.omega_r * g / det
        return self.omega_r * g ** (1 - 3 * k) * np.abs(det) ** (k - 1)

    def __call__(self, L, Q):
        return self.of_det(quadrupole_det(self.pv, L, Q))

    def chart(self, L, p, gamma):
        return self(L, kernels(self.pv).Q_L(L, p, gamma))

    def dL(self, L, p, gamma):
        """Partial derivative in L at fixed (p, gamma); d det / dL = L p / 2."""
        Q = kernels(self.pv).Q_L(L, p, gamma)
        return self.d_of_det(quadrupole_det(self.pv, L, Q)) * 0.5 * np.asarray(L) * np.asarray(p)

    def dp(self, L, p, gamma):
        """Partial derivative in p: d det / dp = (L^2 - L_p(p)^2 cos^2 gamma) / 4."""
        k = kernels(self.pv)
        Q = k.Q_L(L, p, gamma)
        dd = 0.25 * (np.asarray(L) ** 2 - k.curly_L(p) ** 2 * np.cos(gamma) ** 2)
        return self.d_of_det(quadrupole_det(self.pv, L, Q)) * dd

    def linear_omega(self, L):
        """omega(L) = g^-2 omega_r L^2, the linearised coefficient of Q/4."""
        return self.omega_r * np.asarray(L, float) ** 2 / self.g ** 2


def nuclear_hbar_omega(A: float) -> float:
    """hbar omega ~ 40 A^(-1/3) MeV."""
    return 40.0 * A ** (-1.0 / 3.0)


# ---------------------------------------------------------------------------
# bands
# ---------------------------------------------------------------------------

def energy_factor_S(pv: WeightVector, i: int, L):
    """E_i = det Q on S_i = p_i (p_{i+1} p_{i+2} + L^2 / 4)."""
    p = pv.p
    return p[i - 1] * (p[i % 3] * p[(i + 1) % 3] + 0.25 * np.asarray(L, float) ** 2)


def energy_factor_P(pv: WeightVector, sigma: int, L):
    """E_sigma = S111 + S^A/27 + <p> L^2 / 4 - 2 (p_sigma - <p>)^3."""
    L = np.asarray(L, float)
    x = p_pm(pv, L, sigma)
    return pv.S111 + pv.SA / 27.0 + 0.25 * pv.mean * L * L - 2.0 * (x - pv.mean) ** 3


@dataclass(frozen=True)
class Band:
    """One S or P band: an L interval with curves p(L), Q(L), P(L) and E(L)."""

    kind: str
    L_lo: float
    L_hi: float
    tag: str
    pv: WeightVector = field(repr=False)

    @property
    def index(self) -> int:
        return int(self.kind[1]) if self.kind[0] == "S" else 0

    @property
    def sigma(self) -> int:
        return {"P+": 1, "P-": -1}.get(self.kind, 0)

    def contains(self, L) -> bool:
        return self.L_lo <= L <= self.L_hi

    def p(self, L):
        if self.sigma:
            return p_pm(self.pv, L, self.sigma)
        i = self.index
        a, b = self.pv.p[i % 3], self.pv.p[(i + 1) % 3]
        return np.full_like(np.asarray(L, float), 0.5 * (a + b))

    def Q(self, L):
        if self.sigma:
            return q_bar(self.pv, L, self.sigma)
        return np.full_like(np.asarray(L, float), self.pv.p[self.index - 1])

    def E(self, L):
        if self.sigma:
            return energy_factor_P(self.pv, self.sigma, L)
        return energy_factor_S(self.pv, self.index, L)

    def P(self, L):
        return eigen_arrays(self.pv, L, self.Q(L))[0]

    def gamma(self, L):
        """Chart angle: 0 on P bands, gamma_{i,p} at the segment midpoint on S bands."""
        L = np.asarray(L, float)
        if self.sigma:
            return np.zeros_like(L)
        i = self.index
        a, b = sorted((self.pv.p[i % 3], self.pv.p[(i + 1) % 3]))
        m = 0.5 * (a + b)
        return np.arccos(np.clip(L / (2 * np.sqrt((b - m) * (m - a))), -1, 1))

    def curve(self, n: int = 101) -> dict:
        L = np.linspace(self.L_lo, self.L_hi, n)
        if self.sigma and L[0] == 0:
            L = L[1:]
        return {"L": L, "p": self.p(L), "Q": self.Q(L), "E": self.E(L), "P": self.P(L)}


def band_list(pv: WeightVector) -> list:
    """Bands of extremal det Q with stability tags.

    Tags: ``min`` and ``max`` for stable minima and maxima of det Q,
    ``unstable`` for the S2 segment below 2 sqrt(lam mu) (a saddle).
    """
    lam, mu = pv.lam, pv.mu
    top = lam + mu
    r = 2.0 * math.sqrt(lam * mu)
    out = [Band("S3", 0.0, lam, "min", pv)]
    if mu < lam:
        out += [Band("P-", lam, top, "min", pv),
                Band("S1", 0.0, mu, "max", pv),
                Band("P+", mu, r, "max", pv),
                Band("S2", r, top, "max", pv)]
    else:
        out += [Band("P-", lam, r, "min", pv),
                Band("S2", r, top, "min", pv),
                Band("S1", 0.0, mu, "max", pv),
                Band("P+", mu, top, "max", pv)]
    out.append(Band("S2", 0.0, r, "unstable", pv))
    return out


def intersections(pv: WeightVector) -> dict:
    """Band crossing points as (L, Q, gamma)."""
    lam, mu = pv.lam, pv.mu
    r = 2.0 * math.sqrt(lam * mu)
    out = {"P-&S3": (lam, pv.p3, 0.0), "P+&S1": (mu, pv.p1, 0.0)}
    if mu < lam:
        out["P-&S2"] = (lam + mu, pv.p2, 0.0)
        out["P+&S2"] = (r, pv.p2, 0.0)
    else:
        out["P+&S2"] = (lam + mu, pv.p2, 0.0)
        out["P-&S2"] = (r, pv.p2, 0.0)
    return out


@dataclass(frozen=True)
class BandCatalog:
    pv: WeightVector
    hamiltonian: DetHamiltonian
    bands: tuple
    crossings: dict

    def __iter__(self):
        return iter(self.bands)

    def __len__(self):
        return len(self.bands)

    def by_kind(self, kind: str) -> list:
        return [b for b in self.bands if b.kind == kind]

    def energy(self, band: Band, L):
        return self.hamiltonian.of_det(band.E(L))

    def rows(self, n: int = 41) -> list:
        """Flat table rows (kind, tag, L, p, Q, P1, P2, P3, E, H)."""
        rows = []
        for b in self.bands:
            c = b.curve(n)
            H = self.hamiltonian.of_det(c["E"])
            for k in range(len(c["L"])):
                rows.append({"band": b.kind, "tag": b.tag, "L": float(c["L"][k]),
                             "p": float(c["p"][k]), "Q": float(c["Q"][k]),
                             "P1": float(c["P"][0][k]), "P2": float(c["P"][1][k]),
                             "P3": float(c["P"][2][k]), "E": float(c["E"][k]),
                             "H": float(H[k])})
        return rows


def band_catalog(pv: WeightVector, H_params=(1.0, 2.0), omega: float = 1.0) -> BandCatalog:
    """Catalogue of S and P bands for the Hamiltonian family with parameters (r, s)."""
    if len(set(map(float, pv.p))) < 3:
        raise DegenerateOrbit("weights must be distinct")
    r, s = H_params
    ham = DetHamiltonian(pv, r=r, s=s, omega=omega)
    return BandCatalog(pv, ham, tuple(band_list(pv)), intersections(pv))


def stationarity_residual(pv: WeightVector, band: Band, L: float,
                          f: Callable | None = None, h: float = 1e-6) -> float:
    """|dH/dp| at gamma = 0 on a P band by central differences (H = det Q by default)."""
    k = kernels(pv)
    if f is None:
        f = lambda x: float(quadrupole_det(pv, L, k.Q_L(L, x, 0.0)))  # noqa: E731
    x = float(band.p(L))
    sc = _scale(pv)
    return abs(f(x + h * sc) - f(x - h * sc)) / (2 * h * sc)
