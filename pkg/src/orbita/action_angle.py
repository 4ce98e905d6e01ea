"""Wobbling action-angle coordinates (L, Q, psi, theta), their closed-form
time evolution for H = E0 + omega(L) Q / 4, the wobbling frequency and the
body-frame angular momentum components.

The forward map kappa sends a chart point (L, p, phi, gamma) to

    Q     = Q_L(p, gamma)
    theta = eps_gamma L I(p) / 4          (mod 2 Delta, reduced to (-Delta, Delta])
    psi   = phi + eps_gamma J(p) / 2      (mod 2 pi)

with I, J the elliptic integrals of :class:`orbita.elliptic.QuarticRootData`
built from the roots [P1, P2, P3, Q].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .elliptic import QuarticRootData, ellipk
from .errors import (BoundaryState, NegativeSquare, OutsideProjection,
                     ParameterOutOfRange)
from .orbit import (Band, ChartPoint, DetHamiltonian, eigen_arrays,
                    eigenvalues, kernels, make_chart_point)
from .poisson import WeightVector

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# Hamiltonian
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HamiltonianSpec:
    """H = E0 + omega(L) Q / 4.

    By default omega(L) = g^-2 omega_r L^2 with g the geometric mean of the
    weights (the linear term of the det-Q family with parameters (r, s)).
    A custom ``omega_fn`` replaces the default; ``domega_fn`` gives its
    derivative, otherwise central differences are used.  ``dE0_fn`` adds an
    L-dependent ground energy slope to the psi flow (extension).
    """

    pv: WeightVector
    E0: float = 0.0
    r: float = 1.0
    s: float = 2.0
    omega: float = 1.0
    A: Optional[float] = None
    omega_fn: Optional[Callable] = None
    domega_fn: Optional[Callable] = None
    dE0_fn: Optional[Callable] = None

    def __post_init__(self):
        if self.r > 2 or self.s < 0:
            raise ParameterOutOfRange(f"need r <= 2 and s >= 0, got r={self.r}, s={self.s}")

    @property
    def det_family(self) -> DetHamiltonian:
        return DetHamiltonian(self.pv, r=self.r, s=self.s, omega=self.omega, A=self.A)

    def omega_L(self, L):
        if self.omega_fn is not None:
            return self.omega_fn(L)
        return self.det_family.linear_omega(L)

    def domega_L(self, L):
        if self.domega_fn is not None:
            return self.domega_fn(L)
        if self.omega_fn is None:
            fam = self.det_family
            return 2.0 * fam.omega_r * np.asarray(L, float) / fam.g ** 2
        h = 1e-6 * max(1.0, abs(float(np.max(L))))
        return (self.omega_fn(np.asarray(L) + h) - self.omega_fn(np.asarray(L) - h)) / (2 * h)

    def energy(self, L, Q):
        return self.E0 + 0.25 * self.omega_L(L) * np.asarray(Q, float)

    def theta_dot(self, L):
        return 0.25 * self.omega_L(L)

    def psi_dot(self, L, Q):
        v = 0.25 * np.asarray(Q, float) * self.domega_L(L)
        if self.dE0_fn is not None:
            v = v + self.dE0_fn(L)
        return v


# ---------------------------------------------------------------------------
# (L, Q) data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusData:
    """Elliptic data of the invariant circle at fixed (L, Q)."""

    L: float
    Q: float
    P: np.ndarray
    sigma: int
    roots: QuarticRootData

    @property
    def B(self) -> float:
        return self.roots.B

    @property
    def C(self) -> float:
        return self.roots.C

    @property
    def Delta(self) -> float:
        """Half period in theta: L C^-1/2 K(B) / 2."""
        return 0.5 * self.L * ellipk(self.B) / math.sqrt(self.C)

    @property
    def interval(self) -> tuple:
        return self.roots.interval

    def I(self, p):
        return self.roots.I(p)

    def J(self, p):
        return self.roots.J(p)


def torus_data(L: float, Q: float, pv: WeightVector) -> TorusData:
    """Roots and elliptic parameters at (L, Q); raises OutsideProjection off the domain."""
    e = eigenvalues(L, Q, pv)
    sigma = 1 if Q > pv.p2 else -1
    P = e.P
    if Q == pv.p2:
        raise OutsideProjection("Q = p2 is the separatrix: the period diverges")
    roots = QuarticRootData(P[0], P[1], P[2], Q, sigma)
    return TorusData(float(L), float(Q), P, sigma, roots)


def half_period(L: float, Q: float, pv: WeightVector) -> float:
    """Delta_<L,Q> = L C^-1/2 K(B) / 2."""
    return torus_data(L, Q, pv).Delta


def delta_array(pv: WeightVector, L: float, Q) -> np.ndarray:
    """Vectorised Delta over Q at fixed L (no domain checks)."""
    Q = np.asarray(Q, float)
    P, _ = eigen_arrays(pv, L, Q)
    a, b, c = P
    lower = Q < pv.p2
    with np.errstate(divide="ignore", invalid="ignore"):
        C = np.where(lower, (a - Q) * (b - c), (a - b) * (Q - c))
        B = np.where(lower, (a - b) * (Q - c) / ((b - c) * (a - Q)),
                     (b - c) * (a - Q) / ((a - b) * (Q - c)))
    B = np.clip(np.nan_to_num(B, nan=0.0), 0.0, 1.0)
    from scipy.special import ellipk as _K
    return 0.5 * L * _K(B) / np.sqrt(C)


def reduce_theta(theta, Delta: float):
    """Map theta into (-Delta, Delta]."""
    t = np.mod(np.asarray(theta, float) + Delta, 2 * Delta) - Delta
    t = np.where(t <= -Delta, t + 2 * Delta, t)
    return t if np.ndim(t) else float(t)


# ---------------------------------------------------------------------------
# kappa and its inverse
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ActionAnglePoint:
    """(L, Q, psi, theta) with theta reduced to (-Delta, Delta]."""

    L: float
    Q: float
    psi: float
    theta: float
    Delta: float

    @property
    def eps_theta(self) -> int:
        s = math.sin(math.pi * self.theta / self.Delta)
        return 1 if s >= 0 else -1

    def as_array(self) -> np.ndarray:
        return np.array([self.L, self.Q, self.psi, self.theta])


def kappa_forward(c, pv: WeightVector, strict: bool = False) -> ActionAnglePoint:
    """Chart point -> action-angle point.

    ``strict`` raises BoundaryState at turning points (gamma = 0), where
    theta takes the values 0 or Delta and the sign eps_gamma is ambiguous.
    """
    if not isinstance(c, ChartPoint):
        c = make_chart_point(pv, *c)
    k = kernels(pv)
    Q = float(k.Q_L(c.L, c.p, c.gamma))
    td = torus_data(c.L, Q, pv)
    if strict:
        V = float(k.V(c.L, Q, c.p))
        if abs(V) <= 1e-12 * max(1.0, pv.L_max) ** 3:
            raise BoundaryState(f"turning point V = {V:.3g}")
    eg = 1 if c.gamma >= 0 else -1
    I, J = td.I(c.p), td.J(c.p)
    theta = reduce_theta(0.25 * eg * c.L * I, td.Delta)
    psi = (c.phi + 0.5 * eg * J) % TWO_PI
    return ActionAnglePoint(c.L, Q, float(psi), float(theta), td.Delta)


def p_of_theta(td: TorusData, theta):
    """p_{L,Q}(theta) = A^-1(sn^2(2 C^1/2 theta / L, B)), 2 Delta periodic."""
    return td.roots.I_inverse(4.0 * np.asarray(theta, float) / td.L)


def kappa_inverse_arrays(pv: WeightVector, L: float, Q: float, psi, theta):
    """Vectorised inverse over (psi, theta); returns (p, phi, gamma) arrays."""
    td = torus_data(L, Q, pv)
    k = kernels(pv)
    theta = np.asarray(theta, float)
    p, xa, xb, xc = td.roots.I_inverse_factored(4.0 * theta / L)
    lo, hi = td.interval
    p = np.clip(p, lo, hi)
    eps = np.where(np.sin(np.pi * theta / td.Delta) >= 0, 1.0, -1.0)
    # cos^2 gamma = L^2 (Q - p) / 4 G_p(p) and sin^2 gamma = (p - P1)(p - P2)(p - P3) / G_p(p):
    # the eigenvalue cubic is G_p(p) - L^2 (Q - p) / 4.  Its factors come from
    # sn and cn directly, so gamma stays accurate at the turning points where
    # arccos(cos gamma) would lose half the digits
    G = k.G(p)
    c2 = np.clip(k.cos2_gamma_of(L, Q, p), 0.0, 1.0)
    s2 = np.clip(xa * xb * xc / G, 0.0, 1.0)
    gamma = -eps * np.arctan2(np.sqrt(s2), np.sqrt(c2))
    phi = np.mod(np.asarray(psi, float) + 0.5 * eps * td.J(p), TWO_PI)
    return p, phi, gamma


def kappa_inverse(a: ActionAnglePoint, pv: WeightVector) -> ChartPoint:
    """Action-angle point -> chart point (L, p, phi, gamma)."""
    p, phi, gamma = kappa_inverse_arrays(pv, a.L, a.Q, a.psi, a.theta)
    return ChartPoint(a.L, float(p), float(phi), float(gamma), 2,
                      1 if a.Q > pv.p2 else -1)


def kappa_jacobian(pv: WeightVector, L, p, phi, gamma, h: float = 1e-5) -> np.ndarray:
    """Five-point central-difference Jacobian d(L, Q, psi, theta)/d(L, p, phi, gamma).

    The step along coordinate j is h max(1, |z_j|).  The fourth-order
    stencil keeps truncation small at a step large enough to stay clear of
    roundoff near the separatrix, where the entries grow logarithmically.
    """
    z = np.array([L, p, phi, gamma], float)
    base = kappa_forward(tuple(z), pv)
    per = {2: TWO_PI, 3: 2 * base.Delta}
    out = np.zeros((4, 4))
    for j in range(4):
        hj = h * max(1.0, abs(z[j]))
        vals = {}
        for m in (-2, -1, 1, 2):
            e = np.zeros(4)
            e[j] = m * hj
            d = kappa_forward(tuple(z + e), pv).as_array() - base.as_array()
            for i, P in per.items():
                d[i] = (d[i] + P / 2) % P - P / 2
            vals[m] = d
        out[:, j] = (vals[-2] - 8 * vals[-1] + 8 * vals[1] - vals[2]) / (12 * hj)
    return out


def symplectic_defect(pv: WeightVector, L, p, phi, gamma, h: float = 1e-5) -> float:
    """max |M^T Omega_N M - Omega_M| for M the Jacobian of kappa.

    Omega_M = dL^dphi + dp^dgamma on (L, p, phi, gamma) and
    Omega_N = dL^dpsi + dQ^dtheta on (L, Q, psi, theta).
    """
    M = kappa_jacobian(pv, L, p, phi, gamma, h)
    Om = np.zeros((4, 4))
    Om[0, 2], Om[2, 0], Om[1, 3], Om[3, 1] = 1, -1, 1, -1
    return float(np.abs(M.T @ Om @ M - Om).max())


# ---------------------------------------------------------------------------
# time evolution
# ---------------------------------------------------------------------------

def evolve(a0: ActionAnglePoint, H: HamiltonianSpec, t) -> ActionAnglePoint:
    """Linear flow: theta += omega(L) t / 4, psi += Q omega'(L) t / 4."""
    t = np.asarray(t, float)
    theta = reduce_theta(a0.theta + H.theta_dot(a0.L) * t, a0.Delta)
    psi = np.mod(a0.psi + H.psi_dot(a0.L, a0.Q) * t, TWO_PI)
    if np.ndim(t) == 0:
        return ActionAnglePoint(a0.L, a0.Q, float(psi), float(theta), a0.Delta)
    return ActionAnglePoint(a0.L, a0.Q, psi, theta, a0.Delta)


def period(L: float, Q: float, H: HamiltonianSpec) -> float:
    """T = 2 Delta / theta_dot = 8 Delta / omega(L)."""
    return 2.0 * half_period(L, Q, H.pv) / float(H.theta_dot(L))


def trajectory(c0, H: HamiltonianSpec, times) -> dict:
    """Closed-form chart trajectory from an initial chart point."""
    pv = H.pv
    a0 = kappa_forward(c0, pv)
    a = evolve(a0, H, np.asarray(times, float))
    p, phi, gamma = kappa_inverse_arrays(pv, a0.L, a0.Q, a.psi, a.theta)
    E = np.full_like(np.asarray(times, float), float(H.energy(a0.L, a0.Q)))
    return {"t": np.asarray(times, float), "L": np.full_like(p, a0.L),
            "Q": np.full_like(p, a0.Q), "psi": np.asarray(a.psi), "theta": np.asarray(a.theta),
            "p": p, "phi": phi, "gamma": gamma, "E": E}


def chart_velocity(pv: WeightVector, L: float, omega: float, p, gamma):
    """(p_dot, gamma_dot) from H = omega Q_L(p, gamma) / 4 with {gamma, p} = 1."""
    G = pv.G(p)
    c = np.cos(gamma)
    pdot = 2.0 * G * omega * c * np.sin(gamma) / (L * L)
    gdot = 0.25 * omega * (1.0 + 4.0 * pv.dG(p) * c * c / (L * L))
    return pdot, gdot


def rk4_oracle(pv: WeightVector, L: float, p0, gamma0, omega: float, T: float,
               n_steps: int = 100000, n_out: int | None = None) -> dict:
    """Fixed-step RK4 for (p, gamma); vectorised over initial conditions.

    Integrates the smooth Hamiltonian field of omega Q_L(p, gamma) / 4,
    which has no square-root contact at the turning points.  Returns
    samples at ``n_out`` equally spaced times (default every step).
    """
    p = np.array(p0, dtype=float, ndmin=1)
    g = np.array(gamma0, dtype=float, ndmin=1)
    dt = np.asarray(T, float) / n_steps
    stride = 1 if n_out is None else max(1, n_steps // n_out)
    ts, ps, gs = [0.0 * dt], [p.copy()], [g.copy()]
    f = lambda a, b: chart_velocity(pv, L, omega, a, b)  # noqa: E731
    for n in range(1, n_steps + 1):
        k1p, k1g = f(p, g)
        k2p, k2g = f(p + 0.5 * dt * k1p, g + 0.5 * dt * k1g)
        k3p, k3g = f(p + 0.5 * dt * k2p, g + 0.5 * dt * k2g)
        k4p, k4g = f(p + dt * k3p, g + dt * k3g)
        p = p + dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
        g = g + dt / 6.0 * (k1g + 2 * k2g + 2 * k3g + k4g)
        if n % stride == 0:
            ts.append(n * dt)
            ps.append(p.copy())
            gs.append(g.copy())
    return {"t": np.array(ts), "p": np.array(ps), "gamma": np.array(gs)}


# ---------------------------------------------------------------------------
# frequencies
# ---------------------------------------------------------------------------

def C_band(band: Band, L):
    """C of the band: S_i uses (p_{i+1} - p_i)(p_{i+2} - p_i) + L^2/4, P_sigma the
    closed form 4/27 L^-2 [(sigma S^A + 2 S_L^3) S_L + 9/4 L^2 S_L^2]."""
    pv = band.pv
    L = np.asarray(L, float)
    if band.sigma:
        SL = pv.SL(L)
        return 4.0 / 27.0 / (L * L) * ((band.sigma * pv.SA + 2 * SL ** 3) * SL + 2.25 * L * L * SL * SL)
    i = band.index - 1
    p = pv.p
    return (p[(i + 1) % 3] - p[i]) * (p[(i + 2) % 3] - p[i]) + 0.25 * L * L


def C_eigen(L: float, Q: float, pv: WeightVector, sigma: int) -> float:
    """C of the elliptic data from the eigenvalues (valid on and off bands)."""
    P, _ = eigen_arrays(pv, L, Q)
    a, b, c = (float(x) for x in P)
    return (a - Q) * (b - c) if sigma < 0 else (a - b) * (Q - c)


def omega_theta(L: float, Q: float, H: HamiltonianSpec) -> float:
    """Omega_theta = (pi/2) C^1/2 omega(L) / (L K(B)) at interior (L, Q)."""
    td = torus_data(L, Q, H.pv)
    return 0.5 * math.pi * math.sqrt(td.C) * float(H.omega_L(L)) / (L * ellipk(td.B))


def wobbling_frequency(band: Band, pv: WeightVector, L, H: HamiltonianSpec):
    """Small-amplitude wobbling frequency L^-1 C^1/2 omega(L) along a band.

    Zero where C <= 0, which happens exactly on the S2 saddle segment
    L < 2 sqrt(lam mu).
    """
    C = np.asarray(C_band(band, L), float)
    om = np.asarray(H.omega_L(L), float)
    out = np.where(C > 0, np.sqrt(np.abs(C)) * om / np.asarray(L, float), 0.0)
    return out if np.ndim(out) else float(out)


# ---------------------------------------------------------------------------
# body frame
# ---------------------------------------------------------------------------

def curly_P(pv: WeightVector, L, P):
    """P_L(P) = 3^-1/2 sqrt(4 S_L^2 - (3P - S1)^2)."""
    return np.sqrt(np.maximum(4 * pv.SL(L) ** 2 - (3 * np.asarray(P) - pv.S1) ** 2, 0.0)) / math.sqrt(3.0)


def bodyframe_squares(pv: WeightVector, L: float, Q: float, p, P) -> np.ndarray:
    """Squared body-frame components, one per eigenvalue P_alpha.

    L_alpha^2 = L^2 * 3/4 (p - P)/(p - Q) G(Q)/G(P) L^2 / ((3P - S1)^2 - S_L^2).
    """
    P = np.asarray(P, float)
    p = np.asarray(p, float)[..., None]
    SL2 = pv.SL(L) ** 2
    return (L * L * 0.75 * (p - P) / (p - Q) * pv.G(Q) / pv.G(P) * L * L
            / ((3 * P - pv.S1) ** 2 - SL2))


def bodyframe_momenta(L: float, Q: float, theta, pv: WeightVector,
                      tol: float = 1e-10) -> np.ndarray:
    """Body-frame angular momentum (|L1|, |L2|, |L3|) at p = p_{L,Q}(theta).

    Returns non-negative magnitudes; raises NegativeSquare if a squared
    component falls below ``-tol * L^2``.
    """
    td = torus_data(L, Q, pv)
    p = p_of_theta(td, theta)
    sq = bodyframe_squares(pv, L, Q, p, td.P)
    if np.any(sq < -tol * L * L):
        raise NegativeSquare(f"squared body-frame component {sq.min():.3g} < 0")
    return np.sqrt(np.maximum(sq, 0.0))


def body_cubic(pv: WeightVector, L: float, P3: float, l1sq: float, l2sq: float, r: int = 1) -> float:
    """F_r(P3) = [8 G(P3) + (l1^2 + l2^2)(3 P3 - S1)]^r - (l1^2 - l2^2)^r P_L(P3)^r."""
    a = 8 * float(pv.G(P3)) + (l1sq + l2sq) * (3 * P3 - pv.S1)
    b = (l1sq - l2sq) * float(curly_P(pv, L, P3))
    return a ** r - b ** r


# ---------------------------------------------------------------------------
# generating function
# ---------------------------------------------------------------------------

def gamma_plus(pv: WeightVector, L: float, Q: float, t):
    """gamma^+_{L,Q,t} = arccos(L/2 sqrt((Q - t)/G(t))) >= 0."""
    return kernels(pv).gamma_of(L, Q, t, 1)


def generating_function(pv: WeightVector, L: float, Q: float, p: float, eps_gamma: int) -> float:
    """S_bar(L, Q, p) = -eps_gamma int_{P2}^{p} gamma^+ dt by quadrature.

    The single formula covers both branches: for sigma = +1 the path runs
    downward from P2 and the sign of the integral flips automatically.
    """
    td = torus_data(L, Q, pv)
    P2 = float(td.P[1])
    val, _ = quad(lambda t: float(gamma_plus(pv, L, Q, t)), P2, p, limit=200,
                  epsabs=1e-13, epsrel=1e-12)
    return -eps_gamma * val
