"""Cartan model of SO(3)/SO(2), angular-momentum-frame reduction and the
differential formulas used to build the reduced bracket.

The Cartan matrix ``[x]`` is the rotation that carries ``e3`` onto the unit
vector along ``x`` while fixing ``x x e3``.  Index convention: Python index
0, 1, 2 stands for the axis labels x, y, z (equivalently 1, 2, 3).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AntipodalAngularMomentum, DegenerateDirection, DivergentKernel

E3 = np.array([0.0, 0.0, 1.0])

#: Levi-Civita symbol with eps[0, 1, 2] = 1.
LEVI = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI[_i, _j, _k] = 1.0
    LEVI[_i, _k, _j] = -1.0

#: Relative threshold below which |x| + x_z counts as zero.
ANTIPODE_TOL = 1e-10


def star(x):
    """Reflection x -> x_* = (-x1, -x2, x3)."""
    x = np.asarray(x, dtype=float)
    return np.array([-x[0], -x[1], x[2]])


def rot3(alpha):
    """Rotation about e3 by ``alpha``."""
    c, s = np.cos(alpha), np.sin(alpha)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def hat(v):
    """Antisymmetric matrix of the cross product, ``hat(v) @ w == v x w``."""
    return -np.einsum("abc,c->ab", LEVI, np.asarray(v, dtype=float))


def cartan_matrix(x) -> np.ndarray:
    """Return the Cartan matrix [x].

    Raises DegenerateDirection when x vanishes or points along -e3
    (|x| + z below ``ANTIPODE_TOL * |x|``).
    """
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    if r == 0.0 or not np.isfinite(r):
        raise DegenerateDirection("Cartan matrix undefined for the zero vector")
    d = r + x[2]
    if d < ANTIPODE_TOL * r:
        raise DegenerateDirection(
            f"vector {x.tolist()} is antiparallel to e3 (|x|+z = {d:.3g})")
    a, b = x[0] / np.sqrt(r * d), x[1] / np.sqrt(r * d)
    xb, yb, zb = x / r
    return np.array([[1.0 - a * a, -a * b, xb],
                     [-a * b, 1.0 - b * b, yb],
                     [-xb, -yb, zb]])


def axis_angle_form(x) -> np.ndarray:
    """Rebuild [x] as a rotation about e3 x x, conjugated through [e3 x x].

    Uses ``[x] = C . R3(theta) . C^T`` with ``C = [e3 x x]`` and
    ``(cos theta, sin theta) = (x3, sqrt(x1^2 + x2^2)) / |x|``, i.e. theta is
    the polar angle of x.  On the +e3 axis the rotation angle is zero and
    the identity is returned; the -e3 axis is outside the chart.
    """
    x = np.asarray(x, dtype=float)
    w = np.cross(E3, x)
    if np.hypot(x[0], x[1]) <= 1e-15 * abs(x[2]):
        if x[2] > 0:
            return np.eye(3)
        raise DegenerateDirection("axis-angle form undefined on the -e3 axis")
    C = cartan_matrix(w)
    theta = np.arctan2(np.hypot(x[0], x[1]), x[2])
    return C @ rot3(theta) @ C.T


def cartan_properties(x, a) -> dict:
    """Residuals of the Cartan-model identities at vectors x and a.

    Keys name the identity; every value is a max-abs residual.  Property 5
    is checked as an equality of cosets in SO(3)/SO(2): the two sides map
    e3 to the same vector and differ by a rotation about e3.
    """
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    r = np.linalg.norm(x)
    M = cartan_matrix(x)
    out = {}
    out["orthogonal"] = float(np.abs(M.T @ M - np.eye(3)).max())
    out["det"] = float(abs(np.linalg.det(M) - 1.0))
    out["p1_scale"] = float(np.abs(cartan_matrix(3.7 * x) - M).max())
    out["p2_e3"] = float(np.abs(M @ E3 - x / r).max())
    out["p3_star"] = float(np.abs(M @ star(x) - r * E3).max())
    out["p4_inverse"] = float(np.abs(cartan_matrix(star(x)) - M.T).max())
    left = cartan_matrix(M @ a)
    right = M @ cartan_matrix(a)
    rel = right.T @ left
    out["p5_coset"] = float(max(np.abs(rel[:, 2] - E3).max(), np.abs(rel[2, :] - E3).max()))
    w = np.cross(x, E3)
    out["p6_axis"] = float(np.abs(M @ w - w).max())
    out["p7_decomposition"] = float(np.abs(axis_angle_form(x) - M).max())
    return out


@dataclass(frozen=True)
class AppendixCoeffs:
    """Coefficient tables for the differential of the Cartan matrix.

    ``gamma_bar[c, i]`` contracts frame differentials, ``gamma[d, c]`` and
    ``gamma3[a, b, c]`` contract spatial ones, ``Gamma1`` and ``Gamma2`` are
    the rank-4 bracket corrections, ``P`` is the auxiliary 3x3 table and
    ``psi`` is the vector psi(L, L3).  ``gamma_printed`` holds the closed form
    as written in the source, kept for comparison only.
    """

    L: np.ndarray
    L3: float
    R: np.ndarray
    f1: float
    f2: float
    gamma_bar: np.ndarray
    gamma: np.ndarray
    gamma3: np.ndarray
    gamma_printed: np.ndarray
    P: np.ndarray
    Gamma1: np.ndarray
    Gamma2: np.ndarray
    psi: np.ndarray

    def dcartan(self, dL) -> np.ndarray:
        """First-order change of [sign(L3) L] for a spatial step dL (spatial form)."""
        return np.einsum("abc,bi,c->ai", self.gamma3, self.R, np.asarray(dL, float))

    def dcartan_frame(self, dL) -> np.ndarray:
        """Same change evaluated through the frame-component form."""
        dLf = self.R.T @ np.asarray(dL, float)
        return np.einsum("abc,bi,cj,j->ai", LEVI, self.R, self.gamma_bar, dLf)


def psi_vector(x, y) -> np.ndarray:
    """psi(x, y) = sign(y) (x + e3 y) / (x3 + y)."""
    x = np.asarray(x, dtype=float)
    den = x[2] + y
    if den == 0.0:
        raise DivergentKernel("x3 + y vanishes in psi(x, y)")
    return np.sign(y) * (x + E3 * y) / den


def appendix_coeffs(L, L3) -> AppendixCoeffs:
    """Evaluate the appendix tables at angular momentum ``L`` with frame value ``L3``.

    ``L3`` carries the chart sign: ``L3 = sign * |L|``.  The kernels use
    ``x = L`` and ``u = L3`` so that f_k = u^-k / (u + x_z).
    """
    x = np.asarray(L, dtype=float)
    u = float(L3)
    norm = float(np.linalg.norm(x))
    if u == 0.0 or norm == 0.0:
        raise DivergentKernel("u = L3 vanishes")
    if abs(abs(u) - norm) > 1e-9 * norm:
        raise ValueError("L3 must equal +-|L|")
    if abs(u + x[2]) < ANTIPODE_TOL * norm:
        raise DivergentKernel("u + x_z vanishes (antipodal direction)")
    eps = np.sign(u)
    try:
        R = cartan_matrix(eps * x)
    except DegenerateDirection as exc:
        raise AntipodalAngularMomentum(str(exc)) from exc
    f1 = 1.0 / (u * (u + x[2]))
    f2 = f1 / u
    # gamma_bar[c, i] = delta_cz f1 sum_a eps_{i a z} x_a + eps_{c i z} / u
    lin = np.einsum("ia,a->i", LEVI[:, :, 2], x)
    gamma_bar = LEVI[:, :, 2] / u
    gamma_bar[2, :] += f1 * lin
    gamma = gamma_bar @ R.T
    gamma3 = np.einsum("abd,dc->abc", LEVI, gamma)
    gamma_printed = LEVI[:, :, 2] / u
    gamma_printed[2, :] -= f1 * lin
    xe = np.array([1.0, -1.0, 0.0])
    ug = x + E3 * u
    P = np.zeros((3, 3))
    for e in range(3):
        for f in range(3):
            P[e, f] = sum(LEVI[e, f, g] * (u + (e == 2) * x[e]) * ug[g] for g in range(3))
    inner = P.copy()
    for e in range(2):
        for f in range(2):
            inner[e, f] += xe[f] * x[e] * x[1 - f]
    Gamma1 = f2 * np.einsum("abe,cdf,ef->abcd", LEVI, LEVI, inner)
    Gamma2 = f1 * np.einsum("abe,cdf,efg,g->abcd", LEVI, LEVI, LEVI, ug)
    return AppendixCoeffs(L=x, L3=u, R=R, f1=f1, f2=f2, gamma_bar=gamma_bar,
                          gamma=gamma, gamma3=gamma3, gamma_printed=gamma_printed,
                          P=P, Gamma1=Gamma1, Gamma2=Gamma2, psi=psi_vector(x, u))


def gamma_contractions(co: AppendixCoeffs):
    """Gamma1 and Gamma2 rebuilt from gamma3 by their contraction definitions."""
    g1 = np.einsum("aeb,cde->abcd", LEVI, co.gamma3)
    g2 = np.einsum("abe,cdf,efg,g->abcd", co.gamma3, co.gamma3, LEVI, co.L)
    return g1, g2


def cartan_jacobian_fd(L, eps: int = 1, h: float | None = None) -> np.ndarray:
    """Central finite differences of [eps L]; result[c, a, i] = d[a i]/dL_c."""
    L = np.asarray(L, dtype=float)
    if h is None:
        h = 1e-6 * max(1.0, float(np.linalg.norm(L)))
    out = np.empty((3, 3, 3))
    for c in range(3):
        e = np.zeros(3)
        e[c] = h
        out[c] = (cartan_matrix(eps * (L + e)) - cartan_matrix(eps * (L - e))) / (2 * h)
    return out


def amf_reduce(A, eps: int = 1) -> np.ndarray:
    """Rotate a 3x3 Hermitian u(3) element into the angular-momentum frame.

    Returns ``B = R^T A R`` with ``R = [eps L(A)]`` so that L(B) = (0, 0, eps |L|).
    """
    from .poisson import angular_momentum

    A = np.asarray(A, dtype=complex)
    Lv = angular_momentum(A)
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    try:
        R = cartan_matrix(eps * Lv)
    except DegenerateDirection as exc:
        raise AntipodalAngularMomentum(
            f"L(A) = {Lv.tolist()} lies outside the chart of sign {eps:+d}") from exc
    return R.T @ A @ R
