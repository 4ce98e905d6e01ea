"""The u*(3) Poisson algebra, its seven-generator SO(3)-reduced form and
the Casimir functions.

Two independent bracket evaluators for the reduced algebra are provided:

* ``oracle_tensor`` evaluates the general B-matrix bracket formula and is the
  authoritative definition;
* ``table_tensor`` is the closed-form table of generator brackets derived
  from it (entries that differ from the printed table are listed in
  ``PRINTED_TABLE_CONFLICTS``).
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Callable, Sequence, Union

import numpy as np

from .cartan import LEVI
from .errors import DegenerateOrbit, ZeroAngularMomentum

GENERATORS = ("L3", "Q1", "Q2", "Q3", "q1", "q2", "q3")
_IX = {g: i for i, g in enumerate(GENERATORS)}


# ---------------------------------------------------------------------------
# weight vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightVector:
    """Orbit label p = (p1, p2, p3) with p1 > p2 > p3."""

    p1: float
    p2: float
    p3: float

    def __post_init__(self):
        vals = (self.p1, self.p2, self.p3)
        if not all(np.isfinite(v) for v in vals):
            raise DegenerateOrbit("weights must be finite")
        if not (self.p1 > self.p2 > self.p3):
            raise DegenerateOrbit(
                f"weights must satisfy p1 > p2 > p3, got {vals}")

    @classmethod
    def from_lam_mu(cls, lam, mu, p3=0.0):
        return cls(p3 + lam + mu, p3 + mu, p3)

    @property
    def p(self) -> np.ndarray:
        return np.array([self.p1, self.p2, self.p3], dtype=float)

    @property
    def lam(self) -> float:
        return self.p1 - self.p2

    @property
    def mu(self) -> float:
        return self.p2 - self.p3

    @property
    def L_max(self) -> float:
        return self.p1 - self.p3

    def S(self, k: int) -> float:
        return float(np.sum(self.p ** k))

    @property
    def S1(self):
        return self.p1 + self.p2 + self.p3

    @property
    def S2(self):
        return self.S(2)

    @property
    def S3(self):
        return self.S(3)

    @property
    def S11(self):
        p1, p2, p3 = self.p
        return p1 * p2 + p1 * p3 + p2 * p3

    @property
    def S111(self):
        return self.p1 * self.p2 * self.p3

    @property
    def SA(self):
        """S^A_111 = (p1+p2-2p3)(p2+p3-2p1)(p1+p3-2p2)."""
        p1, p2, p3 = self.p
        return (p1 + p2 - 2 * p3) * (p2 + p3 - 2 * p1) * (p1 + p3 - 2 * p2)

    @property
    def SB(self):
        """S^B_111 = (p1-p2)(p2-p3)(p1-p3); housed for completeness."""
        p1, p2, p3 = self.p
        return (p1 - p2) * (p2 - p3) * (p1 - p3)

    @property
    def mean(self):
        return self.S1 / 3.0

    @property
    def gmean(self):
        """Real cube root of p1 p2 p3."""
        return float(np.cbrt(self.S111))

    @property
    def Lbar2(self):
        return 4.0 / 3.0 * (self.S2 - self.S11)

    def SL(self, L):
        """S_L = sqrt(-3 L^2 + 4 (S2 - S11)) / 2 (vectorised in L)."""
        return 0.5 * np.sqrt(-3.0 * np.asarray(L, float) ** 2 + 4.0 * (self.S2 - self.S11))

    def G(self, x):
        """G_p(x) = (x - p1)(x - p2)(x - p3)."""
        x = np.asarray(x, dtype=float)
        return (x - self.p1) * (x - self.p2) * (x - self.p3)

    def dG(self, x):
        x = np.asarray(x, dtype=float)
        p1, p2, p3 = self.p
        return (x - p2) * (x - p3) + (x - p1) * (x - p3) + (x - p1) * (x - p2)

    def is_integral(self) -> bool:
        return float(self.lam).is_integer() and float(self.mu).is_integer()

    def __str__(self):
        return "[{:g},{:g},{:g}]".format(*self.p)


# ---------------------------------------------------------------------------
# full u(3) algebra
# ---------------------------------------------------------------------------

def angular_momentum(A) -> np.ndarray:
    """L_a(A) = -i sum_bc eps_abc A_bc (real for Hermitian A)."""
    A = np.asarray(A, dtype=complex)
    return np.real(-1j * np.einsum("abc,bc->a", LEVI, A))


def quadrupole(A) -> np.ndarray:
    """Real symmetric part Q_ab(A)."""
    A = np.asarray(A, dtype=complex)
    return np.real(0.5 * (A + A.T))


def element(L, Q) -> np.ndarray:
    """Hermitian matrix A = Q + (i/2) eps_abc L_c."""
    return np.asarray(Q, float) + 0.5j * np.einsum("abc,c->ab", LEVI, np.asarray(L, float))


def real_basis() -> list:
    """Coefficient matrices Z of the real basis (L_x, L_y, L_z, Q11, Q22, Q33, Q12, Q23, Q13).

    Each generator is the pairing ``sum_ab Z_ab A_ab``.
    """
    out = [-1j * LEVI[a] for a in range(3)]
    for a, b in ((0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)):
        E = np.zeros((3, 3), dtype=complex)
        E[a, b] += 0.5
        E[b, a] += 0.5
        out.append(E)
    return out


def complex_basis() -> list:
    """Matrix units E_ab, pairing to A_ab."""
    out = []
    for a in range(3):
        for b in range(3):
            E = np.zeros((3, 3), dtype=complex)
            E[a, b] = 1.0
            out.append(E)
    return out


def metric(basis: Sequence[np.ndarray]) -> np.ndarray:
    """Gram matrix g_mn = trace(Z_m Z_n^dagger)."""
    return np.array([[np.real(np.trace(a @ b.conj().T)) for b in basis] for a in basis])


def pair(A, Z) -> complex:
    """Value of the linear function Z at A: sum_ab Z_ab A_ab."""
    return np.sum(np.asarray(Z) * np.asarray(A))


def full_bracket(A, Zm, Zn, G: float = 1.0):
    """Lie-Poisson bracket -i trace(A^T [Zm, Zn]) of two linear functions.

    ``G`` scales the commutator of the symmetric (quadrupole) parts; G = 0
    gives the semidirect contraction in which quadrupoles commute.
    """
    Zm = np.asarray(Zm, dtype=complex)
    Zn = np.asarray(Zn, dtype=complex)
    Sm, Am = 0.5 * (Zm + Zm.T), 0.5 * (Zm - Zm.T)
    Sn, An = 0.5 * (Zn + Zn.T), 0.5 * (Zn - Zn.T)
    comm = (Am @ An - An @ Am) + (Am @ Sn - Sn @ Am) + (Sm @ An - An @ Sm) \
        + G * (Sm @ Sn - Sn @ Sm)
    val = -1j * np.sum(comm * np.asarray(A))
    return val.real if abs(val.imag) <= 1e-12 * max(1.0, abs(val)) else val


def full_poisson_matrix(A, basis=None, G: float = 1.0) -> np.ndarray:
    if basis is None:
        basis = real_basis()
    return np.array([[full_bracket(A, a, b, G) for b in basis] for a in basis])


def u3_from_particles(positions, momenta, masses, omega: float) -> np.ndarray:
    """Build the centre-of-mass-subtracted u(3) element of N particles (hbar = 1).

    A_ab = sum_n z_an conj(z_bn) - Z_a conj(Z_b) with
    z_an = (p_an + i k_n x_an) / sqrt(2 k_n), k_n = omega m_n, and Z the
    same combination for the centre of mass (total mass, total momentum).
    """
    x = np.atleast_2d(np.asarray(positions, dtype=float))
    p = np.atleast_2d(np.asarray(momenta, dtype=float))
    m = np.atleast_1d(np.asarray(masses, dtype=float))
    if x.shape != p.shape or x.shape[1] != 3 or x.shape[0] != m.shape[0]:
        raise ValueError("positions and momenta must be (N, 3) and masses (N,)")
    if x.shape[0] < 1 or np.any(m <= 0) or not omega > 0:
        raise ValueError("need N >= 1, positive masses and positive omega")
    kap = omega * m
    z = (p + 1j * kap[:, None] * x) / np.sqrt(2 * kap)[:, None]
    A = np.einsum("na,nb->ab", z, z.conj())
    M = m.sum()
    X = (m[:, None] * x).sum(axis=0) / M
    P = p.sum(axis=0)
    K = omega * M
    Z = (P + 1j * K * X) / np.sqrt(2 * K)
    A = A - np.outer(Z, Z.conj())
    return 0.5 * (A + A.conj().T)


# ---------------------------------------------------------------------------
# reduced algebra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReducedState:
    """Seven generators of the reduced algebra."""

    L3: float
    Q1: float
    Q2: float
    Q3: float
    q1: float
    q2: float
    q3: float

    @classmethod
    def from_array(cls, v) -> "ReducedState":
        return cls(*[float(t) for t in np.asarray(v, float)])

    @classmethod
    def from_matrix(cls, B) -> "ReducedState":
        B = np.asarray(B, dtype=complex)
        return cls(float(np.real(-1j * (B[0, 1] - B[1, 0]))),
                   float(B[0, 0].real), float(B[1, 1].real), float(B[2, 2].real),
                   float(np.real(B[1, 2] + B[2, 1]) / 2),
                   float(np.real(B[0, 2] + B[2, 0]) / 2),
                   float(np.real(B[0, 1] + B[1, 0]) / 2))

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)], dtype=float)

    def matrix(self) -> np.ndarray:
        """The Hermitian matrix B with L1 = L2 = 0."""
        return np.array([[self.Q1, self.q3 + 0.5j * self.L3, self.q2],
                         [self.q3 - 0.5j * self.L3, self.Q2, self.q1],
                         [self.q2, self.q1, self.Q3]])

    def quadrupole(self) -> np.ndarray:
        return np.array([[self.Q1, self.q3, self.q2],
                         [self.q3, self.Q2, self.q1],
                         [self.q2, self.q1, self.Q3]])

    @property
    def Qplus(self):
        return 0.5 * (self.Q1 + self.Q2)

    @property
    def Qminus(self):
        return 0.5 * (self.Q1 - self.Q2)

    @property
    def Qbar1(self):
        return (self.Q1 - self.Q2) / np.sqrt(2.0)

    @property
    def Qbar2(self):
        return (2 * self.Q3 - self.Q1 - self.Q2) / np.sqrt(6.0)

    @property
    def R2(self):
        return self.q1 ** 2 + self.q2 ** 2


StateLike = Union[ReducedState, np.ndarray, Sequence[float]]


def _vec(s: StateLike) -> np.ndarray:
    if isinstance(s, ReducedState):
        return s.as_array()
    v = np.asarray(s, dtype=float)
    if v.shape != (7,):
        raise ValueError("a reduced state has seven components")
    return v


def _matrix(v: np.ndarray) -> np.ndarray:
    L3, Q1, Q2, Q3, q1, q2, q3 = v
    return np.array([[Q1, q3 + 0.5j * L3, q2],
                     [q3 - 0.5j * L3, Q2, q1],
                     [q2, q1, Q3]])


def _gamma_table() -> np.ndarray:
    """gamma[k, l, i, j] for the B-matrix bracket (0-based, index 2 is the z axis)."""
    d = np.eye(3)
    e3 = LEVI[:, :, 2]
    g = np.zeros((3, 3, 3, 3))
    for k in range(3):
        for l in range(3):
            for i in range(3):
                for j in range(3):
                    g[k, l, i, j] = (d[k, 2] * (d[j, 2] * e3[i, l] - d[l, 2] * e3[i, j])
                                     - d[i, 2] * (d[l, 2] * e3[j, k] + d[j, 2] * e3[k, l]))
    return g


GAMMA_KLIJ = _gamma_table()


def _generator_coefficients() -> np.ndarray:
    """C[g] with generator g = Re sum_ij C[g]_ij B_ij."""
    C = np.zeros((7, 3, 3), dtype=complex)
    C[0, 0, 1], C[0, 1, 0] = -1j, 1j
    C[1, 0, 0] = C[2, 1, 1] = C[3, 2, 2] = 1.0
    C[4, 1, 2] = C[4, 2, 1] = 0.5
    C[5, 0, 2] = C[5, 2, 0] = 0.5
    C[6, 0, 1] = C[6, 1, 0] = 0.5
    return C


GEN_COEFFS = _generator_coefficients()


def balg_tensor(B) -> np.ndarray:
    """All brackets {B_i1i2, B_j1j2} from the general B-matrix formula.

    Returns T[i1, i2, j1, j2]; requires L3 = -i (B12 - B21) nonzero.
    """
    B = np.asarray(B, dtype=complex)
    L3 = float(np.real(-1j * (B[0, 1] - B[1, 0])))
    if L3 == 0.0:
        raise ZeroAngularMomentum("the reduced bracket needs L3 != 0")
    d = np.eye(3)
    T = -1j * (np.einsum("bc,ad->abcd", d, B) - np.einsum("ad,cb->abcd", d, B))
    g = GAMMA_KLIJ
    S = (np.einsum("klac,kb,ld->abcd", g, B, B)
         + np.einsum("klbc,ak,ld->abcd", g, B, B)
         + np.einsum("klad,kb,cl->abcd", g, B, B)
         + np.einsum("klbd,ak,cl->abcd", g, B, B))
    return T + S / L3


def oracle_tensor(s: StateLike) -> np.ndarray:
    """7x7 matrix of generator brackets from the general B-matrix formula."""
    v = _vec(s)
    T = balg_tensor(_matrix(v))
    P = np.einsum("gij,ijkl,hkl->gh", GEN_COEFFS, T, GEN_COEFFS)
    return np.real(P)


def table_tensor(s: StateLike, G: float = 1.0) -> np.ndarray:
    """7x7 matrix of generator brackets from the closed-form table."""
    L, Q1, Q2, Q3, q1, q2, q3 = _vec(s)
    if L == 0.0:
        raise ZeroAngularMomentum("the reduced bracket needs L3 != 0")
    P = np.zeros((7, 7))
    gl = G * L * L / 4.0

    def put(a, b, v):
        P[_IX[a], _IX[b]] = v
        P[_IX[b], _IX[a]] = -v

    put("L3", "Q1", 2 * q3)
    put("L3", "Q2", -2 * q3)
    put("L3", "q1", -q2)
    put("L3", "q2", q1)
    put("L3", "q3", Q2 - Q1)
    put("Q1", "Q2", -4 * q1 * q2 / L)
    put("Q1", "Q3", 4 * q1 * q2 / L)
    put("Q2", "Q3", -4 * q1 * q2 / L)
    put("Q1", "q1", 2 * q2 * (Q2 - Q3) / L)
    put("Q1", "q2", 2 * q2 * q3 / L)
    put("Q1", "q3", 2 / L * (gl - q2 * q2))
    put("Q2", "q1", -2 * q1 * q3 / L)
    put("Q2", "q2", 2 * q1 * (Q3 - Q1) / L)
    put("Q2", "q3", 2 / L * (q1 * q1 - gl))
    put("Q3", "q1", 2 * (q1 * q3 + (Q3 - Q2) * q2) / L)
    put("Q3", "q2", 2 * (-q2 * q3 - (Q3 - Q1) * q1) / L)
    put("Q3", "q3", 2 * (q2 * q2 - q1 * q1) / L)
    put("q1", "q2", ((Q1 - Q3) * (Q2 - Q3) - q3 * q3 - gl) / L)
    put("q1", "q3", (q2 * q3 + q1 * (Q3 - Q2)) / L)
    put("q2", "q3", -(q1 * q3 + q2 * (Q3 - Q1)) / L)
    return P


def printed_table_tensor(s: StateLike, G: float = 1.0) -> np.ndarray:
    """The generator table exactly as printed in the source (kept for comparison)."""
    L, Q1, Q2, Q3, q1, q2, q3 = _vec(s)
    P = table_tensor(s, G)

    def put(a, b, v):
        P[_IX[a], _IX[b]] = v
        P[_IX[b], _IX[a]] = -v

    for k in ("Q1", "Q2", "Q3"):
        put(k, "L3", 0.0)
    put("Q2", "q1", 2 * q3 * q1 / L)
    put("Q3", "q3", 2 * (-q1 * q1 - q2 * q2) / L)
    return P


#: Entries where the printed table disagrees with the B-matrix formula.
PRINTED_TABLE_CONFLICTS = (
    ("Q1", "L3", "printed 0, derived -2 q3"),
    ("Q2", "L3", "printed 0, derived 2 q3"),
    ("Q2", "q1", "printed 2 q3 q1 / L3, derived -2 q1 q3 / L3"),
    ("Q3", "q3", "printed -2 (q1^2 + q2^2) / L3, derived 2 (q2^2 - q1^2) / L3"),
)

Generator = Union[str, Callable[[np.ndarray], float]]


def _gradient(f: Callable, v: np.ndarray, h: float | None = None) -> np.ndarray:
    if h is None:
        h = 1e-6 * max(1.0, float(np.abs(v).max()))
    g = np.empty(7)
    for k in range(7):
        e = np.zeros(7)
        e[k] = h
        g[k] = (f(v + e) - f(v - e)) / (2 * h)
    return g


def _as_gradient(f: Generator, v: np.ndarray) -> np.ndarray:
    if isinstance(f, str):
        if f not in _IX:
            raise KeyError(f"unknown generator {f!r}; expected one of {GENERATORS}")
        g = np.zeros(7)
        g[_IX[f]] = 1.0
        return g
    return _gradient(f, v)


def reduced_bracket_oracle(s: StateLike, f: Generator, g: Generator) -> float:
    """{f, g} from the B-matrix formula; f, g are generator labels or callables of the 7-vector."""
    v = _vec(s)
    return float(_as_gradient(f, v) @ oracle_tensor(v) @ _as_gradient(g, v))


def reduced_bracket_table(s: StateLike, G: float, f: Generator, g: Generator) -> float:
    """{f, g} from the closed-form generator table with structure parameter G."""
    if not 0.0 <= G <= 1.0:
        raise ValueError("structure parameter G must lie in [0, 1]")
    v = _vec(s)
    return float(_as_gradient(f, v) @ table_tensor(v, G) @ _as_gradient(g, v))


def casimirs(obj) -> tuple:
    """(C1, C2, C3) = trace of the first three powers of A or B."""
    if isinstance(obj, ReducedState):
        M = obj.matrix()
    else:
        a = np.asarray(obj)
        M = _matrix(a.astype(float)) if a.shape == (7,) else a.astype(complex)
    M2 = M @ M
    return (float(np.trace(M).real), float(np.trace(M2).real), float(np.trace(M2 @ M).real))


def casimir_functions():
    """C1, C2, C3 as callables of the seven-vector (for bracket tests)."""
    return tuple((lambda v, k=k: casimirs(np.asarray(v))[k]) for k in range(3))


def hamiltonian_field(s: StateLike, H: Callable, tensor=oracle_tensor) -> np.ndarray:
    """Time derivative x' = {x, H} of all seven generators."""
    v = _vec(s)
    return tensor(v) @ _gradient(H, v)


def jacobi_residual(s: StateLike, tensor=oracle_tensor, h: float | None = None) -> float:
    """Max over generator triples of |{x,{y,z}} + cyclic|, scaled by the bracket size.

    Nested brackets use central differences of the bracket functions.
    """
    v = _vec(s)
    if h is None:
        h = 1e-6 * max(1.0, float(np.abs(v).max()))
    P0 = tensor(v)
    # dP[k] = derivative of the tensor along generator k
    dP = np.empty((7, 7, 7))
    for k in range(7):
        e = np.zeros(7)
        e[k] = h
        dP[k] = (tensor(v + e) - tensor(v - e)) / (2 * h)
    # {x_a, {x_b, x_c}} = sum_k P[a, k] d_k P[b, c]
    nested = np.einsum("ak,kbc->abc", P0, dP)
    jac = nested + np.transpose(nested, (1, 2, 0)) + np.transpose(nested, (2, 0, 1))
    scale = max(1.0, float(np.abs(nested).max()))
    return float(np.abs(jac).max() / scale)
