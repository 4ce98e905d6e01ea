"""Legendre elliptic integrals, Jacobi amplitude and the quartic-root action
integrals I, J with the inverse of I.

All functions use the parameter convention m = k^2.  Incomplete integrals
go through Carlson's symmetric forms R_F and R_J (duplication algorithm);
K(m) uses the arithmetic-geometric mean; am/sn use the descending
Landen/AGM scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CharacteristicPole, OutsideClassicalRegion, ParameterOutOfRange

#: Below this value of 1 - m, K(m) switches to its logarithmic asymptotic.
LARGE_PERIOD_GAP = 1e-12


# ---------------------------------------------------------------------------
# Carlson symmetric forms
# ---------------------------------------------------------------------------

def carlson_rf(x, y, z, rtol: float = 1e-13):
    """R_F(x, y, z) for nonnegative arguments, at most one of them zero."""
    x, y, z = np.broadcast_arrays(*(np.asarray(t, dtype=float) for t in (x, y, z)))
    if np.any(x < 0) or np.any(y < 0) or np.any(z < 0):
        raise ParameterOutOfRange("R_F needs nonnegative arguments")
    x, y, z = x.copy(), y.copy(), z.copy()
    for _ in range(100):
        A = (x + y + z) / 3.0
        dev = np.max(np.abs(np.stack([A - x, A - y, A - z])) / np.maximum(np.abs(A), 1e-300))
        if dev < 1e-4:
            break
        sx, sy, sz = np.sqrt(x), np.sqrt(y), np.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        x, y, z = (x + lam) / 4.0, (y + lam) / 4.0, (z + lam) / 4.0
    A = (x + y + z) / 3.0
    X, Y = (A - x) / A, (A - y) / A
    Z = -(X + Y)
    E2 = X * Y - Z * Z
    E3 = X * Y * Z
    val = (1.0 - E2 / 10.0 + E3 / 14.0 + E2 * E2 / 24.0 - 3.0 * E2 * E3 / 44.0) / np.sqrt(A)
    return val if val.ndim else float(val)


def carlson_rc(x, y):
    """R_C(x, y) = R_F(x, y, y) for y > 0 (closed form)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.empty(np.broadcast(x, y).shape)
    x, y = np.broadcast_arrays(x, y)
    lt = x < y
    gt = x > y
    eq = ~(lt | gt)
    # arctan/arctanh forms stay accurate when x and y nearly coincide
    t = np.sqrt(y[lt] - x[lt])
    out[lt] = np.arctan2(t, np.sqrt(x[lt])) / t
    t = np.sqrt(x[gt] - y[gt])
    sx = np.sqrt(x[gt])
    near = t < 0.5 * sx
    out[gt] = np.where(near, np.arctanh(np.where(near, t / sx, 0.0)),
                       np.log((sx + t) / np.sqrt(y[gt]))) / t
    out[eq] = 1.0 / np.sqrt(y[eq])
    return out if out.ndim else float(out)


def carlson_rj(x, y, z, p, rtol: float = 1e-13):
    """R_J(x, y, z, p) for nonnegative x, y, z and positive p."""
    x, y, z, p = np.broadcast_arrays(*(np.asarray(t, dtype=float) for t in (x, y, z, p)))
    if np.any(p <= 0):
        raise CharacteristicPole("R_J needs p > 0 (pole of the third-kind integral)")
    if np.any(x < 0) or np.any(y < 0) or np.any(z < 0):
        raise ParameterOutOfRange("R_J needs nonnegative x, y, z")
    x, y, z, p = x.copy(), y.copy(), z.copy(), p.copy()
    total = np.zeros_like(x)
    fac = 1.0
    for _ in range(100):
        A = (x + y + z + 2.0 * p) / 5.0
        dev = np.max(np.abs(np.stack([A - x, A - y, A - z, A - p])) / np.maximum(np.abs(A), 1e-300))
        if dev < 1e-4:
            break
        sx, sy, sz, sp = np.sqrt(x), np.sqrt(y), np.sqrt(z), np.sqrt(p)
        lam = sx * sy + sx * sz + sy * sz
        d = (sp + sx) * (sp + sy) * (sp + sz)
        e = (p - x) * (p - y) * (p - z) / (d * d)
        total = total + 6.0 * fac * np.asarray(carlson_rc(1.0, 1.0 + e)) / d
        fac /= 4.0
        x, y, z, p = (x + lam) / 4.0, (y + lam) / 4.0, (z + lam) / 4.0, (p + lam) / 4.0
    A = (x + y + z + 2.0 * p) / 5.0
    X, Y, Z = (A - x) / A, (A - y) / A, (A - z) / A
    P = -(X + Y + Z) / 2.0
    E2 = X * Y + X * Z + Y * Z - 3.0 * P * P
    E3 = X * Y * Z + 2.0 * E2 * P + 4.0 * P ** 3
    E4 = (2.0 * X * Y * Z + E2 * P + 3.0 * P ** 3) * P
    E5 = X * Y * Z * P * P
    series = (1.0 - 3.0 * E2 / 14.0 + E3 / 6.0 + 9.0 * E2 * E2 / 88.0 - 3.0 * E4 / 22.0
              - 9.0 * E2 * E3 / 52.0 + 3.0 * E5 / 26.0)
    val = total + fac * series / (A * np.sqrt(A))
    return val if val.ndim else float(val)


# ---------------------------------------------------------------------------
# complete and incomplete Legendre integrals
# ---------------------------------------------------------------------------

def _agm(a: float, b: float) -> float:
    for _ in range(64):
        if abs(a - b) <= 1e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return a


def ellipk_flagged(m: float) -> tuple:
    """(K(m), large_period) where the flag marks the logarithmic regime 1 - m < 1e-12."""
    m = float(m)
    if m > 1.0 or math.isnan(m):
        raise ParameterOutOfRange(f"K(m) needs m <= 1, got {m}")
    gap = 1.0 - m
    if gap == 0.0:
        return math.inf, True
    if gap < LARGE_PERIOD_GAP:
        lg = math.log(4.0 / math.sqrt(gap))
        return lg + 0.25 * gap * (lg - 1.0), True
    return math.pi / (2.0 * _agm(1.0, math.sqrt(gap))), False


def ellipk(m):
    """Complete integral of the first kind K(m) (scalar or array)."""
    if np.ndim(m) == 0:
        return ellipk_flagged(m)[0]
    return np.vectorize(lambda t: ellipk_flagged(t)[0], otypes=[float])(m)


def ellipf(phi, m):
    """Incomplete integral of the first kind F(phi | m), real phi, m <= 1."""
    phi = np.asarray(phi, dtype=float)
    m = float(m)
    if m > 1.0:
        raise ParameterOutOfRange("F(phi|m) needs m <= 1")
    j = np.round(phi / np.pi)
    ph0 = phi - j * np.pi
    s, c = np.sin(ph0), np.cos(ph0)
    val = s * carlson_rf(c * c, 1.0 - m * s * s, np.ones_like(s))
    if np.any(j != 0):
        if m == 1.0:
            raise ParameterOutOfRange("F(phi|1) diverges beyond |phi| = pi/2")
        val = val + 2.0 * j * ellipk(m)
    return val if np.ndim(val) else float(val)


def ellippi(n, phi, m):
    """Incomplete integral of the third kind Pi(n; phi | m) for |phi| <= pi/2."""
    phi = np.asarray(phi, dtype=float)
    if np.any(np.abs(phi) > np.pi / 2 + 1e-15):
        raise ParameterOutOfRange("Pi(n; phi|m) implemented for |phi| <= pi/2")
    s, c = np.sin(phi), np.cos(phi)
    p = 1.0 - n * s * s
    if np.any(p <= 0):
        raise CharacteristicPole(f"characteristic n = {n} reaches its pole on the path")
    one = np.ones_like(s)
    val = s * carlson_rf(c * c, 1.0 - m * s * s, one) \
        + n / 3.0 * s ** 3 * carlson_rj(c * c, 1.0 - m * s * s, one, p)
    return val if np.ndim(val) else float(val)


def legendre(kind: str, *args):
    """Dispatch: legendre('K', m), legendre('F', phi, m), legendre('Pi', n, phi, m)."""
    kind = kind.upper()
    if kind == "K":
        return ellipk(*args)
    if kind == "F":
        return ellipf(*args)
    if kind in ("PI", "Π"):
        return ellippi(*args)
    raise ValueError(f"unknown integral kind {kind!r}")


# ---------------------------------------------------------------------------
# Jacobi amplitude
# ---------------------------------------------------------------------------

def jacobi_am(u, m):
    """Amplitude am(u, m) by the descending AGM scheme; m in [0, 1]."""
    u = np.asarray(u, dtype=float)
    m = float(m)
    if not 0.0 <= m <= 1.0:
        raise ParameterOutOfRange(f"am(u, m) needs 0 <= m <= 1, got {m}")
    if m == 0.0:
        out = u.copy()
    elif m == 1.0:
        out = 2.0 * np.arctan(np.tanh(0.5 * u))
    else:
        a, b, c = [1.0], [math.sqrt(1.0 - m)], [math.sqrt(m)]
        while abs(c[-1]) > 1e-16 and len(a) < 64:
            an, bn = a[-1], b[-1]
            a.append(0.5 * (an + bn))
            b.append(math.sqrt(an * bn))
            c.append(0.5 * (an - bn))
        n = len(a) - 1
        phi = (2.0 ** n) * a[n] * u
        for k in range(n, 0, -1):
            phi = 0.5 * (phi + np.arcsin(np.clip(c[k] / a[k] * np.sin(phi), -1.0, 1.0)))
        out = phi
    return out if out.ndim else float(out)


def jacobi_sn_am(u, m):
    """(sn(u, m), am(u, m))."""
    am = jacobi_am(u, m)
    return np.sin(am), am


def jacobi_sn(u, m):
    return jacobi_sn_am(u, m)[0]


# ---------------------------------------------------------------------------
# quartic-root action integrals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuarticRootData:
    """Roots [a, b, c, d] = [P1, P2, P3, Q] with branch sign sigma.

    sigma = -1: oscillation on [b, a] (Q below the middle weight);
    sigma = +1: oscillation on [c, b].  The +1 data are the -1 data of the
    tuple [c, b, a, d].
    """

    a: float
    b: float
    c: float
    d: float
    sigma: int

    def __post_init__(self):
        if self.sigma not in (1, -1):
            raise ValueError("sigma must be +1 or -1")

    @property
    def _abcd(self):
        if self.sigma < 0:
            return self.a, self.b, self.c, self.d
        return self.c, self.b, self.a, self.d

    @property
    def roots(self):
        return np.array([self.a, self.b, self.c, self.d])

    @property
    def B(self) -> float:
        a, b, c, d = self._abcd
        return (a - b) * (d - c) / ((b - c) * (a - d))

    @property
    def C(self) -> float:
        a, b, c, d = self._abcd
        return (a - d) * (b - c)

    @property
    def D(self) -> float:
        a, b, c, d = self._abcd
        return (a - b) / (a - d)

    def A(self, x):
        a, b, c, d = self._abcd
        x = np.asarray(x, dtype=float)
        return (a - d) * (x - b) / ((a - b) * (x - d))

    def A_inverse(self, s):
        """Mobius inverse of A: the x with A(x) = s."""
        a, b, c, d = self._abcd
        s = np.asarray(s, dtype=float)
        return (b * (a - d) - s * d * (a - b)) / ((a - d) - s * (a - b))

    @property
    def interval(self) -> tuple:
        """Oscillation interval (low, high)."""
        return (self.b, self.a) if self.sigma < 0 else (self.c, self.b)

    @property
    def far_root(self) -> float:
        """Turning point opposite to b: P_(2+sigma)."""
        return self.a if self.sigma < 0 else self.c

    def K(self) -> float:
        return ellipk(self.B)

    def _phi(self, x):
        lo, hi = self.interval
        x = np.asarray(x, dtype=float)
        span = hi - lo
        if np.any(x < lo - 1e-12 * max(1.0, span)) or np.any(x > hi + 1e-12 * max(1.0, span)):
            raise OutsideClassicalRegion(f"x outside oscillation interval [{lo}, {hi}]")
        A = np.clip(self.A(np.clip(x, lo, hi)), 0.0, 1.0)
        return np.arcsin(np.sqrt(A))

    def I(self, x):
        """I(x) = -2 C^-1/2 F(arcsin sqrt A(x) | B); I(b) = 0."""
        return -2.0 / math.sqrt(self.C) * ellipf(self._phi(x), self.B)

    def J(self, x):
        """J(x) = (b - d) 2 C^-1/2 Pi(D; arcsin sqrt A(x) | B); J(b) = 0."""
        return (self.b - self.d) * 2.0 / math.sqrt(self.C) * ellippi(self.D, self._phi(x), self.B)

    def I_J(self, x):
        return self.I(x), self.J(x)

    def I_inverse(self, y):
        """x = A^-1(sn^2(C^1/2 y / 2, B)), inverse of I on the interval."""
        sn = jacobi_sn(0.5 * math.sqrt(self.C) * np.asarray(y, dtype=float), self.B)
        return self.A_inverse(sn * sn)

    def I_inverse_factored(self, y):
        """(x, x - a', x - b', x - c') for x = I_inverse(y), with (a', b', c', d)
        the reindexed roots.

        The differences to the interval endpoints are formed from sn and cn
        of the same amplitude, so they keep full relative accuracy at the
        turning points where x touches a root.
        """
        a, b, c, d = self._abcd
        am = jacobi_am(0.5 * math.sqrt(self.C) * np.asarray(y, dtype=float), self.B)
        sn2, cn2 = np.sin(am) ** 2, np.cos(am) ** 2
        den = (a - d) - sn2 * (a - b)
        x = (b * (a - d) - sn2 * d * (a - b)) / den
        xa = -(a - b) * (a - d) * cn2 / den
        xb = sn2 * (a - b) * (b - d) / den
        return x, xa, xb, x - c

    def integrand(self, x, sign: int):
        """[u, x]_sign = (d - x)^(sign/2) prod_k (x - u_k)^(-1/2), real part of the principal branch."""
        x = complex(x)
        val = (self.d - x) ** (0.5 * sign) * ((x - self.a) * (x - self.b) * (x - self.c)) ** -0.5
        return val.real


def action_I_J(roots: QuarticRootData, x):
    return roots.I(x), roots.J(x)


def action_I_inverse(roots: QuarticRootData, y):
    return roots.I_inverse(y)
