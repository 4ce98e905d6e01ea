"""Volume integrals of the (L, Q) projection, branching multiplicities of
u(3) -> so(3) with their parity corrections, and the Bohr-Sommerfeld
spectrum of the wobbling momentum Q.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq
from scipy.special import ellipk as _ellipk

from .action_angle import delta_array
from .errors import (LOutOfRange, NoStates, ParameterOutOfRange,
                     QuadratureFailure, RootBracketFailure)
from .orbit import hfun, q_bar, q_range
from .poisson import WeightVector

DEFAULT_QUAD_TOL = 1e-10


def quad_tol() -> float:
    """Absolute quadrature tolerance; ORBITA_QUAD_TOL overrides the default."""
    raw = os.environ.get("ORBITA_QUAD_TOL")
    if raw is None or raw == "":
        return DEFAULT_QUAD_TOL
    val = float(raw)
    if not val > 0:
        raise ParameterOutOfRange(f"ORBITA_QUAD_TOL must be positive, got {raw!r}")
    return val


# ---------------------------------------------------------------------------
# volume integrals
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4096)
def _delta_fn(p: tuple, L: float):
    """Scalar Delta_[L, t] with the L-dependent constants hoisted.

    Same formula as ``action_angle.delta_array``; quad calls the integrand
    one point at a time, so per-call overhead dominates the volume cost.
    """
    pv = WeightVector(*p)
    S1, SA, p2 = pv.S1, pv.SA, pv.p2
    SL = float(pv.SL(L))
    c0 = -(4 * SA + 9 * L * L * S1) / (8 * SL ** 3)
    c1 = 27 * L * L / (8 * SL ** 3)
    m, r = S1 / 3.0, 2.0 * SL / 3.0
    tpi = 2.0 * math.pi / 3.0
    half_L = 0.5 * L

    def f(Q: float) -> float:
        g = math.acos(min(1.0, max(-1.0, c0 + c1 * Q))) / 3.0
        a = m + r * math.cos(g)
        b = m + r * math.cos(g - tpi)
        c = m + r * math.cos(g - 2 * tpi)
        if Q < p2:
            C = (a - Q) * (b - c)
            den = (b - c) * (a - Q)
            B = (a - b) * (Q - c) / den if den != 0 else 0.0
        else:
            C = (a - b) * (Q - c)
            den = (a - b) * (Q - c)
            B = (b - c) * (a - Q) / den if den != 0 else 0.0
        if C <= 0:
            return math.inf
        return half_L * float(_ellipk(min(1.0, max(0.0, B)))) / math.sqrt(C)

    return f


def _panel(pv: WeightVector, L: float, a: float, b: float, tol: float) -> float:
    """(2/pi) int_a^b Delta dt on one panel free of interior singularities."""
    if b <= a:
        return 0.0
    f = _delta_fn((float(pv.p1), float(pv.p2), float(pv.p3)), float(L))
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, err = quad(f, a, b, epsabs=tol, epsrel=1e-12, limit=200)
            return 2.0 / math.pi * val
        except IntegrationWarning:
            pass
    from scipy.integrate import tanhsinh

    res = tanhsinh(lambda t: delta_array(pv, L, t), a, b, atol=tol, rtol=1e-12, maxlevel=14)
    if not res.success:
        raise QuadratureFailure(
            f"volume panel [{a}, {b}] at L = {L} did not converge (error ~ {float(res.error):.3g})")
    return 2.0 / math.pi * float(res.integral)


def volume_Q(pv: WeightVector, L: float, Q: float | None = None, tol: float | None = None) -> float:
    """V_L(Q) = (2/pi) int_{Q_min}^{Q} Delta_[L,t] dt; Q defaults to Q_max.

    The integration range is split at p2, where K(B) has its logarithmic
    singularity.
    """
    tol = quad_tol() if tol is None else tol
    qmin, qmax = q_range(L, pv)
    if Q is None:
        Q = qmax
    sc = max(1.0, pv.L_max)
    if not (qmin - 1e-12 * sc <= Q <= qmax + 1e-12 * sc):
        raise LOutOfRange(f"Q = {Q} outside [{qmin}, {qmax}] at L = {L}")
    Q = min(max(Q, qmin), qmax)
    if L == 0 or Q <= qmin:
        return 0.0
    if qmin < pv.p2 < Q:
        return _panel(pv, L, qmin, pv.p2, tol) + _panel(pv, L, pv.p2, Q, tol)
    return _panel(pv, L, qmin, Q, tol)


def volume_closed(lam: int, mu: int, L: int) -> int:
    """Integer volume: L, then min(lam, mu), then lam + mu - L."""
    lo, hi = min(lam, mu), max(lam, mu)
    if not 0 <= L <= lam + mu:
        raise LOutOfRange(f"L = {L} outside [0, {lam + mu}]")
    if L <= lo:
        return L
    if L <= hi:
        return lo
    return lam + mu - L


def volume_closed_real(pv: WeightVector, L: float) -> float:
    """The same piecewise-linear volume at real arguments."""
    lam, mu = pv.lam, pv.mu
    lo, hi = min(lam, mu), max(lam, mu)
    if L <= lo:
        return L
    if L <= hi:
        return lo
    return lam + mu - L


def total_volume(pv: WeightVector) -> float:
    """lam mu (lam + mu) / 2."""
    return 0.5 * pv.lam * pv.mu * (pv.lam + pv.mu)


def total_volume_quadrature(pv: WeightVector, n: int = 64) -> float:
    """int_0^{lam+mu} L V_L dL by Gauss-Legendre panels between the kinks of V_L.

    Each node evaluates V_L by quadrature in Q.
    """
    lam, mu = pv.lam, pv.mu
    knots = sorted({0.0, min(lam, mu), max(lam, mu), lam + mu})
    x, w = np.polynomial.legendre.leggauss(n)
    tot = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        if b <= a:
            continue
        Ls = 0.5 * (b - a) * x + 0.5 * (b + a)
        vals = np.array([L * volume_Q(pv, float(L)) for L in Ls])
        tot += 0.5 * (b - a) * float(np.dot(w, vals))
    return tot


def dimension(lam: int, mu: int) -> int:
    """dim of the u(3) irrep, (1 + lam)(1 + mu)(2 + lam + mu)/2."""
    return (1 + lam) * (1 + mu) * (2 + lam + mu) // 2


class VolumeProfile:
    """Cumulative V_L(Q) on panels, for fast repeated evaluation and inversion."""

    def __init__(self, pv: WeightVector, L: float, panels: int = 12, tol: float | None = None):
        self.pv, self.L = pv, float(L)
        self.tol = quad_tol() if tol is None else tol
        self.qmin, self.qmax = q_range(L, pv)
        nodes = list(np.linspace(self.qmin, self.qmax, panels + 1))
        if self.qmin < pv.p2 < self.qmax:
            nodes.append(pv.p2)
        self.nodes = np.array(sorted(set(nodes)))
        cum = [0.0]
        for a, b in zip(self.nodes[:-1], self.nodes[1:]):
            cum.append(cum[-1] + (_panel(pv, self.L, a, b, self.tol) if self.L > 0 else 0.0))
        self.cum = np.array(cum)

    @property
    def total(self) -> float:
        return float(self.cum[-1])

    def __call__(self, Q: float) -> float:
        if Q <= self.qmin:
            return 0.0
        if Q >= self.qmax:
            return self.total
        j = int(np.searchsorted(self.nodes, Q, side="right") - 1)
        return float(self.cum[j] + _panel(self.pv, self.L, self.nodes[j], Q, self.tol))

    def inverse(self, target: float, xtol: float = 1e-13) -> float:
        """The Q with V_L(Q) = target; endpoints are returned exactly for targets 0 and V_max."""
        tot = self.total
        if target <= 0.0:
            return self.qmin
        if target >= tot:
            if target - tot > 1e-8:
                raise RootBracketFailure(f"target {target} above V_max = {tot}")
            return self.qmax
        j = int(np.searchsorted(self.cum, target, side="right") - 1)
        j = min(j, len(self.nodes) - 2)
        a, b = self.nodes[j], self.nodes[j + 1]
        f = lambda q: self.cum[j] + _panel(self.pv, self.L, a, q, self.tol) - target  # noqa: E731
        fa, fb = self.cum[j] - target, self.cum[j + 1] - target
        if fa == 0:
            return float(a)
        if fb == 0:
            return float(b)
        if fa * fb > 0:
            raise RootBracketFailure(f"no sign change on [{a}, {b}] for target {target}")
        return float(brentq(f, a, b, xtol=xtol * max(1.0, abs(b)), rtol=1e-15, maxiter=200))


# ---------------------------------------------------------------------------
# branching
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _elliott_table(lam: int, mu: int) -> tuple:
    hi, lo = max(lam, mu), min(lam, mu)
    d = [0] * (lam + mu + 1)
    K = lo
    while K >= 0:
        if K > 0:
            for L in range(K, K + hi + 1):
                d[L] += 1
        else:
            for L in range(hi, -1, -2):
                d[L] += 1
        K -= 2
    return tuple(d)


def elliott_d(lam: int, mu: int, L: int) -> int:
    """Multiplicity of so(3) irrep L in su(3) irrep (lam, mu) by the K-band rule."""
    if L < 0 or L > lam + mu:
        return 0
    return _elliott_table(int(lam), int(mu))[L]


@dataclass(frozen=True)
class BranchingRecord:
    lam: int
    mu: int
    L: int
    d: int
    V: int
    delta_inner: int
    delta: int
    m1: int
    m2: int
    mL: int
    M1: int
    M2: int
    t1: int
    t2: int

    @property
    def d_from_volume(self) -> float:
        return (self.V - self.delta) / 2 + 1


def delta_bits(lam: int, mu: int, L: int) -> dict:
    m1, m2, mL = lam % 2, mu % 2, L % 2
    M1, M2 = m1 ^ mL, m2 ^ mL
    ML = mL
    inner = m1 + m2 + mL - 2 * ((m1 + m2) * ML + m1 * m2) + 4 * m1 * m2 * mL
    t1, t2 = int(L <= lam), int(L <= mu)
    return dict(m1=m1, m2=m2, mL=mL, M1=M1, M2=M2, ML=ML, t1=t1, t2=t2,
                inner=inner, delta=inner + M1 * t1 + M2 * t2)


def branching_d(lam: int, mu: int, L: int) -> BranchingRecord:
    """Multiplicity, integer volume and parity correction at (lam, mu, L)."""
    for v in (lam, mu, L):
        if int(v) != v or v < 0:
            raise ParameterOutOfRange("lam, mu and L must be nonnegative integers")
    lam, mu, L = int(lam), int(mu), int(L)
    b = delta_bits(lam, mu, L)
    V = volume_closed(lam, mu, L) if L <= lam + mu else 0
    return BranchingRecord(lam, mu, L, elliott_d(lam, mu, L), V, b["inner"], b["delta"],
                           b["m1"], b["m2"], b["mL"], b["M1"], b["M2"], b["t1"], b["t2"])


def u_s(delta: int, s: float) -> float:
    """u_s(0) = 0, u_s(1) = (1 + s)/4, u_s(2) = u_s(3) = (3 + s)/4."""
    if not -1.0 <= s <= 1.0:
        raise ParameterOutOfRange(f"|s| <= 1 required, got {s}")
    return (0.0, 0.25 * (1 + s), 0.25 * (3 + s), 0.25 * (3 + s))[int(delta)]


def Delta_s(lam: int, mu: int, L: int, s: float) -> float:
    """Odd-gap correction; linear in s between the s = -1 and s = +1 forms."""
    b = delta_bits(lam, mu, L)
    m1, m2, mL, M1, M2, ML = b["m1"], b["m2"], b["mL"], b["M1"], b["M2"], b["ML"]
    d_plus = M2 * (m1 * mL + m2 * (1 - mL - m1 * mL))
    d_minus = -m2 * M1 * (m1 - M2 * (1 - mL) + mL - 2 * m1 * ML)
    return 0.5 * (1 + s) * d_plus + 0.5 * (1 - s) * d_minus


def u_bar(lam: int, mu: int, L: int, s: float) -> float:
    """u_bar_s = u_s(delta) - Delta_s / 2 (reduces to u_s when lam and mu are even)."""
    b = delta_bits(lam, mu, L)
    return u_s(b["delta"], s) - 0.5 * Delta_s(lam, mu, L, s)


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def _integral_orbit(pv: WeightVector) -> tuple:
    lam, mu = pv.lam, pv.mu
    if not (float(lam).is_integer() and float(mu).is_integer()):
        raise ParameterOutOfRange("quantization needs integer lam and mu")
    return int(lam), int(mu)


def L0_limit_Q(pv: WeightVector, target: float = 0.5) -> float:
    """Q solving lim_{L->0} V_L(Q)/L = target.

    As L -> 0, V_L(Q)/L -> (1/pi) int_{p3}^{Q} K(B0)/sqrt(C0) dt with the
    L = 0 roots (P1, P2, P3) = (p1, p2, p3).
    """
    p1, p2, p3 = pv.p
    from scipy.special import ellipk as K

    def integrand(t):
        if t < p2:
            C = (p1 - t) * (p2 - p3)
            B = (p1 - p2) * (t - p3) / ((p2 - p3) * (p1 - t))
        else:
            C = (p1 - p2) * (t - p3)
            B = (p2 - p3) * (p1 - t) / ((p1 - p2) * (t - p3))
        return K(min(max(B, 0.0), 1.0)) / math.sqrt(C)

    def f0(Q):
        if Q <= p2:
            v = quad(integrand, p3, Q, limit=200, epsabs=1e-13)[0]
        else:
            v = quad(integrand, p3, p2, limit=200, epsabs=1e-13)[0] \
                + quad(integrand, p2, Q, limit=200, epsabs=1e-13)[0]
        return v / math.pi - target

    return float(brentq(f0, p3 + 1e-12 * (p1 - p3), p1 - 1e-12 * (p1 - p3), xtol=1e-13))


@dataclass(frozen=True)
class SpectrumRow:
    L: int
    k: int
    k_u: float
    u: float
    Q: float
    target: float
    band: str = ""


def bs_levels(pv: WeightVector, L: int, s: float, profile: VolumeProfile | None = None) -> list:
    """Quantized Q_{L,k}, k = 1..d, from V_L(Q) = 2(k + u - 1)."""
    lam, mu = _integral_orbit(pv)
    rec = branching_d(lam, mu, L)
    if rec.d == 0:
        raise NoStates(f"no L = {L} states in ({lam}, {mu})")
    u = u_bar(lam, mu, L, s)
    if L == 0:
        if rec.d != 1:
            raise NoStates("only the L = 0 singlet is assigned")
        return [SpectrumRow(0, 1, 1 + u, u, L0_limit_Q(pv), 0.0, "singlet")]
    prof = profile or VolumeProfile(pv, L)
    rows = []
    for k in range(1, rec.d + 1):
        target = 2.0 * (k + u - 1)
        rows.append(SpectrumRow(L, k, k + u, u, prof.inverse(target), target))
    return rows


@dataclass
class SpectrumTable:
    pv: WeightVector
    s: float
    rows: list = field(default_factory=list)
    q_pi: float = float("nan")

    def for_L(self, L: int) -> list:
        return [r for r in self.rows if r.L == L]

    def counts(self) -> dict:
        out = {}
        for r in self.rows:
            out[r.L] = out.get(r.L, 0) + 1
        return out


def bs_spectrum(pv: WeightVector, s: float, L_values=None) -> SpectrumTable:
    """Bohr-Sommerfeld spectrum for every L with d >= 1 (or the given L values)."""
    lam, mu = _integral_orbit(pv)
    Ls = range(0, lam + mu + 1) if L_values is None else L_values
    rows = []
    for L in Ls:
        if elliott_d(lam, mu, L) == 0:
            continue
        rows.extend(bs_levels(pv, L, s))
    rows.sort(key=lambda r: (r.L, r.k))
    return SpectrumTable(pv, s, rows, L0_limit_Q(pv))


# ---------------------------------------------------------------------------
# the Pi sequence
# ---------------------------------------------------------------------------

def q_pi_closed(p1: float, p2: float, p3: float) -> float:
    """Rational closed form quoted for lam <= mu."""
    return (2 * (p1 + p2) ** 3 + 3 * (p1 - 5 * p2) * (5 * p1 - p2) * p3
            + 24 * (p1 + p2) * p3 ** 2 - 16 * p3 ** 3) / (27 * (p1 - p2) ** 2)


@dataclass(frozen=True)
class PiSequence:
    q_bar: float
    q_closed: float
    q_closed_unswapped: float
    q_limit: float
    members: tuple

    @property
    def spread(self) -> float:
        qs = [m[2] for m in self.members]
        return float(max(qs) - min(qs)) if qs else 0.0


def pi_sequence(pv: WeightVector, s: int) -> PiSequence:
    """Q_Pi by its three candidate readings and the Pi_s members (L, k, Q).

    ``q_bar`` is Q_{sign(lam - mu)}(min(lam, mu)); ``q_closed`` the rational
    closed form with the weight reversal applied when lam > mu;
    ``q_limit`` the L -> 0 limit of the Pi members (V_L(Q) = L / 2).
    """
    lam, mu = _integral_orbit(pv)
    lo = min(lam, mu)
    sg = 1 if lam > mu else -1
    qb = float(q_bar(pv, lo, sg)) if lo > 0 else float("nan")
    p1, p2, p3 = pv.p
    unswapped = q_pi_closed(p1, p2, p3) if p1 != p2 else float("nan")
    closed = unswapped if lam <= mu else q_pi_closed(p3, p2, p1)
    members = []
    if s not in (1, -1):
        raise ParameterOutOfRange("the Pi sequence is defined for s = +1 and s = -1")
    k = 1
    while True:
        L, kk = (4 * k, k + 1) if s == 1 else (4 * k - 1, k)
        if L > lo:
            break
        d = elliott_d(lam, mu, L)
        if kk <= d:
            row = [r for r in bs_levels(pv, L, s) if r.k == kk][0]
            members.append((L, kk, row.Q))
        k += 1
    return PiSequence(qb, closed, unswapped, L0_limit_Q(pv), tuple(members))


# ---------------------------------------------------------------------------
# band polylines of the spectrum
# ---------------------------------------------------------------------------

def band_polylines(table: SpectrumTable) -> dict:
    """Polylines joining quantized states that lie on the classical band curves.

    P-: lowest state (V = 0) for L in [lam, h(lam, mu)];
    S3: lowest state (V = 0) for L in [0, lam];
    P+: highest state (V = V_max) for L in [mu, h(mu, lam)];
    S1: highest state (V = V_max) for L in [0, mu].
    States of the same k at the other parity form the ``*_off`` siblings.
    The Pi polyline joins the L = 0 singlet with the Pi members.
    """
    pv = table.pv
    lam, mu = int(pv.lam), int(pv.mu)
    by_L = {}
    for r in table.rows:
        by_L.setdefault(r.L, []).append(r)
    out = {k: [] for k in ("P-", "P-_off", "S3", "S3_off", "P+", "P+_off", "S1", "S1_off")}
    for L, rows in sorted(by_L.items()):
        if L == 0:
            continue
        rows = sorted(rows, key=lambda r: r.k)
        low, top = rows[0], rows[-1]
        V = volume_closed(lam, mu, L)
        on_low = abs(low.target) < 1e-12
        on_top = abs(top.target - V) < 1e-12
        if lam <= L <= hfun(lam, mu):
            out["P-" if on_low else "P-_off"].append((L, low.Q))
        if L <= lam:
            out["S3" if on_low else "S3_off"].append((L, low.Q))
        if mu <= L <= hfun(mu, lam):
            out["P+" if on_top else "P+_off"].append((L, top.Q))
        if L <= mu:
            out["S1" if on_top else "S1_off"].append((L, top.Q))
    pi = pi_sequence(pv, 1 if table.s >= 0 else -1)
    out["Pi"] = [(0, pi.q_limit)] + [(m[0], m[2]) for m in pi.members]
    return out


def gap(polyline: list) -> set:
    """Set of consecutive L differences along a polyline."""
    Ls = [p[0] for p in polyline]
    return {b - a for a, b in zip(Ls[:-1], Ls[1:])}
