"""Command-line front end: ``orbita verify | bands | spectrum | trajectory``.

Exit codes: 0 ok, 1 argument error, 2 domain error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import action_angle as AA
from . import io as oio
from . import orbit as O
from . import quantize as QZ
from . import verify as VF
from .errors import DomainError, NumericalError, OrbitaError
from .poisson import WeightVector, casimirs

log = logging.getLogger("orbita")

EXIT_OK, EXIT_ARGS, EXIT_DOMAIN, EXIT_NUMERIC = 0, 1, 2, 3

BAND_COLUMNS = ("band", "L", "p", "Q", "P1", "P2", "P3", "beta", "Gamma", "x", "y",
                "E_factor", "stability")
SPECTRUM_COLUMNS = ("L", "k", "Q", "u", "k_u", "target", "d")
POLYLINE_COLUMNS = ("polyline", "L", "Q", "dL")
TRAJECTORY_COLUMNS = ("t", "L", "Q", "psi", "theta", "p", "gamma", "phi", "H", "C1", "C2", "C3")
FORMATS = ("csv", "json", "svg")


class ArgumentError(Exception):
    """Invalid command-line input (exit code 1)."""


@dataclass
class RunConfig:
    """Everything a subcommand needs, validated once."""

    orbit: WeightVector
    r: float = 1.0
    s_H: float = 2.0
    omega: float = 1.0
    E0: float = 0.0
    s: float | None = None
    l_steps: int = 41
    samples: int = 201
    t_end: float | None = None
    formats: tuple = ("csv",)
    out: Path = Path(".")
    oracle: bool = False
    suites: tuple = ()
    tolerances: dict = field(default_factory=dict)
    quick: bool = False
    L: float | None = None
    Q: float | None = None
    theta0: float = 0.0
    psi0: float = 0.0

    def meta(self) -> dict:
        params = {"r": self.r, "s_H": self.s_H, "omega": self.omega, "E0": self.E0}
        if self.s is not None:
            params["s"] = self.s
        return oio.make_meta(self.orbit.p, params, {**VF.TOLERANCES, **self.tolerances,
                                                   "quad": QZ.quad_tol()})

    @property
    def tag(self) -> str:
        return "_".join(f"{x:g}" for x in self.orbit.p)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _floats(text: str, n: int, what: str) -> list:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise ArgumentError(f"{what} must be {n} comma-separated numbers, got {text!r}")
    if len(vals) != n:
        raise ArgumentError(f"{what} must be {n} comma-separated numbers, got {text!r}")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("orbit")
    g.add_argument("--p", help="weights p1,p2,p3 with p1 > p2 > p3")
    g.add_argument("--lam", type=float, help="lam = p1 - p2 (use with --mu)")
    g.add_argument("--mu", type=float, help="mu = p2 - p3 (use with --lam)")
    g.add_argument("--p3", type=float, default=0.0, help="lowest weight (default 0)")
    h = common.add_argument_group("Hamiltonian")
    h.add_argument("--r", type=float, default=1.0, help="r-rigid-body parameter, r <= 2")
    h.add_argument("--s-h", dest="s_h", type=float, default=2.0,
                   help="det-Q family exponent parameter s_H >= 0")
    h.add_argument("--omega", type=float, default=1.0)
    h.add_argument("--E0", type=float, default=0.0)
    o = common.add_argument_group("output")
    o.add_argument("--format", default="csv",
                   help="comma-separated subset of csv,json,svg (default csv)")
    o.add_argument("--out", default=".", help="output directory (default .)")
    o.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                   help="override a verification tolerance; repeatable")
    o.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="orbita", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"orbita {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run invariant suites")
    v.add_argument("--suite", action="append", default=[], choices=sorted(VF.SUITES),
                   help="suite to run (repeatable; default all)")
    v.add_argument("--quick", action="store_true", help="smaller samples and sweeps")

    b = sub.add_parser("bands", parents=[common], help="S and P band tables")
    b.add_argument("--l-steps", type=int, default=41, help="L grid points per band")

    s = sub.add_parser("spectrum", parents=[common], help="Bohr-Sommerfeld spectrum")
    s.add_argument("--s", type=float, required=True, help="branch parameter s in [-1, 1]")

    t = sub.add_parser("trajectory", parents=[common], help="closed-form trajectory")
    t.add_argument("--L", type=float, help="angular momentum (default L_max / 2)")
    t.add_argument("--Q", type=float, help="wobbling momentum (default mid-range below p2)")
    t.add_argument("--theta0", type=float, default=0.0)
    t.add_argument("--psi0", type=float, default=0.0)
    t.add_argument("--t-end", type=float, help="end time (default one period)")
    t.add_argument("--samples", type=int, default=201)
    t.add_argument("--oracle", action="store_true", help="add RK4 p_rk4, gamma_rk4 columns")
    return p


def _orbit(args) -> WeightVector:
    if args.p is not None:
        if args.lam is not None or args.mu is not None:
            raise ArgumentError("use either --p or --lam/--mu, not both")
        return WeightVector(*_floats(args.p, 3, "--p"))
    if args.lam is None and args.mu is None:
        if args.command == "verify":
            return WeightVector(60.0, 20.0, 0.0)
        raise ArgumentError("an orbit is required: --p p1,p2,p3 or --lam L --mu M [--p3 P]")
    if args.lam is None or args.mu is None:
        raise ArgumentError("--lam and --mu go together")
    return WeightVector.from_lam_mu(args.lam, args.mu, args.p3)


def config_from_args(args) -> RunConfig:
    formats = tuple(f.strip() for f in args.format.split(",") if f.strip())
    bad = [f for f in formats if f not in FORMATS]
    if bad or not formats:
        raise ArgumentError(f"--format must be drawn from {', '.join(FORMATS)}")
    tols = {}
    for item in args.tol:
        if "=" not in item:
            raise ArgumentError(f"--tol expects NAME=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        if k not in VF.TOLERANCES:
            raise ArgumentError(f"unknown tolerance {k!r}; known: {', '.join(VF.TOLERANCES)}")
        try:
            val = float(v)
        except ValueError:
            raise ArgumentError(f"tolerance {k} must be a number, got {v!r}")
        if not val > 0:
            raise ArgumentError(f"tolerance {k} must be positive, got {v}")
        tols[k] = val
    cfg = RunConfig(orbit=_orbit(args), r=args.r, s_H=args.s_h, omega=args.omega, E0=args.E0,
                    formats=formats, out=Path(args.out), tolerances=tols)
    if args.command == "verify":
        cfg.suites = tuple(args.suite)
        cfg.quick = args.quick
    elif args.command == "bands":
        if args.l_steps < 2:
            raise ArgumentError("--l-steps must be at least 2")
        cfg.l_steps = args.l_steps
    elif args.command == "spectrum":
        if not -1.0 <= args.s <= 1.0:
            raise ArgumentError("--s must lie in [-1, 1]")
        cfg.s = args.s
    elif args.command == "trajectory":
        if args.samples < 2:
            raise ArgumentError("--samples must be at least 2")
        if args.t_end is not None and not args.t_end > 0:
            raise ArgumentError("--t-end must be positive")
        cfg.samples, cfg.t_end, cfg.oracle = args.samples, args.t_end, args.oracle
        cfg.L, cfg.Q, cfg.theta0, cfg.psi0 = args.L, args.Q, args.theta0, args.psi0
    return cfg


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _emit(cfg: RunConfig, stem: str, rows: list, columns, meta_extra: dict | None = None) -> list:
    paths = []
    if "csv" in cfg.formats:
        paths.append(oio.write_csv(cfg.out / f"{stem}.csv", rows, columns))
    if "json" in cfg.formats:
        meta = cfg.meta()
        if meta_extra:
            meta.update(meta_extra)
        paths.append(oio.write_json(cfg.out / f"{stem}.json", meta, rows, columns))
    return paths


def cmd_verify(cfg: RunConfig) -> int:
    reports = VF.run(cfg.suites or None, cfg.tolerances, cfg.quick)
    print(VF.format_table(reports))
    ok = all(r.passed for r in reports)
    print(f"\n{'all suites pass' if ok else 'FAILED: ' + ', '.join(r.suite for r in reports if not r.passed)}")
    if "json" in cfg.formats:
        oio.write_json(cfg.out / "verify.json", cfg.meta(), [r.as_dict() for r in reports])
    return EXIT_OK if ok else EXIT_NUMERIC


def band_rows(pv: WeightVector, n: int, r: float = 1.0, s_H: float = 2.0, omega: float = 1.0) -> list:
    cat = O.band_catalog(pv, (r, s_H), omega)
    rows = []
    for b in cat:
        if b.L_hi <= b.L_lo:
            continue
        c = b.curve(n)
        P, Gam = O.eigen_arrays(pv, c["L"], c["Q"])
        beta = pv.SL(c["L"]) / pv.S1
        for j in range(len(c["L"])):
            rows.append({"band": b.kind, "L": float(c["L"][j]), "p": float(c["p"][j]),
                         "Q": float(c["Q"][j]), "P1": float(P[0][j]), "P2": float(P[1][j]),
                         "P3": float(P[2][j]), "beta": float(beta[j]), "Gamma": float(Gam[j]),
                         "x": float(beta[j] * math.cos(Gam[j])),
                         "y": float(beta[j] * math.sin(Gam[j])),
                         "E_factor": float(c["E"][j]), "stability": b.tag})
    order = {k: i for i, k in enumerate(("S1", "S2", "S3", "P+", "P-"))}
    rows.sort(key=lambda r: (order[r["band"]], r["stability"], r["L"]))
    return rows


def cmd_bands(cfg: RunConfig) -> int:
    pv = cfg.orbit
    rows = band_rows(pv, cfg.l_steps, cfg.r, cfg.s_H, cfg.omega)
    stem = f"bands_{cfg.tag}"
    cross = {k: list(v) for k, v in O.intersections(pv).items()}
    paths = []
    if "csv" in cfg.formats:
        paths.append(oio.write_csv(cfg.out / f"{stem}.csv", rows, BAND_COLUMNS, sort=False))
    if "json" in cfg.formats:
        meta = cfg.meta()
        meta["intersections"] = cross
        paths.append(oio.write_json(cfg.out / f"{stem}.json", meta, rows, BAND_COLUMNS, sort=False))
    if "svg" in cfg.formats:
        from .plotting import bands_figure
        bands_figure(pv, cfg.out / f"{stem}.svg")
        paths.append(cfg.out / f"{stem}.svg")
    mx = O.eigenvalues(pv.L_max, pv.p2, pv)
    print(f"{len(rows)} band rows; maximal state Gamma = {math.degrees(mx.Gamma):.6g} deg")
    for pth in paths:
        print(f"wrote {pth}")
    return EXIT_OK


def spectrum_data(pv: WeightVector, s: float):
    table = QZ.bs_spectrum(pv, s)
    lam, mu = int(pv.lam), int(pv.mu)
    rows = [{"L": r.L, "k": r.k, "Q": r.Q, "u": r.u, "k_u": r.k_u, "target": r.target,
             "d": QZ.elliott_d(lam, mu, r.L)} for r in table.rows]
    lines = QZ.band_polylines(table)
    prow = []
    for name in sorted(lines):
        pts = lines[name]
        for j, (L, Q) in enumerate(pts):
            prow.append({"polyline": name, "L": int(L), "Q": float(Q),
                         "dL": int(L - pts[j - 1][0]) if j else 0})
    gaps = {k: sorted(QZ.gap(v)) for k, v in lines.items()}
    return table, rows, lines, prow, gaps


def cmd_spectrum(cfg: RunConfig) -> int:
    pv = cfg.orbit
    if not pv.is_integral():
        print("spectrum needs integer lam and mu", file=sys.stderr)
        return EXIT_DOMAIN
    table, rows, lines, prow, gaps = spectrum_data(pv, cfg.s)
    stem = f"spectrum_{cfg.tag}_s{cfg.s:+g}"
    pi = QZ.pi_sequence(pv, 1 if cfg.s >= 0 else -1) if cfg.s in (1.0, -1.0) else None
    extra = {"gaps": gaps, "intersections": {k: list(v) for k, v in O.intersections(pv).items()}}
    if pi is not None:
        extra["pi"] = {"q_bar": pi.q_bar, "q_closed": pi.q_closed, "q_limit": pi.q_limit,
                       "members": [list(m) for m in pi.members], "spread": pi.spread}
    paths = _emit(cfg, stem, rows, SPECTRUM_COLUMNS, extra)
    if "csv" in cfg.formats:
        paths.append(oio.write_csv(cfg.out / f"{stem}_polylines.csv", prow, POLYLINE_COLUMNS,
                                   sort=False))
    if "json" in cfg.formats:
        paths.append(oio.write_json(cfg.out / f"{stem}_polylines.json", cfg.meta(), prow,
                                    POLYLINE_COLUMNS, sort=False))
    if "svg" in cfg.formats:
        from .plotting import spectrum_figure
        spectrum_figure(table, lines, cfg.out / f"{stem}.svg")
        paths.append(cfg.out / f"{stem}.svg")
    print(f"{len(rows)} states over L = 0..{int(pv.lam + pv.mu)}; "
          f"gaps " + ", ".join(f"{k}: {v}" for k, v in gaps.items() if not k.endswith("_off")))
    for pth in paths:
        print(f"wrote {pth}")
    return EXIT_OK


def default_LQ(pv: WeightVector) -> tuple:
    L = 0.5 * pv.L_max
    a, b = O.q_range(L, pv)
    Q = 0.5 * (a + min(b, pv.p2)) if a < pv.p2 else 0.5 * (a + b)
    return L, Q


def trajectory_rows(cfg: RunConfig) -> tuple:
    pv = cfg.orbit
    H = AA.HamiltonianSpec(pv, E0=cfg.E0, r=cfg.r, s=cfg.s_H, omega=cfg.omega)
    L0, Q0 = default_LQ(pv)
    L = L0 if cfg.L is None else cfg.L
    if cfg.Q is None:
        a, b = O.q_range(L, pv)
        Q = Q0 if cfg.L is None else (0.5 * (a + min(b, pv.p2)) if a < pv.p2 else 0.5 * (a + b))
    else:
        Q = cfg.Q
    td = AA.torus_data(L, Q, pv)
    p0, phi0, g0 = AA.kappa_inverse_arrays(pv, L, Q, cfg.psi0, cfg.theta0)
    T = AA.period(L, Q, H)
    t_end = T if cfg.t_end is None else cfg.t_end
    times = np.linspace(0.0, t_end, cfg.samples)
    tr = AA.trajectory((L, float(p0), float(phi0), float(g0)), H, times)
    rows = []
    for j, t in enumerate(times):
        s = O.chart_forward((L, tr["p"][j], tr["phi"][j], tr["gamma"][j]), pv)
        C1, C2, C3 = casimirs(s)
        rows.append({"t": float(t), "L": float(L), "Q": float(Q), "psi": float(tr["psi"][j]),
                     "theta": float(tr["theta"][j]), "p": float(tr["p"][j]),
                     "gamma": float(tr["gamma"][j]), "phi": float(tr["phi"][j]),
                     "H": float(tr["E"][j]), "C1": C1, "C2": C2, "C3": C3})
    info = {"period": T, "Delta": td.Delta, "L": L, "Q": Q}
    sup = None
    if cfg.oracle:
        n_steps = max(20000, 100 * (cfg.samples - 1))
        n_steps -= n_steps % (cfg.samples - 1)
        r = AA.rk4_oracle(pv, L, float(p0), float(g0), float(H.omega_L(L)), t_end,
                          n_steps, cfg.samples - 1)
        for j, row in enumerate(rows):
            row["p_rk4"] = float(r["p"][j, 0])
            row["gamma_rk4"] = float(r["gamma"][j, 0])
        sup = max(float(np.abs(r["p"][:, 0] - tr["p"]).max()),
                  float(np.abs(r["gamma"][:, 0] - tr["gamma"]).max()))
        info["rk4_sup"] = sup
    return rows, info, tr


def cmd_trajectory(cfg: RunConfig) -> int:
    rows, info, tr = trajectory_rows(cfg)
    cols = TRAJECTORY_COLUMNS + (("p_rk4", "gamma_rk4") if cfg.oracle else ())
    stem = f"trajectory_{cfg.tag}"
    paths = _emit(cfg, stem, rows, cols, {"trajectory": info})
    if "svg" in cfg.formats:
        from .plotting import trajectory_figure
        if cfg.oracle:
            tr = dict(tr, p_rk4=[r["p_rk4"] for r in rows], gamma_rk4=[r["gamma_rk4"] for r in rows])
        trajectory_figure(tr, cfg.out / f"{stem}.svg")
        paths.append(cfg.out / f"{stem}.svg")
    print(f"L = {info['L']:.10g}, Q = {info['Q']:.10g}, period = {info['period']:.10g}")
    for pth in paths:
        print(f"wrote {pth}")
    if cfg.oracle:
        tol = cfg.tolerances.get("rk4", VF.TOLERANCES["rk4"])
        print(f"RK4 sup deviation {info['rk4_sup']:.3e} (tol {tol:g})")
        if info["rk4_sup"] > tol:
            print("RK4 oracle diverges from the closed form beyond tolerance", file=sys.stderr)
            return EXIT_NUMERIC
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "bands": cmd_bands, "spectrum": cmd_spectrum,
            "trajectory": cmd_trajectory}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_ARGS
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        return COMMANDS[args.command](cfg)
    except ArgumentError as exc:
        print(f"orbita: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except DomainError as exc:
        print(f"orbita: domain error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NumericalError as exc:
        print(f"orbita: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OrbitaError as exc:
        print(f"orbita: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
