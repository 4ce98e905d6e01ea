"""SVG figures for the band, spectrum and trajectory outputs.

Figures are written as SVG with a fixed hash salt and no date
stamp, so repeated runs write byte-identical files.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .orbit import band_list, eigen_arrays, q_range  # noqa: E402

_RC = {"svg.hashsalt": "orbita", "svg.fonttype": "none", "font.size": 9,
       "axes.linewidth": 0.8, "lines.linewidth": 1.2}

BAND_STYLE = {"S1": ("tab:red", "-"), "S2": ("tab:green", "-"), "S3": ("tab:blue", "-"),
              "P+": ("tab:purple", "--"), "P-": ("tab:orange", "--")}


def save_svg(fig, path) -> None:
    with matplotlib.rc_context(_RC):
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)


def _xy(pv, L, Q):
    P, Gam = eigen_arrays(pv, L, Q)
    beta = pv.SL(np.asarray(L, float)) / pv.S1
    return beta * np.cos(Gam), beta * np.sin(Gam)


def bands_figure(pv, path, n_L: int = 60, n_Q: int = 40, arrows: int = 6) -> None:
    """Shape plane (beta cos Gamma, beta sin Gamma) with the admissible region,
    the band curves and arrows pointing toward increasing L."""
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 4.5))
        Lg = np.linspace(1e-3 * pv.L_max, pv.L_max * (1 - 1e-6), n_L)
        xs, ys = [], []
        for L in Lg:
            qmin, qmax = q_range(float(L), pv)
            Q = np.linspace(qmin, qmax, n_Q)
            x, y = _xy(pv, L, Q)
            xs.append(x)
            ys.append(y)
        ax.scatter(np.concatenate(xs), np.concatenate(ys), s=1.5, c="0.85", lw=0,
                   rasterized=False, label="admissible (L, Q)")
        for b in band_list(pv):
            if b.L_hi <= b.L_lo:
                continue
            c = b.curve(121)
            x, y = _xy(pv, c["L"], c["Q"])
            col, ls = BAND_STYLE[b.kind]
            if b.tag == "unstable":
                ls = ":"
            ax.plot(x, y, color=col, ls=ls, label=f"{b.kind} ({b.tag})")
            for j in np.linspace(0, len(x) - 2, arrows).astype(int)[1:-1]:
                ax.annotate("", xy=(x[j + 1], y[j + 1]), xytext=(x[j], y[j]),
                            arrowprops=dict(arrowstyle="->", color=col, lw=0.8))
        t = np.linspace(0, math.pi / 3, 2)
        r = ax.get_xlim()[1]
        for a in t:
            ax.plot([0, r * math.cos(a)], [0, r * math.sin(a)], color="0.6", lw=0.5)
        ax.set_aspect("equal")
        ax.set_xlabel(r"$\beta\cos\Gamma$")
        ax.set_ylabel(r"$\beta\sin\Gamma$")
        ax.set_title(f"bands of [{pv.p1:g}, {pv.p2:g}, {pv.p3:g}]")
        ax.legend(fontsize=6, loc="upper right", frameon=False)
        fig.tight_layout()
    save_svg(fig, path)


def spectrum_figure(table, polylines: dict, path) -> None:
    """Quantized (L, Q) points with the band polylines."""
    style = {"P-": ("tab:orange", "-"), "P+": ("tab:purple", "--"),
             "S3": ("tab:blue", "--"), "S1": ("tab:red", "-"), "Pi": ("k", ":")}
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 4))
        L = np.array([r.L for r in table.rows])
        Q = np.array([r.Q for r in table.rows])
        ax.plot(L, Q, ".", ms=2, color="0.4")
        for name, (col, ls) in style.items():
            pts = polylines.get(name, [])
            if len(pts) > 1:
                a = np.array(pts, float)
                ax.plot(a[:, 0], a[:, 1], color=col, ls=ls, lw=1, label=name)
        ax.set_xlabel("L")
        ax.set_ylabel("Q")
        pv = table.pv
        ax.set_title(f"[{pv.p1:g}, {pv.p2:g}, {pv.p3:g}], s = {table.s:g}")
        ax.legend(fontsize=7, frameon=False)
        fig.tight_layout()
    save_svg(fig, path)


def trajectory_figure(traj: dict, path) -> None:
    with matplotlib.rc_context(_RC):
        fig, axs = plt.subplots(2, 1, figsize=(5, 4), sharex=True)
        axs[0].plot(traj["t"], traj["p"], lw=1)
        axs[0].set_ylabel("p")
        axs[1].plot(traj["t"], traj["gamma"], lw=1)
        axs[1].set_ylabel(r"$\gamma$")
        axs[1].set_xlabel("t")
        if "p_rk4" in traj:
            axs[0].plot(traj["t"], traj["p_rk4"], "--", lw=0.8)
            axs[1].plot(traj["t"], traj["gamma_rk4"], "--", lw=0.8)
        fig.tight_layout()
    save_svg(fig, path)
