"""Matplotlib renderings of runs and level-set pictures, written to files.

Everything here is optional output for human inspection; the CSV/JSON data
the CLI emits is the authoritative record.  The Agg backend is forced so
rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dynamics import DiagnosticSeries, Trajectory
from .geometry import IntersectionResult, level_values
from .model import MassSystem, PotentialSpec

__all__ = ["trajectory_figure", "diagnostics_figure", "levelset_figure"]


def trajectory_figure(traj: Trajectory, path) -> None:
    """Plot every body's path in the plane, start marked with a dot."""
    fig, ax = plt.subplots(figsize=(6, 6))
    n = traj.initial.n
    xy = np.array([s.positions for s in traj.states])  # (m, n, 2)
    for i in range(n):
        (line,) = ax.plot(xy[:, i, 0], xy[:, i, 1], lw=0.8, label=f"body {i}")
        ax.plot(xy[0, i, 0], xy[0, i, 1], "o", color=line.get_color(), ms=5)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def diagnostics_figure(series: DiagnosticSeries, path) -> None:
    """Four panels: I, drift of H and K, Sundman gap, collinearity residual."""
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    t = series.times
    axes[0, 0].plot(t, series.I)
    axes[0, 0].set_ylabel("moment of inertia I")
    h_scale = max(abs(series.H[0]), 1e-300)
    k_scale = max(abs(series.K[0]), 1e-300)
    axes[0, 1].plot(t, np.abs(series.H - series.H[0]) / h_scale, label="|dH|/|H0|")
    axes[0, 1].plot(t, np.abs(series.K - series.K[0]) / k_scale, label="|dK|/|K0|")
    axes[0, 1].set_yscale("log")
    axes[0, 1].set_ylabel("relative drift")
    axes[0, 1].legend(fontsize=8)
    axes[1, 0].plot(t, series.sundman_gap)
    axes[1, 0].set_ylabel("2TI - J^2 - K^2")
    axes[1, 0].set_xlabel("t")
    axes[1, 1].plot(t, series.collinearity)
    axes[1, 1].set_yscale("log")
    axes[1, 1].set_ylabel("collinearity residual")
    axes[1, 1].set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def levelset_figure(
    masses: MassSystem,
    pot: PotentialSpec,
    ordering,
    c_U: float,
    c_I: float,
    result: IntersectionResult,
    path,
) -> None:
    """Contours of U and I on the ordering plane with the intersection points."""
    if result.points:
        scale = max(max(a, b) for a, b in result.points)
    else:
        _, unit = level_values(1.0, 1.0, masses, pot, ordering)
        scale = float(np.sqrt(c_I / unit))
    grid = np.linspace(1e-3 * scale, 3.0 * scale, 400)
    A, B = np.meshgrid(grid, grid)
    U, I = level_values(A.ravel(), B.ravel(), masses, pot, ordering)
    U = np.asarray(U).reshape(A.shape)
    I = np.asarray(I).reshape(A.shape)

    fig, ax = plt.subplots(figsize=(6, 6))
    ax.contour(A, B, I, levels=[c_I], colors="tab:blue")
    ax.contour(A, B, U, levels=[c_U], colors="tab:red")
    for a, b in result.points:
        ax.plot(a, b, "ko", ms=6)
    ax.plot([], [], color="tab:blue", label=f"I = {c_I:.6g}")
    ax.plot([], [], color="tab:red", label=f"U = {c_U:.6g}")
    ax.set_xlabel("first consecutive distance a")
    ax.set_ylabel("second consecutive distance b")
    ax.set_title(
        f"ordering {tuple(ordering)}: count={result.count}"
        + (", tangent" if result.tangency_flag else "")
    )
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
