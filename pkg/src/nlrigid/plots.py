"""Figure rendering for the CLI report paths.

Every function writes a PNG next to the delimited outputs and returns the
path. Rendering uses the Agg backend; nothing here opens a window.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .rigidity import fit_planar_profile


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def plot_profile(field, path, title="profile"):
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    x = field.grid.axis_coords(0)
    ax.plot(x, field.values, lw=1.2)
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    return _finish(fig, path)


def plot_residual_history(history, path, title="residual history"):
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    if history:
        its = [it for it, _ in history]
        res = [r for _, r in history]
        ax.semilogy(its, res, lw=1.0)
    ax.set_xlabel("iteration")
    ax.set_ylabel("sup-norm residual")
    ax.set_title(title)
    ax.grid(alpha=0.3, which="both")
    return _finish(fig, path)


def plot_heatmap(field, path, title="field"):
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    grid = field.grid
    x = grid.axis_coords(0)
    y = grid.axis_coords(1)
    im = ax.imshow(field.values.T, origin="lower", aspect="auto",
                   extent=(x[0], x[-1], y[0], y[-1]), cmap="RdBu_r")
    fig.colorbar(im, ax=ax, shrink=0.85)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_title(title)
    return _finish(fig, path)


def plot_kernel(kernel, path, title="kernel weights"):
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    r = kernel.radii()
    order = np.argsort(r)
    ax.plot(r[order], kernel.weights[order], ".", ms=3)
    ax.set_xlabel("|offset|")
    ax.set_ylabel("density")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    return _finish(fig, path)


def plot_tail_energies(reports, path, title="remainder-region energy"):
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    R = [rep.R for rep in reports]
    tails = [rep.tail_energy for rep in reports]
    floor = max(max(tails) * 1e-20, 1e-300) if any(t > 0 for t in tails) else 1e-300
    shown = [max(t, floor) for t in tails]
    ax.semilogy(R, shown, "o-", lw=1.0)
    for Ri, ti in zip(R, tails):
        if ti <= floor:
            ax.annotate("0", (Ri, floor), textcoords="offset points", xytext=(0, 6),
                        ha="center", fontsize=8)
    ax.set_xlabel("R")
    ax.set_ylabel("tail energy")
    ax.set_title(title)
    ax.grid(alpha=0.3, which="both")
    return _finish(fig, path)


def plot_planar_fit(bundle, omega, path, title="planar representation"):
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    grid = bundle.grid
    coords = grid.coords()
    s = sum(float(omega[i]) * coords[i] for i in range(grid.dim)).ravel()
    vals = bundle.u.values.ravel()
    stride = max(1, s.size // 4000)
    ax.plot(s[::stride], vals[::stride], ".", ms=1.5, alpha=0.4, label="samples")
    centers, means = fit_planar_profile(bundle.u, omega)
    ax.plot(centers, means, lw=1.2, color="k", label="fitted profile")
    ax.set_xlabel("s = omega . x")
    ax.set_ylabel("u")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3)
    return _finish(fig, path)
