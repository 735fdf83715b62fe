"""Report rendering: matplotlib figures and delimited summaries written next
to the JSON output of the reproduction suite."""

import csv
import math

import numpy as np

from .constants import BarycentricRatio, optimal_constant_n3
from .matrices import pentagonal_witness_value


def _agg():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_constant_triangle_figure(path, resolution=400):
    """Heatmap of the optimal bounding constant over the barycentric triangle,
    with the inscribed circle where the constant is 1."""
    plt = _agg()
    h = math.sqrt(3.0) / 2.0
    xs = np.linspace(0.0, 1.0, resolution)
    ys = np.linspace(0.0, h, int(resolution * h))
    img = np.full((len(ys), len(xs)), np.nan)
    for r, y in enumerate(ys):
        for qcol, x in enumerate(xs):
            c = y / h
            b = x - c / 2.0
            a = 1.0 - b - c
            if min(a, b, c) < 0:
                continue
            img[r, qcol] = optimal_constant_n3(BarycentricRatio(a, b, c))
    fig, ax = plt.subplots(figsize=(6, 5.2))
    im = ax.imshow(img, origin="lower", extent=(0, 1, 0, h), cmap="viridis",
                   vmin=1.0, vmax=2.0)
    theta = np.linspace(0, 2 * math.pi, 256)
    ax.plot(0.5 + math.sqrt(3) / 6 * np.cos(theta),
            math.sqrt(3) / 6 + math.sqrt(3) / 6 * np.sin(theta),
            color="white", lw=1.2)
    ax.plot([0, 1, 0.5, 0], [0, 0, h, 0], color="black", lw=1.0)
    ax.set_aspect("equal")
    ax.set_axis_off()
    ax.set_title("optimal bounding constant on the triangular ratio cone")
    fig.colorbar(im, ax=ax, shrink=0.85)
    fig.savefig(path, dpi=160, bbox_inches="tight")
    plt.close(fig)
    return path


def save_pentagonal_sweep_figure(path, t_values=None):
    """Pentagonal ratio of the witness family against the optimal constant 4."""
    plt = _agg()
    if t_values is None:
        t_values = np.logspace(-4, 0.5, 120)
    values = [float(pentagonal_witness_value(float(t))) for t in t_values]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogx(t_values, values, lw=1.5, label="witness family ratio")
    ax.axhline(4.0, color="crimson", ls="--", lw=1.0, label="optimal constant 4")
    ax.set_xlabel("t")
    ax.set_ylabel("pentagonal ratio")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.savefig(path, dpi=160, bbox_inches="tight")
    plt.close(fig)
    return path


def save_criteria_csv(path, results):
    """One delimited row per reproduction criterion."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["criterion", "name", "passed", "wall_ms"])
        for r in results:
            writer.writerow([r.number, r.name, "pass" if r.passed else "fail", r.wall_ms])
    return path
