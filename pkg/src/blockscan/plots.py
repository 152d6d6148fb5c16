"""SVG plot emission from benchmark CSV artifacts (optional, CLI `--plot`)."""

from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bench import read_results_csv

__all__ = ["plot_error_curves", "plot_level"]


def plot_error_curves(results_csv, out_svg) -> None:
    """Mean localization error versus signal multiplier, one panel per family."""
    rows = read_results_csv(results_csv)
    by_family = defaultdict(lambda: defaultdict(dict))
    for r in rows:
        by_family[r.family][r.method].setdefault(r.theta_mult, []).append(r.err)
    families = sorted(by_family)
    fig, axes = plt.subplots(1, len(families), figsize=(5 * len(families), 4), squeeze=False)
    for ax, family in zip(axes[0], families):
        for method, per_mult in sorted(by_family[family].items()):
            mults = sorted(per_mult)
            means = [float(np.mean(per_mult[t])) for t in mults]
            ax.plot(mults, means, marker="o", label=method)
        ax.set_title(family)
        ax.set_xlabel("signal multiplier")
        ax.set_ylabel("mean localization error")
        ax.legend()
    fig.tight_layout()
    fig.savefig(out_svg, format="svg")
    plt.close(fig)


def plot_level(grid_csv, out_svg, title: str = "size-score landscape") -> None:
    """Level plot of a size-score grid (rows = m, columns = n, 1-based)."""
    grid = np.loadtxt(grid_csv, delimiter=",", ndmin=2)
    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.imshow(
        grid,
        origin="lower",
        aspect="auto",
        extent=(0.5, grid.shape[1] + 0.5, 0.5, grid.shape[0] + 0.5),
    )
    fig.colorbar(im, ax=ax)
    ax.set_xlabel("n")
    ax.set_ylabel("m")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_svg, format="svg")
    plt.close(fig)
