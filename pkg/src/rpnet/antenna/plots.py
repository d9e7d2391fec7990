"""Figures for antenna-selection sweeps."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "best": dict(label="net, best of runs", marker="o", color="tab:blue"),
    "single": dict(label="net, single run (mean)", marker="s", color="tab:cyan", linestyle="--"),
    "greedy": dict(label="centralized greedy", marker="^", color="tab:red"),
    "exhaustive": dict(label="exhaustive optimum", marker="", color="0.4", linestyle=":"),
}


def plot_capacity_sweep(summary: dict, path, title: str | None = None) -> None:
    """Mean sum capacity against the number of selected antennas."""
    nts = sorted(summary)
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    for key, style in STYLE.items():
        ys = [summary[n][key] for n in nts]
        if all(math.isnan(y) for y in ys):
            continue
        ax.plot(nts, ys, **style)
    ax.set_xlabel("selected antennas $N_{TS}$")
    ax.set_ylabel("sum capacity [bit/s/Hz]")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
