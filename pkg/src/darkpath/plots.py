"""Figure rendering for trajectories and robustness sweeps.

Figures are written straight to files next to the delimited output; the
Agg backend keeps everything headless.
"""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

if TYPE_CHECKING:
    from .evolution import Trajectory
    from .robustness import SweepResult


def plot_trajectory(traj: "Trajectory", path, title: str | None = None) -> Path:
    """Block populations against t/tau, with loop boundaries marked."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    t = traj.time_over_tau
    ax.plot(t, traj.population_computational, label="computational")
    ax.plot(t, traj.population_excited, label="excited")
    ax.plot(t, traj.population_auxiliary, label="auxiliary")
    for boundary in range(1, int(traj.loop_index.max()) + 1):
        first = t[traj.loop_index == boundary]
        if len(first):
            ax.axvline(first[0], color="0.7", linestyle=":", linewidth=1)
    ax.set_xlabel(r"$t/\tau$")
    ax.set_ylabel("population")
    ax.set_ylim(-0.02, 1.02)
    if title:
        ax.set_title(title)
    ax.legend(loc="center right")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def plot_sweep(result: "SweepResult", path, title: str | None = None) -> Path:
    """Average fidelity against delta, one panel per gate, one line per eta."""
    gates = result.gates()
    etas = result.etas()
    n = len(gates)
    ncols = min(n, 2)
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(5.0 * ncols, 3.4 * nrows), sharex=True, sharey=True, squeeze=False
    )
    for i, gate in enumerate(gates):
        ax = axes[i // ncols][i % ncols]
        for eta in etas:
            deltas, means = result.curve(gate, eta)
            ax.plot(deltas, means, marker="o", markersize=3, label=rf"$\eta = {eta:g}$")
        ax.set_title(gate)
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize="small")
    for j in range(n, nrows * ncols):
        axes[j // ncols][j % ncols].set_visible(False)
    for ax in axes[-1]:
        ax.set_xlabel(r"$\delta$")
    for row in axes:
        row[0].set_ylabel("average fidelity")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
