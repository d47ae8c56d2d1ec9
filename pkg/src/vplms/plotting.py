"""Figure rendering for the experiment outputs.

Renders the ensemble MSD learning curves and the p trajectories to image
files next to the CSVs. File output only; uses the Agg backend.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def save_msd_figure(ensembles, num_nonzero: int, num_taps: int, path) -> None:
    """Ensemble-mean MSD per algorithm on a log axis."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for algo, ens in ensembles.items():
        iters = range(1, ens.mean_msd.size + 1)
        ax.semilogy(iters, ens.mean_msd, label=algo.label, linewidth=1.2)
    ax.set_xlabel("iteration")
    ax.set_ylabel("MSD")
    ax.set_title(f"sparsity {num_nonzero}/{num_taps}")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_p_figure(ensembles, num_nonzero: int, num_taps: int, path) -> bool:
    """Ensemble-mean p trajectories of the variable-p algorithms.

    Returns False (and writes nothing) when no variable-p traces exist.
    """
    vp = {a: e for a, e in ensembles.items() if e.mean_p.size}
    if not vp:
        return False
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for algo, ens in vp.items():
        iters = range(1, ens.mean_p.size + 1)
        ax.plot(iters, ens.mean_p, label=algo.label, linewidth=1.2)
    ax.set_xlabel("iteration")
    ax.set_ylabel("mean p")
    ax.set_ylim(0.0, 1.05)
    ax.set_title(f"sparsity {num_nonzero}/{num_taps}")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return True


def render_figures(result, out_dir) -> list[str]:
    """MSD and p figures for every sparsity level in the result."""
    out = Path(out_dir)
    written: list[str] = []
    for s, level in result.ensembles.items():
        msd_path = out / f"msd_s{s}.png"
        save_msd_figure(level, s, result.config.num_taps, msd_path)
        written.append(str(msd_path))
        p_path = out / f"p_s{s}.png"
        if save_p_figure(level, s, result.config.num_taps, p_path):
            written.append(str(p_path))
    return written
