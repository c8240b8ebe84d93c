"""Report figures, written as PNG files (Agg backend, no display needed)."""

import os
from typing import List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .decomposition import Decomposition  # noqa: E402
from .network import Network, support  # noqa: E402


def decomposition_figure(net: Network, dec: Decomposition, path: str,
                         mixed: Optional[Sequence[bool]] = None) -> str:
    """Heat map of species occurrence per part; mixed parts are labelled."""
    grid = np.zeros((len(dec.partition), net.m))
    for p, part in enumerate(dec.partition):
        for i in part:
            r = net.reactions[i]
            for j in set(support(r.source)) | set(support(r.product)):
                grid[p, j] = 1
    fig, ax = plt.subplots(figsize=(max(4.0, 0.35 * net.m + 1.5), max(2.0, 0.4 * len(dec.partition) + 1.0)))
    ax.imshow(grid, cmap="Greys", aspect="auto", vmin=0, vmax=1.4)
    ax.set_xticks(range(net.m))
    ax.set_xticklabels(net.species, rotation=90, fontsize=7)
    ax.set_yticks(range(len(dec.partition)))
    labels = []
    for p, part in enumerate(dec.partition):
        tag = " (mixed)" if mixed is not None and mixed[p] else ""
        labels.append(f"N{p + 1}{tag}")
    ax.set_yticklabels(labels, fontsize=7)
    ax.set_title(f"{len(dec.partition)} independent parts")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def residual_figure(residuals: Sequence[float], tol: float, path: str) -> str:
    """Histogram of per-sample relative residuals on a log axis."""
    vals = np.maximum(np.asarray(residuals, dtype=float), 1e-20)
    fig, ax = plt.subplots(figsize=(5, 3))
    bins = np.logspace(np.log10(vals.min()) - 0.5, np.log10(max(vals.max(), tol)) + 0.5, 30)
    ax.hist(vals, bins=bins, color="0.4")
    ax.axvline(tol, color="red", linestyle="--", label=f"tol {tol:g}")
    ax.set_xscale("log")
    ax.set_xlabel("relative residual")
    ax.set_ylabel("samples")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_figures(directory: str, net: Network, dec: Optional[Decomposition] = None,
                  mixed: Optional[Sequence[bool]] = None, residuals: Optional[Sequence[float]] = None,
                  tol: float = 1e-9) -> List[str]:
    os.makedirs(directory, exist_ok=True)
    out = []
    if dec is not None:
        out.append(decomposition_figure(net, dec, os.path.join(directory, "decomposition.png"), mixed))
    if residuals:
        out.append(residual_figure(residuals, tol, os.path.join(directory, "residuals.png")))
    return out
