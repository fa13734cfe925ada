"""Pointwise error against the companion-problem estimator on a fixed mesh.

The first input is a run report (t, error, bound) where the bound column
holds the estimator at the coarse nodes; an optional second input is the
fine-grid estimator table (t, residual_norm, estimate).
"""

from __future__ import annotations

import matplotlib.pyplot as plt
import numpy as np

from .common import read_csv


def render(inputs, out):
    fig, ax = plt.subplots(figsize=(4.5, 3.6))
    meta, cols = read_csv(inputs[0], ["t", "error", "bound"])
    t = cols["t"][1:]
    ax.semilogy(t, np.maximum(cols["error"][1:], 1e-300), "o",
                markersize=4, label="||e(t_j)||")
    ax.semilogy(t, np.maximum(cols["bound"][1:], 1e-300), "s",
                markersize=4, fillstyle="none", label="estimator at t_j")
    for path in inputs[1:]:
        _, fine = read_csv(path, ["t", "estimate"])
        ax.semilogy(fine["t"][1:], np.maximum(fine["estimate"][1:], 1e-300),
                    "-", linewidth=0.8, label="estimator (fine grid)")
    ax.set_xlabel("t")
    ax.set_ylabel("error / estimate")
    ax.set_title(f"example {meta.get('example', '?')}, M={meta.get('M', '?')}",
                 fontsize=9)
    ax.legend(fontsize=7)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
