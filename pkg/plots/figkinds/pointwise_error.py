"""Loglog pointwise node error with the tol * t^(alpha-1) reference line."""

from __future__ import annotations

import matplotlib.pyplot as plt
import numpy as np

from .common import meta_float, read_csv


def render(inputs, out):
    fig, ax = plt.subplots(figsize=(4.5, 3.6))
    for path in inputs:
        meta, cols = read_csv(path, ["t", "error", "bound"])
        alpha = meta_float(meta, "alpha", path)
        tol = meta_float(meta, "tol", path)
        t = cols["t"][1:]
        ax.loglog(t, np.maximum(cols["error"][1:], 1e-300), ".",
                  markersize=4, label="|e(t_j)|")
        ax.loglog(t, cols["bound"][1:], "-", linewidth=0.9,
                  label="a posteriori bound")
        ax.loglog(t, tol * t ** (alpha - 1.0), "k--", linewidth=0.8,
                  label=f"tol * t^({alpha - 1.0:+.2f})")
    ax.set_xlabel("t")
    ax.set_ylabel("error")
    ax.legend(fontsize=7)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
