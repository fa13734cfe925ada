"""Loglog node positions t_j against j/M, one curve per mesh CSV.

A mesh graded like t_j = T (j/M)^r shows up as a straight line of slope r.
"""

from __future__ import annotations

import matplotlib.pyplot as plt
import numpy as np

from .common import fit_loglog_slope, read_csv


def render(inputs, out):
    fig, ax = plt.subplots(figsize=(4.5, 3.6))
    for path in inputs:
        meta, cols = read_csv(path, ["t"])
        t = cols["t"]
        m = t.size - 1
        frac = np.arange(m + 1) / m
        slope = fit_loglog_slope(frac[1:], t[1:])
        label = f"{meta.get('mesh', 'mesh')} (M={m}, slope~{slope:.2f})"
        ax.loglog(frac[1:], t[1:], ".-", markersize=3, label=label)
    ax.set_xlabel("j / M")
    ax.set_ylabel("t_j")
    ax.legend(fontsize=7)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
