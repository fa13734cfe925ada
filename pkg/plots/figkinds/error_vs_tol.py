"""Loglog maximum error against tolerance, with the identity reference line."""

from __future__ import annotations

import matplotlib.pyplot as plt
import numpy as np

from .common import read_csv


def render(inputs, out):
    fig, ax = plt.subplots(figsize=(4.5, 3.6))
    lo, hi = np.inf, 0.0
    for path in inputs:
        meta, cols = read_csv(path, ["tol", "max_error"])
        label = f"example {meta.get('example', '?')}, alpha={meta.get('alpha', '?')}"
        ax.loglog(cols["tol"], cols["max_error"], "o-", label=label)
        lo = min(lo, float(np.min(cols["tol"])))
        hi = max(hi, float(np.max(cols["tol"])))
    ref = np.array([lo, hi])
    ax.loglog(ref, ref, "k--", linewidth=0.8, label="tolerance")
    ax.set_xlabel("tolerance")
    ax.set_ylabel("max node error")
    ax.legend(fontsize=7)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
