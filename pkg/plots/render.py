#!/usr/bin/env python3
"""Render figures from run artefacts.

Usage::

    python3 plots/render.py --kind mesh_shape --in run/mesh.csv --out mesh.png
    python3 plots/render.py --kind error_vs_tol --in sweep/sweep.csv --out fig.png
    python3 plots/render.py --kind pointwise_error --in run/report.csv --out fig.png
    python3 plots/render.py --kind estimator_dominance \\
        --in run/report.csv run/estimate.csv --out fig.png

Consumes only the documented CSV schemas; no solver logic lives here.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

sys.path.insert(0, str(Path(__file__).resolve().parent))

from figkinds import (error_vs_tol, estimator_dominance, mesh_shape,  # noqa: E402
                      pointwise_error)

KINDS = {
    "error_vs_tol": error_vs_tol.render,
    "mesh_shape": mesh_shape.render,
    "pointwise_error": pointwise_error.render,
    "estimator_dominance": estimator_dominance.render,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--kind", required=True, choices=sorted(KINDS))
    parser.add_argument("--in", dest="inputs", required=True, nargs="+",
                        help="input CSV file(s)")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    KINDS[args.kind]([Path(p) for p in args.inputs], Path(args.out))
    return 0


if __name__ == "__main__":
    sys.exit(main())
