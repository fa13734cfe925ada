"""Command-line interface: run one experiment or a tolerance sweep.

Examples::

    fracadapt run --example 1 --alpha 0.4 --tol 1e-3 --barrier r0 \\
        --mesh adaptive --out results/ex1
    fracadapt sweep --example 1 --alpha 0.4 --tols 1e-2,1e-3,1e-4 --out sweeps/ex1
    fracadapt run --config run.json --tol 1e-4   # flags override file values

A JSON config file mirrors the RunConfig fields; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import RunConfig, run_example, run_sweep


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON file with RunConfig fields")
    parser.add_argument("--example", help="example id 1..6 or 'custom'")
    parser.add_argument("--alpha", type=float, help="leading order (examples 1-4) "
                        "or fractional companion order (examples 5-6)")
    parser.add_argument("--barrier", choices=["r0", "r1", "exp"])
    parser.add_argument("--mesh", help="adaptive | graded:R | uniform[:M]")
    parser.add_argument("--M", type=int, dest="M", help="intervals for fixed meshes")
    parser.add_argument("--N", type=int, dest="N", help="interior spatial points")
    parser.add_argument("--out", help="output directory for CSV artefacts")
    parser.add_argument("--mu", type=float, help="exponential-barrier rate")
    parser.add_argument("--c1", type=float, help="order-one coefficient scale (ex. 5-6)")
    parser.add_argument("--tau", type=float, help="fixed R1 barrier parameter")
    parser.add_argument("--norm", choices=["l2", "linf"])
    parser.add_argument("--n-sub", type=int, dest="n_sub",
                        help="estimator refinement points per interval")
    parser.add_argument("--samples-per-interval", type=int, dest="samples_per_interval")
    parser.add_argument("--tau-star", type=float, dest="tau_star",
                        help="initial adaptive trial step")
    parser.add_argument("--ref-scale", type=int, dest="ref_scale")
    parser.add_argument("--f-variant", dest="f_variant", choices=["default", "cos5t2"])


def _collect_overrides(args: argparse.Namespace) -> dict:
    skip = {"command", "config", "tol", "tols", "func"}
    overrides = {k: v for k, v in vars(args).items()
                 if k not in skip and v is not None}
    if "example" in overrides and overrides["example"] != "custom":
        overrides["example"] = int(overrides["example"])
    return overrides


def _build_config(args: argparse.Namespace) -> RunConfig:
    overrides = _collect_overrides(args)
    if getattr(args, "tol", None) is not None:
        overrides["tol"] = args.tol
    if args.config:
        return RunConfig.from_json(args.config, overrides)
    return RunConfig.from_sources(None, overrides)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="fracadapt",
        description="Adaptive solves and a posteriori error reports for "
                    "multiterm fractional subdiffusion problems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one configured run")
    _add_common(p_run)
    p_run.add_argument("--tol", type=float, help="tolerance for the barrier test")

    p_sweep = sub.add_parser("sweep", help="run one example across tolerances")
    _add_common(p_sweep)
    p_sweep.add_argument("--tols", required=True,
                         help="comma-separated tolerances, e.g. 1e-2,1e-3")

    args = parser.parse_args(argv)
    if args.command == "run":
        config = _build_config(args)
        report = run_example(config)
        summary = {
            "M": report.M,
            "N": report.N,
            "max_node_error": report.max_node_error,
            "runtime_s": round(report.runtime, 3),
        }
        if report.trace is not None:
            summary["rejected_steps"] = report.trace.rejected_steps
        print(json.dumps(summary))
        return 0
    # sweep
    tols = [float(v) for v in args.tols.split(",") if v]
    config = _build_config(args)
    reports = run_sweep(config, tols)
    for tol, report in zip(tols, reports):
        print(json.dumps({"tol": tol, "M": report.M,
                          "max_node_error": report.max_node_error}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
