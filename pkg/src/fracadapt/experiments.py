"""Experiment runner: canonical test problems, references, errors and reports.

Six built-in problem configurations cover scalar multiterm equations with
smooth, vanishing and switching coefficients, a 1D subdiffusion problem, an
order-one leading term with a fractional companion term, and a uniform-mesh
run wired to the companion-problem estimator.  Runs produce CSV artefacts
with a fixed schema (metadata lines prefixed ``#``, then a column header,
then rows) and are byte-reproducible for identical configurations.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .adaptive import AdaptiveConfig, AdaptiveTrace, run_adaptive
from .barriers import BarrierKind, BarrierSpec, calibration, error_bound_curve
from .errors import ExponentUndefinedError
from .estimator import EstimatorResult, estimate_on_mesh
from .l1 import (Laplace1D, ProblemSpec, SolutionHistory, SpatialGrid1D,
                 solve_pde_1d, solve_scalar)
from .mesh import TemporalMesh, graded, uniform
from .residual import NormKind, ResidualSamples, residual_norm, sample_norms

__all__ = ["RunConfig", "ErrorReport", "build_example", "reference_solution",
           "run_example", "run_sweep", "fit_initial_exponent", "write_csv"]


# --------------------------------------------------------------------------
# canonical problems
# --------------------------------------------------------------------------


def _q_pair_smooth() -> tuple:
    q1 = lambda t: 0.5 * math.exp(-t / 5.0)
    return q1, (lambda t: 1.0 - 0.5 * math.exp(-t / 5.0))


def _q_pair_switch_off() -> tuple:
    def q1(t: float) -> float:
        return math.cos(math.pi * t) ** 2 if t < 0.5 else 0.0
    return q1, (lambda t: 1.0 - q1(t))


def _q_pair_switch_on() -> tuple:
    def q1(t: float) -> float:
        return 0.0 if t < 0.5 else math.cos(math.pi * t) ** 2
    return q1, (lambda t: 1.0 - q1(t))


def _q_pair_decaying(c1: float) -> tuple:
    def q1(t: float) -> float:
        return c1 * math.exp(-5.0 * t) * math.cos(math.pi * t) ** 2 if t < 0.5 else 0.0
    return q1, (lambda t: 1.0 - q1(t))


def _erf_source(t: float) -> float:
    return 1.0 + 0.5 * math.erf(20.0 * (1.0 - t))


def _sine_bump(x: np.ndarray) -> np.ndarray:
    return np.sin(x * x / np.pi)


def build_example(example_id: int, alpha: float, c1: float | None = None,
                  f_variant: str = "default") -> ProblemSpec:
    """Problem data of the built-in examples.

    For examples 1-4 ``alpha`` is the leading order (the second order is
    2/3 of it); for examples 5-6 the leading order is one and ``alpha`` is
    the fractional companion order.  ``c1`` scales the order-one coefficient
    in examples 5-6 (default 0.5).  ``f_variant='cos5t2'`` switches example
    2's source to ``cos(5 t^2)``.
    """
    if example_id in (1, 2, 3, 4):
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"examples 1-4 need alpha in (0, 1), got {alpha}")
        alphas = (alpha, 2.0 * alpha / 3.0)
    elif example_id in (5, 6):
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"examples 5-6 need a fractional order in (0, 1), got {alpha}")
        alphas = (1.0, alpha)
    else:
        raise ValueError(f"unknown example id {example_id}")

    if f_variant not in ("default", "cos5t2"):
        raise ValueError(f"unknown source variant {f_variant!r}")
    if f_variant == "cos5t2" and example_id != 2:
        raise ValueError("the cos(5t^2) source is an example-2 variant")

    if example_id == 1:
        q1, q2 = _q_pair_smooth()
        return ProblemSpec(alphas, (q1, q2), 1.0, lambda t: 1.0, 0.0, 1.0)
    if example_id == 2:
        q1, q2 = _q_pair_switch_off()
        f = (lambda t: math.cos(5.0 * t * t)) if f_variant == "cos5t2" else (lambda t: 1.0)
        return ProblemSpec(alphas, (q1, q2), 1.0, f, 0.0, 1.0)
    if example_id == 3:
        q1, q2 = _q_pair_switch_on()
        return ProblemSpec(alphas, (q1, q2), 1.0, lambda t: 1.0, 0.0, 1.0)
    if example_id == 4:
        q1, q2 = _q_pair_smooth()
        return ProblemSpec(alphas, (q1, q2), 1.0,
                           lambda x, t: np.ones_like(x), _sine_bump, 1.0,
                           spatial=Laplace1D(0.0, math.pi, 0.0))
    c1_val = 0.5 if c1 is None else float(c1)
    if not 0.0 < c1_val <= 1.0:
        raise ValueError(f"c1 must lie in (0, 1], got {c1_val}")
    q1, q2 = _q_pair_decaying(c1_val)
    if example_id == 5:
        return ProblemSpec(alphas, (q1, q2), 1.0, _erf_source, 0.0, 1.0)
    return ProblemSpec(alphas, (q1, q2), 1.0,
                       lambda x, t: np.full_like(x, _erf_source(t)),
                       _sine_bump, 1.0, spatial=Laplace1D(0.0, math.pi, 0.0))


def _build_custom(custom: Mapping) -> ProblemSpec:
    """Scalar constant-coefficient problem from a plain dict (CLI escape hatch)."""
    alphas = tuple(float(a) for a in custom["alphas"])
    q_consts = [float(q) for q in custom.get("q_consts", [1.0] * len(alphas))]
    q_funcs = tuple((lambda t, _q=q: _q) for q in q_consts)
    f_const = float(custom.get("f_const", 1.0))
    return ProblemSpec(alphas, q_funcs, float(custom.get("lambda", 0.0)),
                       lambda t: f_const, float(custom.get("u0", 0.0)),
                       float(custom.get("T", 1.0)))


# --------------------------------------------------------------------------
# references and error measurement
# --------------------------------------------------------------------------


def _singularity_order(problem: ProblemSpec) -> float:
    """Order of the leading initial power behaviour: the largest order whose
    coefficient is active at t = 0."""
    for alpha_i, q_i in zip(problem.alphas, problem.q_funcs):
        if q_i(0.0) > 1e-12:
            return alpha_i
    return problem.alphas[-1]


def _merge_meshes(base: np.ndarray, inject: np.ndarray, T: float) -> np.ndarray:
    tol = 1e-12 * T
    idx = np.searchsorted(inject, base)
    lo = inject[np.clip(idx - 1, 0, inject.size - 1)]
    hi = inject[np.clip(idx, 0, inject.size - 1)]
    near = np.minimum(np.abs(base - lo), np.abs(base - hi)) <= tol
    return np.union1d(base[~near], inject)


def reference_solution(problem: ProblemSpec, scale: int, m_run: int = 0,
                       inject: TemporalMesh | None = None,
                       grid: SpatialGrid1D | None = None) -> SolutionHistory:
    """Fine-mesh stand-in for the unknown exact solution.

    Solves on a graded mesh with ``M = scale * max(m_run, 1024)`` and grading
    ``r = (2 - a) / a`` for the order ``a`` that drives the initial power
    behaviour (the leading order whose coefficient is active at t = 0; r = 1
    when that order is one).  Nodes of ``inject`` are inserted so errors can
    be read off without temporal interpolation.
    """
    if scale < 4:
        raise ValueError(f"reference scale must be >= 4, got {scale}")
    a_eff = _singularity_order(problem)
    r = (2.0 - a_eff) / a_eff
    m_ref = scale * max(m_run, 1024)
    base = graded(m_ref, r, problem.T)
    if inject is None:
        mesh = base
    else:
        mesh = TemporalMesh(_merge_meshes(base.points, inject.points, problem.T))
    if problem.spatial is None:
        return solve_scalar(problem, mesh)
    if grid is None:
        raise ValueError("PDE references need the spatial grid")
    return solve_pde_1d(problem, grid, mesh)


def _errors_at_shared_nodes(run: SolutionHistory, ref: SolutionHistory,
                            norm_kind: NormKind) -> np.ndarray:
    """Per-node error norms, requiring every run node to exist in the reference."""
    ref_pts = ref.mesh.points
    idx = np.searchsorted(ref_pts, run.mesh.points)
    idx = np.clip(idx, 0, ref_pts.size - 1)
    left = np.clip(idx - 1, 0, ref_pts.size - 1)
    use_left = np.abs(ref_pts[left] - run.mesh.points) < np.abs(ref_pts[idx] - run.mesh.points)
    idx = np.where(use_left, left, idx)
    if not np.allclose(ref_pts[idx], run.mesh.points,
                       rtol=1e-9, atol=1e-12 * run.mesh.T):
        raise ValueError("run mesh nodes missing from the reference mesh")
    out = np.empty(run.mesh.points.size)
    for j in range(out.size):
        out[j] = residual_norm(run.levels[j] - ref.levels[idx[j]], run.grid, norm_kind)
    return out


def fit_initial_exponent(history: SolutionHistory,
                         window: tuple[float, float] = (1e-5, 1e-4)) -> float:
    """Least-squares exponent of the initial power behaviour ``|u(t) - u(0)|``.

    Fits ``log |u - u0|`` against ``log t`` over the decade
    ``[window[0] T, window[1] T]``, early enough that higher-order corrections
    do not bias the slope (falling back to all of ``(0, T/10]`` when that
    decade holds fewer than 8 resolved levels).
    """
    pts = history.mesh.points
    T = pts[-1]
    in_tenth = (pts > 0.0) & (pts <= T / 10.0)
    if int(np.count_nonzero(in_tenth)) < 8:
        raise ValueError("need at least 8 levels inside (0, T/10] to fit an exponent")
    d = np.max(np.abs(history.levels - history.levels[0]), axis=1)
    scale = float(np.max(d))
    u0_scale = max(1.0, float(np.max(np.abs(history.levels[0]))))
    if scale < 1e-13 * u0_scale:
        raise ExponentUndefinedError("history is constant; no exponent to fit")
    sel = (pts >= window[0] * T) & (pts <= window[1] * T) & (d > 1e-12 * scale)
    if int(np.count_nonzero(sel)) < 8:
        sel = in_tenth & (d > 1e-12 * scale)
    if int(np.count_nonzero(sel)) < 2:
        raise ExponentUndefinedError("too few resolved levels near t = 0")
    coeffs = np.polyfit(np.log(pts[sel]), np.log(d[sel]), 1)
    return float(coeffs[0])


# --------------------------------------------------------------------------
# run configuration and reports
# --------------------------------------------------------------------------


@dataclass
class RunConfig:
    """One experiment: problem choice plus solver/estimator knobs.

    ``mesh`` is ``adaptive``, ``graded:<r>`` or ``uniform`` (optionally
    ``uniform:<M>``); fixed-mesh runs use ``M`` intervals.  For examples 5-6,
    ``alpha`` is the fractional companion order and ``c1`` defaults to 1 for
    the exponential barrier and 0.5 otherwise.
    """

    example: int | str = 1
    alpha: float = 0.4
    tol: float = 1e-3
    barrier: str = "r0"
    mesh: str = "adaptive"
    M: int = 64
    N: int = 128
    out: str | None = None
    mu: float = 10.0
    c1: float | None = None
    tau: float | None = None
    norm: str = "l2"
    n_sub: int = 15
    samples_per_interval: int = 8
    tau_star: float | None = None
    tau_star_star: float = 0.0
    Q: float = 1.1
    ref_scale: int = 8
    f_variant: str = "default"
    custom: dict | None = None

    @classmethod
    def from_sources(cls, file_values: Mapping | None = None,
                     overrides: Mapping | None = None) -> "RunConfig":
        """Defaults, updated by a config-file mapping, updated by explicit flags."""
        values: dict = {}
        names = {f.name for f in fields(cls)}
        for src in (file_values or {}), (overrides or {}):
            for key, val in src.items():
                if val is None:
                    continue
                if key not in names:
                    raise ValueError(f"unknown run-configuration key {key!r}")
                values[key] = val
        return cls(**values)

    @classmethod
    def from_json(cls, path: str | Path, overrides: Mapping | None = None) -> "RunConfig":
        with open(path) as fh:
            data = json.load(fh)
        return cls.from_sources(data, overrides)


@dataclass
class ErrorReport:
    """Outcome of one run: error table, bound column and run metadata."""

    max_node_error: float
    table: np.ndarray  # rows (t_j, error_j, bound_j)
    M: int
    N: int
    runtime: float
    mesh: TemporalMesh
    history: SolutionHistory
    reference: SolutionHistory
    samples: ResidualSamples
    trace: AdaptiveTrace | None = None
    estimator: EstimatorResult | None = None
    calibration_table: np.ndarray | None = None
    meta: dict = field(default_factory=dict)


def _parse_mesh_spec(spec: str, default_m: int) -> tuple[str, float | None, int]:
    """Returns (kind, grading r or None, M)."""
    if spec == "adaptive":
        return "adaptive", None, default_m
    if spec.startswith("graded"):
        _, _, arg = spec.partition(":")
        if not arg:
            raise ValueError("graded meshes need a grading, e.g. graded:4")
        return "graded", float(arg), default_m
    if spec.startswith("uniform"):
        _, _, arg = spec.partition(":")
        return "uniform", None, int(arg) if arg else default_m
    raise ValueError(f"unknown mesh specification {spec!r}")


def _resolve_problem(config: RunConfig) -> ProblemSpec:
    if config.example == "custom":
        if not config.custom:
            raise ValueError("custom runs need a 'custom' problem mapping")
        return _build_custom(config.custom)
    example = int(config.example)
    c1 = config.c1
    if example in (5, 6) and c1 is None:
        c1 = 1.0 if config.barrier == "exp" else 0.5
    return build_example(example, config.alpha, c1=c1, f_variant=config.f_variant)


def _meta_dict(config: RunConfig, mesh: TemporalMesh, n: int) -> dict:
    meta = {
        "example": config.example,
        "alpha": config.alpha,
        "tol": config.tol,
        "barrier": config.barrier,
        "mesh": config.mesh,
        "M": mesh.M,
        "N": n,
        "norm": config.norm,
    }
    if config.barrier == "exp":
        meta["mu"] = config.mu
    if config.example in (5, 6):
        meta["c1"] = 1.0 if config.c1 is None and config.barrier == "exp" else (
            0.5 if config.c1 is None else config.c1)
    return meta


def write_csv(path: str | Path, header: Sequence[str],
              rows: Iterable[Sequence], meta: Mapping | None = None) -> None:
    """CSV with ``# key=value`` metadata lines, a header row, then data rows."""
    with open(path, "w") as fh:
        for key, val in (meta or {}).items():
            fh.write(f"# {key}={val}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) if isinstance(v, float) else str(v)
                             for v in row) + "\n")


def run_example(config: RunConfig) -> ErrorReport:
    """Execute one configured run and write its CSV artefacts.

    Adaptive runs construct the mesh from the barrier test; fixed-mesh runs
    solve directly.  Uniform-mesh runs of example 6 additionally solve the
    companion estimator problem, whose values become the bound column.
    """
    t_start = time.perf_counter()
    problem = _resolve_problem(config)
    norm_kind = NormKind(config.norm)
    grid = None
    if problem.spatial is not None:
        grid = SpatialGrid1D(problem.spatial.a, problem.spatial.b, config.N)

    kind, r_graded, m_fixed = _parse_mesh_spec(config.mesh, config.M)
    trace = None
    if kind == "adaptive":
        barrier = BarrierSpec(BarrierKind(config.barrier), problem,
                              tau=config.tau, mu=config.mu)
        acfg = AdaptiveConfig(tol=config.tol, barrier=barrier, Q=config.Q,
                              tau_star=config.tau_star,
                              tau_star_star=config.tau_star_star,
                              samples_per_interval=config.samples_per_interval,
                              norm_kind=norm_kind)
        mesh, history, trace = run_adaptive(problem, acfg, grid)
    else:
        mesh = (uniform(m_fixed, problem.T) if kind == "uniform"
                else graded(m_fixed, r_graded, problem.T))
        history = (solve_scalar(problem, mesh) if grid is None
                   else solve_pde_1d(problem, grid, mesh))

    samples = sample_norms(history, problem, max(16, config.n_sub + 1), norm_kind)

    estimator = None
    calibration_table = None
    if kind != "adaptive" and config.example == 6:
        estimator = estimate_on_mesh(problem, history, config.n_sub, norm_kind)
        bound = estimator.at_coarse_nodes(mesh)
    else:
        barrier = BarrierSpec(BarrierKind(config.barrier), problem,
                              tau=config.tau, mu=config.mu)
        if barrier.kind is BarrierKind.R1 and barrier.tau is None:
            barrier = barrier.with_tau(5.0 * float(mesh.points[1]))
        bound = np.array(error_bound_curve(samples, barrier, mesh.points))
        calibration_table = np.column_stack([
            samples.times,
            [calibration(float(t), barrier) for t in samples.times]])

    reference = reference_solution(problem, config.ref_scale, m_run=mesh.M,
                                   inject=mesh, grid=grid)
    errors = _errors_at_shared_nodes(history, reference, norm_kind)
    table = np.column_stack([mesh.points, errors, bound])
    report = ErrorReport(
        max_node_error=float(np.max(errors)),
        table=table,
        M=mesh.M,
        N=grid.N if grid is not None else 0,
        runtime=time.perf_counter() - t_start,
        mesh=mesh,
        history=history,
        reference=reference,
        samples=samples,
        trace=trace,
        estimator=estimator,
        calibration_table=calibration_table,
        meta=_meta_dict(config, mesh, grid.N if grid is not None else 0),
    )
    if config.out is not None:
        _write_run_outputs(Path(config.out), report)
    return report


def _write_run_outputs(out_dir: Path, report: ErrorReport) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = report.meta
    write_csv(out_dir / "mesh.csv", ["t"],
              ([float(t)] for t in report.mesh.points), meta)
    report.history.to_csv(out_dir / "solution.csv")
    write_csv(out_dir / "residual.csv", ["t", "residual_norm"],
              zip(report.samples.times.tolist(), report.samples.norms.tolist()),
              meta)
    write_csv(out_dir / "bound.csv", ["t", "value"],
              ([float(t), float(b)] for t, b in
               zip(report.table[:, 0], report.table[:, 2])), meta)
    write_csv(out_dir / "report.csv", ["t", "error", "bound"],
              ([float(t), float(e), float(b)] for t, e, b in report.table),
              {**meta, "max_node_error": repr(report.max_node_error)})
    if report.calibration_table is not None:
        write_csv(out_dir / "calibration.csv", ["t", "value"],
                  ([float(t), float(v)] for t, v in report.calibration_table),
                  meta)
    if report.estimator is not None:
        report.estimator.to_csv(out_dir / "estimate.csv")
    if report.trace is not None:
        rows = []
        for rec in report.trace.records:
            part = report.samples.restrict(
                float(report.mesh.points[rec.level - 1]), float(rec.t))
            resid_max = float(np.max(part.norms)) if part.times.size else 0.0
            rows.append([rec.level, float(rec.t), rec.attempts,
                         rec.rejections, resid_max])
        write_csv(out_dir / "trace.csv",
                  ["level", "t", "attempts", "rejections", "residual_max"],
                  rows, meta)


def run_sweep(config: RunConfig, tols: Sequence[float]) -> list[ErrorReport]:
    """Run the configured example once per tolerance; write a sweep summary."""
    if not tols:
        raise ValueError("sweep needs at least one tolerance")
    reports = []
    for tol in tols:
        sub = replace(config, tol=float(tol))
        if config.out is not None:
            sub = replace(sub, out=str(Path(config.out) / f"tol_{tol:.1e}"))
        reports.append(run_example(sub))
    if config.out is not None:
        out_dir = Path(config.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        meta = {k: v for k, v in reports[0].meta.items() if k not in ("tol", "M")}
        write_csv(out_dir / "sweep.csv", ["tol", "M", "max_error"],
                  ([float(t), r.M, float(r.max_node_error)]
                   for t, r in zip(tols, reports)), meta)
    return reports
