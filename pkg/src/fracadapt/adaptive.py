"""Adaptive construction of temporal meshes from residual acceptance tests.

Each level is solved on a trial step; if the sampled residual stays below
``tol * calibration`` across the step, the step is stashed and retried with a
factor-Q larger trial, otherwise the step is shrunk (before any pass) or the
stash is committed and the next level starts with the committed width.  The
result is a mesh on which the a posteriori error bound of the chosen barrier
holds with the prescribed tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .barriers import BarrierKind, BarrierSpec, calibration
from .errors import NonterminationError, StepCollapseError
from .l1 import ProblemSpec, SolutionHistory, SpatialGrid1D, _LevelSolver
from .mesh import TemporalMesh
from .residual import NormKind, _interval_norms

__all__ = ["AdaptiveConfig", "AdaptiveTrace", "run_adaptive"]


@dataclass(frozen=True)
class AdaptiveConfig:
    """Knobs of the adaptive driver.

    ``tau_star`` is the initial trial step (default ``T * 2**-10``);
    ``tau_star_star`` the minimum step the shrink loop may reach before the
    current trial is force-accepted.  The residual check samples
    ``samples_per_interval`` equispaced interior points per trial interval
    (plus the midpoint on the first interval).
    """

    tol: float
    barrier: BarrierSpec
    Q: float = 1.1
    tau_star: float | None = None
    tau_star_star: float = 0.0
    samples_per_interval: int = 8
    max_levels: int = 100_000
    norm_kind: NormKind = NormKind.L2

    def __post_init__(self) -> None:
        if not self.tol > 0.0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if not self.Q > 1.0:
            raise ValueError(f"Q must exceed 1, got {self.Q}")
        if self.tau_star is not None and not self.tau_star > 0.0:
            raise ValueError(f"tau_star must be positive, got {self.tau_star}")
        if self.tau_star_star < 0.0:
            raise ValueError(f"tau_star_star must be >= 0, got {self.tau_star_star}")
        if self.samples_per_interval < 1:
            raise ValueError("samples_per_interval must be a positive integer")
        if self.max_levels < 1:
            raise ValueError("max_levels must be a positive integer")


@dataclass
class LevelRecord:
    level: int
    t: float
    attempts: int
    rejections: int


@dataclass
class AdaptiveTrace:
    """Bookkeeping of the adaptive run; ``accepted_steps`` equals the final M."""

    accepted_steps: int = 0
    rejected_steps: int = 0
    records: list[LevelRecord] = field(default_factory=list)


def _check_fractions(samples_per_interval: int, first_level: bool) -> np.ndarray:
    n = samples_per_interval
    fracs = np.arange(1, n + 1, dtype=float) / (n + 1)
    if first_level and not np.any(np.isclose(fracs, 0.5)):
        fracs = np.sort(np.append(fracs, 0.5))
    return fracs


def _effective_barrier(config: AdaptiveConfig, t1: float) -> BarrierSpec:
    """Bind the R1 parameter to five times the (candidate) first step."""
    b = config.barrier
    if b.kind is BarrierKind.R1 and b.tau is None:
        return b.with_tau(5.0 * t1)
    return b


def _step_accepted(solver: _LevelSolver, problem: ProblemSpec, trial: float,
                   u_trial: np.ndarray, config: AdaptiveConfig, m: int) -> bool:
    left = solver.last_time
    fracs = _check_fractions(config.samples_per_interval, m == 1)
    times = left + (trial - left) * fracs
    history = solver.snapshot(extra=(trial, u_trial))
    barrier = _effective_barrier(config, trial if m == 1 else float(history.mesh.points[1]))
    norms = _interval_norms(history, problem, m, times, config.norm_kind)
    tol = config.tol
    return all(r <= tol * calibration(float(t), barrier)
               for t, r in zip(times, norms))


def run_adaptive(problem: ProblemSpec, config: AdaptiveConfig,
                 grid: SpatialGrid1D | None = None
                 ) -> tuple[TemporalMesh, SolutionHistory, AdaptiveTrace]:
    """Construct a mesh on which every interval passes the residual test.

    Returns the accepted mesh (ending exactly at T), the solution history on
    it, and the attempt/rejection trace.  PDE problems need the spatial grid.
    """
    if (problem.spatial is None) != (grid is None):
        raise ValueError("pass a grid exactly when the problem has a spatial operator")
    T = problem.T
    tau_star = config.tau_star if config.tau_star is not None else T * 2.0 ** -10
    solver = _LevelSolver(problem, grid)
    trace = AdaptiveTrace()
    trial = min(tau_star, T)
    m = 0
    while solver.last_time < T:
        m += 1
        if m > config.max_levels:
            raise NonterminationError(
                f"exceeded max_levels={config.max_levels}", trace=trace)
        flag = 0
        stash: tuple[float, np.ndarray] | None = None
        attempts = 0
        rejections = 0
        left = solver.last_time
        finished_level = False
        while trial - left > config.tau_star_star:
            attempts += 1
            u_trial = solver.trial(trial)
            if _step_accepted(solver, problem, trial, u_trial, config, m):
                if trial == T:
                    solver.commit(trial, u_trial)
                    finished_level = True
                    break
                stash = (trial, u_trial)
                trial = min(left + config.Q * (trial - left), T)
                flag = 1
            else:
                trace.rejected_steps += 1
                rejections += 1
                if flag == 0:
                    new_trial = left + (trial - left) / config.Q
                    if not new_trial > left or new_trial >= trial:
                        raise StepCollapseError(
                            f"step collapsed to {trial - left:.3e} at level {m}")
                    trial = new_trial
                else:
                    t_st, u_st = stash
                    solver.commit(t_st, u_st)
                    trial = min(t_st + (t_st - left), T)
                    finished_level = True
                    break
        else:
            # Step floor reached (tau_star_star > 0): force-accept the floored
            # trial so the run can proceed; the check did not pass here.
            u_trial = solver.trial(trial)
            solver.commit(trial, u_trial)
            trial = min(solver.last_time + (solver.last_time - left), T)
            finished_level = True
        if not finished_level:
            raise StepCollapseError(f"level {m} made no progress")  # pragma: no cover
        trace.accepted_steps += 1
        trace.records.append(LevelRecord(m, solver.last_time, attempts, rejections))
    history = solver.snapshot()
    return history.mesh, history, trace
