"""L1 time stepping for multiterm fractional problems on arbitrary meshes.

The scheme replaces each fractional derivative of order ``alpha < 1`` by the
exact Caputo derivative of the piecewise-linear-in-time interpolant of the
computed values; an order-one leading term is discretised by the backward
difference, i.e. the interpolant's left-continuous slope.  Scalar
initial-value problems and 1D subdiffusion problems (second-order central
differences in space, homogeneous Dirichlet data) are supported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import solve_banded

from .errors import SingularStepError
from .mesh import TemporalMesh

__all__ = [
    "Laplace1D",
    "SpatialGrid1D",
    "ProblemSpec",
    "SolutionHistory",
    "l1_coeffs",
    "apply_dt_bar",
    "solve_scalar",
    "solve_pde_1d",
]

_Q_SAMPLE_COUNT = 65


@dataclass(frozen=True)
class Laplace1D:
    """Spatial operator ``-d^2/dx^2 + c`` on the interval (a, b)."""

    a: float
    b: float
    c: float = 0.0

    def __post_init__(self) -> None:
        if not self.b > self.a:
            raise ValueError(f"domain must satisfy b > a, got ({self.a}, {self.b})")
        if self.c < 0.0:
            raise ValueError(f"zeroth-order coefficient must be >= 0, got {self.c}")


@dataclass(frozen=True)
class SpatialGrid1D:
    """Uniform grid with N interior points; Dirichlet values pinned at both ends."""

    a: float
    b: float
    N: int

    def __post_init__(self) -> None:
        if self.N < 1:
            raise ValueError(f"need at least one interior point, got N={self.N}")
        if not self.b > self.a:
            raise ValueError(f"domain must satisfy b > a, got ({self.a}, {self.b})")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.N + 1)

    @property
    def x(self) -> np.ndarray:
        """Interior nodes ``a + h, ..., b - h``."""
        return self.a + self.h * np.arange(1, self.N + 1)


@dataclass
class ProblemSpec:
    """One instance of the multiterm problem.

    ``alphas`` are the strictly decreasing derivative orders, the leading one
    in (0, 1] and all others in (0, 1).  ``q_funcs`` are the matching
    nonnegative coefficient functions with positive sum on [0, T].  For
    ``spatial=None`` the equation is the scalar problem
    ``sum q_i D^{a_i} u + lambda_ u = f(t)``; otherwise the subdiffusion
    problem with the given 1D operator, ``f = f(x, t)`` and Dirichlet walls.
    """

    alphas: tuple[float, ...]
    q_funcs: tuple[Callable[[float], float], ...]
    lambda_: float
    f: Callable
    u0: float | Callable
    T: float
    spatial: Laplace1D | None = None

    def __post_init__(self) -> None:
        self.alphas = tuple(float(a) for a in self.alphas)
        self.q_funcs = tuple(self.q_funcs)
        if len(self.alphas) == 0 or len(self.alphas) != len(self.q_funcs):
            raise ValueError("alphas and q_funcs must have equal positive length")
        if not 0.0 < self.alphas[0] <= 1.0:
            raise ValueError(f"leading order must lie in (0, 1], got {self.alphas[0]}")
        if any(not 0.0 < a < 1.0 for a in self.alphas[1:]):
            raise ValueError("all trailing orders must lie in (0, 1)")
        if any(a2 >= a1 for a1, a2 in zip(self.alphas, self.alphas[1:])):
            raise ValueError(f"orders must be strictly decreasing, got {self.alphas}")
        if self.lambda_ < 0.0:
            raise ValueError(f"lambda_ must be nonnegative, got {self.lambda_}")
        if not self.T > 0.0:
            raise ValueError(f"final time must be positive, got {self.T}")
        for t in np.linspace(0.0, self.T, _Q_SAMPLE_COUNT):
            qs = [q(t) for q in self.q_funcs]
            if any(q < -1e-12 for q in qs):
                raise ValueError(f"coefficient negative at t={t}: {qs}")
            if sum(qs) <= 0.0:
                raise ValueError(f"coefficient sum not positive at t={t}")

    @property
    def has_unit_order(self) -> bool:
        return self.alphas[0] == 1.0

    def q_at(self, t: float) -> np.ndarray:
        return np.array([q(t) for q in self.q_funcs])

    def u0_values(self, grid: SpatialGrid1D | None) -> np.ndarray:
        if grid is None:
            if callable(self.u0):
                raise ValueError("scalar problems need a scalar initial value")
            return np.array([float(self.u0)])
        if callable(self.u0):
            return np.asarray(self.u0(grid.x), dtype=float)
        return np.full(grid.N, float(self.u0))

    def f_values(self, t: float, grid: SpatialGrid1D | None) -> np.ndarray:
        if grid is None:
            return np.array([float(self.f(t))])
        return np.broadcast_to(np.asarray(self.f(grid.x, t), dtype=float),
                               (grid.N,)).copy()


@dataclass
class SolutionHistory:
    """Per-level values of an L1 solve plus its mesh.

    ``levels[j]`` holds the value vector at ``t_j`` (length 1 for scalar
    problems).  Between mesh points the solution is understood as the
    piecewise-linear-in-time interpolant of these values.
    """

    mesh: TemporalMesh
    levels: np.ndarray
    grid: SpatialGrid1D | None = None

    def __post_init__(self) -> None:
        lv = np.asarray(self.levels, dtype=float)
        if lv.ndim == 1:
            lv = lv[:, None]
        if lv.shape[0] != self.mesh.points.size:
            raise ValueError("level count must equal mesh point count")
        self.levels = lv

    @property
    def is_scalar(self) -> bool:
        return self.grid is None

    def interpolate(self, t: float) -> np.ndarray:
        """Value of the piecewise-linear interpolant at time t."""
        pts = self.mesh.points
        if not 0.0 <= t <= pts[-1]:
            raise ValueError(f"t={t} outside [0, {pts[-1]}]")
        j = int(np.searchsorted(pts, t, side="left"))
        if j == 0:
            return self.levels[0].copy()
        theta = (t - pts[j - 1]) / (pts[j] - pts[j - 1])
        return (1.0 - theta) * self.levels[j - 1] + theta * self.levels[j]

    def to_csv(self, path: str | Path) -> None:
        """Columns ``t, u`` (scalar) or ``t, x0..x{N-1}`` (interior values)."""
        cols = ["u"] if self.is_scalar else [f"x{i}" for i in range(self.levels.shape[1])]
        with open(path, "w") as fh:
            fh.write("t," + ",".join(cols) + "\n")
            for t, row in zip(self.mesh.points, self.levels):
                fh.write(f"{float(t)!r}," + ",".join(f"{float(v)!r}" for v in row) + "\n")


# --------------------------------------------------------------------------
# Caputo derivative of the piecewise-linear interpolant
# --------------------------------------------------------------------------


def _diff_weights(points: np.ndarray, alpha: float, t: float, j: int) -> np.ndarray:
    """Weights w_k with ``D^alpha u_h(t) = sum_{k<=j} w_k (u^k - u^{k-1})``.

    Exact for the piecewise-linear interpolant on the mesh; ``t`` must lie in
    ``(t_{j-1}, t_j]``.  The final interval is integrated only up to t.
    """
    one_m_a = 1.0 - alpha
    inv_g = 1.0 / math.gamma(2.0 - alpha)
    lefts = points[:j]
    taus = points[1:j + 1] - lefts
    upper = (t - lefts) ** one_m_a
    lower = np.empty(j)
    if j > 1:
        lower[:j - 1] = (t - points[1:j]) ** one_m_a
    lower[j - 1] = 0.0
    return inv_g * (upper - lower) / taus


def l1_coeffs(mesh: TemporalMesh, alpha: float, j: int) -> np.ndarray:
    """L1 weights at level j: ``D^alpha u_h(t_j) = sum_k w_{j,k}(u^k - u^{k-1})``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"L1 weights require alpha in (0, 1), got {alpha}")
    if not 1 <= j <= mesh.M:
        raise ValueError(f"level index must lie in [1, {mesh.M}], got {j}")
    return _diff_weights(mesh.points, alpha, float(mesh.points[j]), j)


def _caputo_interp(points: np.ndarray, diffs: np.ndarray, alpha: float,
                   t: float, j: int) -> np.ndarray:
    """Caputo derivative of the interpolant at ``t in (t_{j-1}, t_j]``."""
    w = _diff_weights(points, alpha, t, j)
    return w @ diffs[:j]


def apply_dt_bar(history: SolutionHistory, j: int, problem: ProblemSpec) -> np.ndarray:
    """Discrete multiterm operator ``sum_i q_i(t_j) D^{a_i}`` applied at level j.

    Orders below one use the L1 weights; a leading order of exactly one uses
    the backward difference over the current step.
    """
    if not 1 <= j <= history.mesh.M:
        raise ValueError(f"level index must lie in [1, {history.mesh.M}], got {j}")
    pts = history.mesh.points
    t_j = float(pts[j])
    diffs = np.diff(history.levels[:j + 1], axis=0)
    total = np.zeros(history.levels.shape[1])
    for alpha_i, q_i in zip(problem.alphas, problem.q_funcs):
        q = q_i(t_j)
        if alpha_i == 1.0:
            total += q * diffs[j - 1] / (pts[j] - pts[j - 1])
        else:
            total += q * _caputo_interp(pts, diffs, alpha_i, t_j, j)
    return total


# --------------------------------------------------------------------------
# spatial operators
# --------------------------------------------------------------------------


class _ScalarOp:
    """Multiplication by the reaction constant; one-unknown solves."""

    n = 1

    def __init__(self, lambda_: float):
        self.lambda_ = lambda_

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.lambda_ * v

    def solve(self, diag: float, rhs: np.ndarray) -> np.ndarray:
        denom = diag + self.lambda_
        if denom <= 0.0:
            raise SingularStepError(f"non-positive scalar diagonal {denom}")
        return rhs / denom


class _Laplace1DOp:
    """Central-difference discretisation of ``-d^2/dx^2 + c`` with Dirichlet rows
    eliminated; tridiagonal solves by banded elimination."""

    def __init__(self, grid: SpatialGrid1D, c: float):
        self.grid = grid
        self.c = c
        self.n = grid.N
        h2 = grid.h * grid.h
        self.off = -1.0 / h2
        self.main = 2.0 / h2 + c

    def apply(self, v: np.ndarray) -> np.ndarray:
        out = self.main * v
        out[:-1] += self.off * v[1:]
        out[1:] += self.off * v[:-1]
        return out

    def solve(self, diag: float, rhs: np.ndarray) -> np.ndarray:
        if diag + self.main <= 0.0:
            raise SingularStepError(f"non-positive tridiagonal diagonal {diag + self.main}")
        ab = np.empty((3, self.n))
        ab[0, :] = self.off
        ab[1, :] = self.main + diag
        ab[2, :] = self.off
        try:
            return solve_banded((1, 1), ab, rhs)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
            raise SingularStepError(str(exc)) from exc


def _make_operator(problem: ProblemSpec, grid: SpatialGrid1D | None):
    if problem.spatial is None:
        return _ScalarOp(problem.lambda_)
    if grid is None:
        raise ValueError("PDE problems need a spatial grid")
    if not (math.isclose(grid.a, problem.spatial.a) and math.isclose(grid.b, problem.spatial.b)):
        raise ValueError("grid domain does not match the spatial operator domain")
    return _Laplace1DOp(grid, problem.spatial.c)


# --------------------------------------------------------------------------
# time stepping
# --------------------------------------------------------------------------


class _LevelSolver:
    """Incremental L1 stepping engine shared by the fixed-mesh and adaptive drivers.

    Committed state: times t_0..t_m and value vectors u^0..u^m.  A trial level
    at any t > t_m can be computed without committing, which is what the
    adaptive algorithm's inner loop needs.
    """

    def __init__(self, problem: ProblemSpec, grid: SpatialGrid1D | None,
                 capacity: int = 64):
        self.problem = problem
        self.grid = grid
        self.op = _make_operator(problem, grid)
        n = self.op.n
        cap = max(capacity, 4)
        self._times = np.empty(cap)
        self._levels = np.empty((cap, n))
        self._diffs = np.empty((cap, n))
        self._times[0] = 0.0
        self._levels[0] = problem.u0_values(grid)
        self.count = 1  # committed levels including t_0

    def _ensure(self, m: int) -> None:
        cap = self._times.size
        if m < cap:
            return
        new = max(2 * cap, m + 1)
        self._times = np.resize(self._times, new)
        lv = np.empty((new, self._levels.shape[1]))
        lv[:self.count] = self._levels[:self.count]
        self._levels = lv
        df = np.empty((new, self._diffs.shape[1]))
        df[:self.count - 1] = self._diffs[:self.count - 1]
        self._diffs = df

    @property
    def last_time(self) -> float:
        return float(self._times[self.count - 1])

    def trial(self, t_new: float) -> np.ndarray:
        """Solve one level at t_new on top of the committed history."""
        j = self.count
        self._ensure(j)
        prev_t = self._times[j - 1]
        tau = t_new - prev_t
        if tau <= 0.0:
            raise ValueError(f"trial time {t_new} not beyond {prev_t}")
        pts = self._times
        pts[j] = t_new  # scratch slot; only committed on commit()
        u_prev = self._levels[j - 1]
        diag = 0.0
        rhs = self.problem.f_values(t_new, self.grid)
        for alpha_i, q_i in zip(self.problem.alphas, self.problem.q_funcs):
            q = q_i(t_new)
            if alpha_i == 1.0:
                diag += q / tau
                rhs += q / tau * u_prev
            else:
                w = _diff_weights(pts[:j + 1], alpha_i, t_new, j)
                diag += q * w[-1]
                rhs += q * (w[-1] * u_prev - (w[:-1] @ self._diffs[:j - 1]))
        return self.op.solve(diag, rhs)

    def commit(self, t_new: float, u_new: np.ndarray) -> None:
        j = self.count
        self._ensure(j)
        self._times[j] = t_new
        self._levels[j] = u_new
        self._diffs[j - 1] = u_new - self._levels[j - 1]
        self.count = j + 1

    def step(self, t_new: float) -> np.ndarray:
        u = self.trial(t_new)
        self.commit(t_new, u)
        return u

    def snapshot(self, extra: tuple[float, np.ndarray] | None = None) -> SolutionHistory:
        """History of the committed levels, optionally with one trial level."""
        m = self.count
        if extra is None:
            pts = self._times[:m].copy()
            lv = self._levels[:m].copy()
        else:
            t_new, u_new = extra
            pts = np.empty(m + 1)
            pts[:m] = self._times[:m]
            pts[m] = t_new
            lv = np.empty((m + 1, self._levels.shape[1]))
            lv[:m] = self._levels[:m]
            lv[m] = u_new
        return SolutionHistory(TemporalMesh(pts), lv, self.grid)


def _solve_on_mesh(problem: ProblemSpec, grid: SpatialGrid1D | None,
                   mesh: TemporalMesh) -> SolutionHistory:
    if not math.isclose(mesh.T, problem.T, rel_tol=1e-12):
        raise ValueError(f"mesh horizon {mesh.T} does not match problem T={problem.T}")
    solver = _LevelSolver(problem, grid, capacity=mesh.points.size)
    for t in mesh.points[1:]:
        solver.step(float(t))
    levels = solver._levels[:solver.count].copy()
    return SolutionHistory(mesh, levels, grid)


def solve_scalar(problem: ProblemSpec, mesh: TemporalMesh) -> SolutionHistory:
    """L1 solve of the scalar initial-value problem on the given mesh."""
    if problem.spatial is not None:
        raise ValueError("solve_scalar is for problems without a spatial operator")
    return _solve_on_mesh(problem, None, mesh)


def solve_pde_1d(problem: ProblemSpec, grid: SpatialGrid1D,
                 mesh: TemporalMesh) -> SolutionHistory:
    """L1 solve of the 1D subdiffusion problem on the given grid and mesh."""
    if problem.spatial is None:
        raise ValueError("solve_pde_1d needs a problem with a spatial operator")
    return _solve_on_mesh(problem, grid, mesh)
