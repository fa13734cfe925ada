"""Exact residual sampling between mesh points, and discrete norms.

The residual of the computed interpolant vanishes at every mesh node, so on
each interval it is a bubble that can be sampled from time-derivative data
alone: the spatial operator never has to be applied to the history.  Writing
``g = (multiterm time operator applied to u_h) - f``, the residual at
``t in (t_{j-1}, t_j]`` is

    R(t) = g(t) - [linear interpolant of g's node values] + (1 - t/t_1)^+ R(0+),

where node values are understood as left limits (relevant when the leading
order is one and the slope jumps across nodes) and
``R(0+) = L u_0 - f(., 0) + q_1(0) * (first-interval slope)`` with the slope
term present only for a leading order of one.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .l1 import (ProblemSpec, SolutionHistory, SpatialGrid1D, _caputo_interp,
                 _make_operator)

__all__ = ["NormKind", "ResidualSamples", "residual_at", "residual_norm",
           "sample_norms"]


class NormKind(str, enum.Enum):
    L2 = "l2"
    LINF = "linf"


@dataclass
class ResidualSamples:
    """Residual norms at strictly increasing sample times in (0, T]."""

    times: np.ndarray
    norms: np.ndarray
    norm_kind: NormKind

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.norms = np.asarray(self.norms, dtype=float)
        if self.times.shape != self.norms.shape:
            raise ValueError("times and norms must have matching shapes")
        if self.times.size and self.times[0] <= 0.0:
            raise ValueError("sample times must be strictly positive")
        if np.any(np.diff(self.times) <= 0.0):
            raise ValueError("sample times must be strictly increasing")
        if np.any(self.norms < 0.0):
            raise ValueError("norms must be nonnegative")

    def restrict(self, lo: float, hi: float) -> "ResidualSamples":
        """Samples with times in the half-open window (lo, hi]."""
        mask = (self.times > lo) & (self.times <= hi)
        return ResidualSamples(self.times[mask], self.norms[mask], self.norm_kind)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            fh.write("t,residual_norm\n")
            for t, r in zip(self.times, self.norms):
                fh.write(f"{float(t)!r},{float(r)!r}\n")


def _initial_residual(history: SolutionHistory, problem: ProblemSpec) -> np.ndarray:
    """Right limit of the residual at t = 0."""
    op = _make_operator(problem, history.grid)
    r0 = op.apply(history.levels[0]) - problem.f_values(0.0, history.grid)
    if problem.has_unit_order:
        pts = history.mesh.points
        slope1 = (history.levels[1] - history.levels[0]) / (pts[1] - pts[0])
        r0 = r0 + problem.q_funcs[0](0.0) * slope1
    return r0


def _operator_minus_f(history: SolutionHistory, problem: ProblemSpec,
                      diffs: np.ndarray, t: float, j: int) -> np.ndarray:
    """(multiterm operator of u_h)(t) - f(t) for ``t in (t_{j-1}, t_j]``."""
    pts = history.mesh.points
    out = -problem.f_values(t, history.grid)
    for alpha_i, q_i in zip(problem.alphas, problem.q_funcs):
        q = q_i(t)
        if alpha_i == 1.0:
            out += q * diffs[j - 1] / (pts[j] - pts[j - 1])
        else:
            out += q * _caputo_interp(pts, diffs, alpha_i, t, j)
    return out


def _node_value(history: SolutionHistory, problem: ProblemSpec,
                diffs: np.ndarray, k: int) -> np.ndarray:
    """Left-limit value of (operator of u_h - f) at node k; the k = 0 value is
    the 0+ limit of the time-derivative part alone."""
    pts = history.mesh.points
    if k == 0:
        g0 = -problem.f_values(0.0, history.grid)
        if problem.has_unit_order:
            g0 += problem.q_funcs[0](0.0) * diffs[0] / (pts[1] - pts[0])
        return g0
    return _operator_minus_f(history, problem, diffs, float(pts[k]), k)


def _node_values(history: SolutionHistory, problem: ProblemSpec,
                 diffs: np.ndarray) -> np.ndarray:
    g = np.empty_like(history.levels)
    for k in range(history.mesh.points.size):
        g[k] = _node_value(history, problem, diffs, k)
    return g


def _residual_core(history: SolutionHistory, problem: ProblemSpec,
                   diffs: np.ndarray, g_left: np.ndarray, g_right: np.ndarray,
                   r0: np.ndarray, t: float, j: int) -> np.ndarray:
    pts = history.mesh.points
    theta = (t - pts[j - 1]) / (pts[j] - pts[j - 1])
    res = (_operator_minus_f(history, problem, diffs, t, j)
           - (1.0 - theta) * g_left - theta * g_right)
    if j == 1:
        res += (1.0 - t / pts[1]) * r0
    return res


def residual_at(history: SolutionHistory, problem: ProblemSpec,
                t: float) -> np.ndarray:
    """Residual field of the computed interpolant at time t in (0, T].

    Evaluates the node-interpolation identity; the result agrees with the
    direct definition (multiterm operator + spatial operator - f) applied to
    the interpolant, and vanishes at the mesh nodes.
    """
    pts = history.mesh.points
    if not 0.0 < t <= pts[-1]:
        raise ValueError(f"sample time {t} outside (0, {pts[-1]}]")
    j = int(np.searchsorted(pts, t, side="left"))
    diffs = np.diff(history.levels, axis=0)
    g_left = _node_value(history, problem, diffs, j - 1)
    g_right = _node_value(history, problem, diffs, j)
    return _residual_core(history, problem, diffs, g_left, g_right,
                          _initial_residual(history, problem), t, j)


def _interval_norms(history: SolutionHistory, problem: ProblemSpec,
                    j: int, times: Sequence[float],
                    norm_kind: NormKind) -> list[float]:
    """Residual norms at the given times, all inside ``(t_{j-1}, t_j]``.

    Shares the two node values across samples, which is what the adaptive
    step-acceptance check needs to stay O(samples * level).
    """
    kind = NormKind(norm_kind)
    diffs = np.diff(history.levels, axis=0)
    g_left = _node_value(history, problem, diffs, j - 1)
    g_right = _node_value(history, problem, diffs, j)
    r0 = _initial_residual(history, problem)
    return [residual_norm(
        _residual_core(history, problem, diffs, g_left, g_right, r0, float(t), j),
        history.grid, kind) for t in times]


def residual_norm(field: np.ndarray, grid: SpatialGrid1D | None,
                  norm_kind: NormKind = NormKind.L2) -> float:
    """Discrete norm of a residual field.

    Scalar problems use the absolute value under either kind.  On a grid the
    L2 norm is the composite trapezoid rule with zero boundary values and
    Linf is the maximum absolute value.
    """
    field = np.asarray(field, dtype=float)
    if grid is None:
        if field.size != 1:
            raise ValueError("scalar norm expects a single value")
        return float(abs(field[0]))
    if field.size != grid.N:
        raise ValueError(f"field size {field.size} does not match grid N={grid.N}")
    if NormKind(norm_kind) is NormKind.LINF:
        return float(np.max(np.abs(field)))
    return float(math.sqrt(grid.h * float(np.dot(field, field))))


def _interval_sample_times(left: float, right: float, n: int) -> np.ndarray:
    """n equispaced samples in (left, right], the last exactly at right.

    Uses the same arithmetic as mesh refinement so that the sample times of
    ``sample_norms(.., n)`` coincide bitwise with the nodes of
    ``refine(mesh, n - 1)``.
    """
    step = (right - left) / n
    out = left + step * np.arange(1, n + 1)
    out[-1] = right
    return out


def sample_norms(history: SolutionHistory, problem: ProblemSpec,
                 sub_per_interval: int,
                 norm_kind: NormKind = NormKind.L2) -> ResidualSamples:
    """Residual norms on ``sub_per_interval`` equispaced points per interval.

    Each interval contributes the points ``t_{j-1} + k (t_j - t_{j-1}) / n``
    for ``k = 1..n``, so the right endpoint is always included and
    ``sub_per_interval = 1`` samples the nodes only.
    """
    if sub_per_interval < 1:
        raise ValueError(f"sub_per_interval must be positive, got {sub_per_interval}")
    kind = NormKind(norm_kind)
    pts = history.mesh.points
    diffs = np.diff(history.levels, axis=0)
    g = _node_values(history, problem, diffs)
    r0 = _initial_residual(history, problem)
    times: list[float] = []
    norms: list[float] = []
    for j in range(1, pts.size):
        for t in _interval_sample_times(float(pts[j - 1]), float(pts[j]),
                                        sub_per_interval):
            field = _residual_core(history, problem, diffs, g[j - 1], g[j],
                                   r0, float(t), j)
            times.append(float(t))
            norms.append(residual_norm(field, history.grid, kind))
    return ResidualSamples(np.array(times), np.array(norms), kind)
