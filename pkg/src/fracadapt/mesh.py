"""Temporal meshes: uniform, graded and subdivided refinements."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["TemporalMesh", "uniform", "graded", "refine"]


@dataclass(frozen=True)
class TemporalMesh:
    """Strictly increasing time points ``t_0 = 0 < t_1 < ... < t_M = T``."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("a mesh needs at least two points")
        if pts[0] != 0.0:
            raise ValueError(f"mesh must start at t = 0, got {pts[0]}")
        if np.any(np.diff(pts) <= 0.0):
            raise ValueError("mesh points must be strictly increasing")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def M(self) -> int:
        return self.points.size - 1

    @property
    def T(self) -> float:
        return float(self.points[-1])

    def steps(self) -> np.ndarray:
        return np.diff(self.points)

    def to_csv(self, path: str | Path) -> None:
        """One-column CSV with header ``t``."""
        with open(path, "w") as fh:
            fh.write("t\n")
            for t in self.points:
                fh.write(f"{float(t)!r}\n")


def uniform(M: int, T: float) -> TemporalMesh:
    """Equispaced mesh ``t_k = k T / M``."""
    return graded(M, 1.0, T)


def graded(M: int, r: float, T: float) -> TemporalMesh:
    """Graded mesh ``t_k = T (k/M)^r``; ``r = 1`` reproduces the uniform mesh."""
    if M < 1:
        raise ValueError(f"M must be a positive integer, got {M}")
    if r < 1.0:
        raise ValueError(f"grading exponent must satisfy r >= 1, got {r}")
    if T <= 0.0:
        raise ValueError(f"final time must be positive, got {T}")
    frac = np.arange(M + 1, dtype=float) / M
    pts = T * (frac if r == 1.0 else frac**r)
    return TemporalMesh(pts)


def refine(mesh: TemporalMesh, n_sub: int) -> TemporalMesh:
    """Insert ``n_sub`` equispaced points inside every interval.

    Each ``(t_{j-1}, t_j]`` is split into ``n_sub + 1`` equal parts; the
    original points are preserved exactly.
    """
    if n_sub < 1:
        raise ValueError(f"n_sub must be a positive integer, got {n_sub}")
    coarse = mesh.points
    parts = n_sub + 1
    out = np.empty(mesh.M * parts + 1)
    out[0] = coarse[0]
    for j in range(1, coarse.size):
        left, right = coarse[j - 1], coarse[j]
        step = (right - left) / parts
        base = (j - 1) * parts
        for i in range(1, parts):
            out[base + i] = left + i * step
        out[base + parts] = right
    return TemporalMesh(out)
