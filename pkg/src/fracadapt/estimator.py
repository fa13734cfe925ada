"""A posteriori error estimation on a prescribed mesh via a companion problem.

Given a computed history on a coarse mesh, the residual norm is sampled on a
refined mesh and fed as the source of the scalar companion problem
``(multiterm operator + lambda) E = ||R||, E(0) = 0`` solved with the same L1
machinery on the fine mesh.  The discrete solution dominates the actual error
at the coarse nodes and needs no barrier function.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .l1 import ProblemSpec, SolutionHistory, solve_scalar
from .mesh import TemporalMesh, refine
from .residual import NormKind, ResidualSamples, sample_norms

__all__ = ["EstimatorResult", "estimate_on_mesh"]


@dataclass
class EstimatorResult:
    """Fine-mesh estimate values plus the residual samples that drove them."""

    fine_mesh: TemporalMesh
    estimate: np.ndarray
    residual_input: ResidualSamples

    def __post_init__(self) -> None:
        self.estimate = np.asarray(self.estimate, dtype=float)
        if self.estimate.size != self.fine_mesh.points.size:
            raise ValueError("estimate must hold one value per fine node")
        if self.estimate[0] != 0.0:
            raise ValueError("the estimate must vanish at t = 0")

    def at_coarse_nodes(self, coarse: TemporalMesh) -> np.ndarray:
        """Estimate values at the nodes of the coarse mesh (exact node matches)."""
        idx = np.searchsorted(self.fine_mesh.points, coarse.points)
        if not np.allclose(self.fine_mesh.points[idx], coarse.points,
                           rtol=1e-12, atol=1e-300):
            raise ValueError("coarse mesh is not embedded in the fine mesh")
        return self.estimate[idx]

    def to_csv(self, path: str | Path) -> None:
        """Columns ``t, residual_norm, estimate`` at the fine nodes."""
        norms = np.concatenate(([0.0], self.residual_input.norms))
        with open(path, "w") as fh:
            fh.write("t,residual_norm,estimate\n")
            for t, r, e in zip(self.fine_mesh.points, norms, self.estimate):
                fh.write(f"{float(t)!r},{float(r)!r},{float(e)!r}\n")


class _NodeTable:
    """Source callable backed by exact values at the fine nodes."""

    def __init__(self, points: np.ndarray, values: np.ndarray):
        self.points = points
        self.values = values

    def __call__(self, t: float) -> float:
        idx = int(np.searchsorted(self.points, t))
        for k in (idx, idx - 1, idx + 1):
            if 0 <= k < self.points.size and abs(self.points[k] - t) <= 1e-12 * max(1.0, abs(t)):
                return float(self.values[k])
        raise ValueError(f"companion source queried off-node at t={t}")


def estimate_on_mesh(problem: ProblemSpec, history: SolutionHistory,
                     n_sub: int = 15,
                     norm_kind: NormKind = NormKind.L2) -> EstimatorResult:
    """Solve the companion problem for the residual of `history` on a refined mesh.

    ``n_sub`` interior points are added per interval (so each step is split
    into ``n_sub + 1`` parts); the residual norm is sampled at every fine node
    and the companion scalar problem is solved there by the same L1 scheme.
    """
    if n_sub < 1:
        raise ValueError(f"n_sub must be a positive integer, got {n_sub}")
    fine = refine(history.mesh, n_sub)
    samples = sample_norms(history, problem, n_sub + 1, norm_kind)
    if samples.times.size != fine.points.size - 1 or not np.array_equal(
            samples.times, fine.points[1:]):
        raise AssertionError("sample times must coincide with the fine nodes")
    source = _NodeTable(fine.points, np.concatenate(([0.0], samples.norms)))
    companion = ProblemSpec(
        alphas=problem.alphas,
        q_funcs=problem.q_funcs,
        lambda_=problem.lambda_,
        f=source,
        u0=0.0,
        T=problem.T,
        spatial=None,
    )
    est_history = solve_scalar(companion, fine)
    estimate = est_history.levels[:, 0].copy()
    scale = float(np.max(np.abs(estimate))) or 1.0
    if np.any(estimate < -1e-12 * scale):
        raise AssertionError("companion estimate dipped significantly below zero")
    estimate[0] = 0.0
    return EstimatorResult(fine, estimate, samples)
