"""Shared fixtures: canonical problems and cached reference solutions."""

from __future__ import annotations

import numpy as np
import pytest

from fracadapt import SpatialGrid1D
from fracadapt.experiments import build_example, reference_solution


@pytest.fixture(scope="session")
def ex1_alpha04():
    return build_example(1, 0.4)


@pytest.fixture(scope="session")
def ex1_ref_cache():
    """Memoised plain references (no node injection) keyed by example data."""
    cache: dict = {}

    def get(example_id: int, alpha: float, c1=None, scale=8, grid_n=None):
        key = (example_id, alpha, c1, scale, grid_n)
        if key not in cache:
            problem = build_example(example_id, alpha, c1=c1)
            grid = None
            if problem.spatial is not None:
                grid = SpatialGrid1D(problem.spatial.a, problem.spatial.b, grid_n)
            cache[key] = reference_solution(problem, scale, grid=grid)
        return cache[key]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
