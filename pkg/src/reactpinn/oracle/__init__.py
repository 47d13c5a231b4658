# this_file: src/reactpinn/oracle/__init__.py
"""Reference solutions: closed forms where known, finite differences otherwise."""

from typing import Optional

import numpy as np

from ..errors import ConfigurationError
from ..problems import ProblemSpec, analytic_solution
from .cache import ReferenceCache, cached_fd_solve, default_cache_dir
from .solvers import FD_PROBLEMS, FDGrid, fd_solve, interpolate, time_horizon

__all__ = [
    "FD_PROBLEMS",
    "FDGrid",
    "ReferenceCache",
    "cached_fd_solve",
    "default_cache_dir",
    "fd_solve",
    "interpolate",
    "reference_resolution",
    "reference_values",
    "time_horizon",
]

REFINEMENT = 4


def reference_resolution(spec: ProblemSpec, factor: int = REFINEMENT):
    """
    FD grid size at least ``factor`` times finer than the test grid on each
    axis, with the test nodes falling on FD nodes.
    """
    test = spec.test_domain
    nx = factor * (test.n_space - 1) + 1
    t0, t1 = time_horizon(spec)
    test_dt = (test.t_range[1] - test.t_range[0]) / (test.n_time - 1)
    intervals = int(round((t1 - t0) / test_dt))
    nt = factor * intervals + 1
    return nx, nt


def reference_values(
    spec: ProblemSpec, points, cache: Optional[ReferenceCache] = None
) -> np.ndarray:
    """
    Ground-truth values at ``points``.

    Uses the closed form when the problem has one, the regression target for
    f1-f3, and an interpolated FD reference otherwise.
    """
    exact = analytic_solution(spec, points)
    if exact is not None:
        return exact
    if spec.name not in FD_PROBLEMS:
        raise ConfigurationError(f"No reference available for {spec.name}")
    nx, nt = reference_resolution(spec)
    grid = cached_fd_solve(spec, nx, nt, cache)
    return interpolate(grid, points)
