# this_file: src/reactpinn/oracle/solvers.py
"""
Finite-difference reference solvers on uniform grids with Dirichlet ends.

- heat, diffusion: Crank-Nicolson
- burgers: Crank-Nicolson diffusion and advection with an extrapolated
  (explicit) advecting velocity
- allen_cahn: Crank-Nicolson diffusion with an explicit second-order
  Adams-Bashforth reaction term
- wave: explicit leapfrog under the CFL bound ``c*dt/dx <= 1``

Burgers and Allen-Cahn are integrated with internal substeps that are halved
until two successive solutions agree on the output grid.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
import torch
from scipy.interpolate import RegularGridInterpolator
from scipy.linalg import solve_banded

from ..errors import ConfigurationError, DomainRangeError, NumericError
from ..problems import ProblemSpec

logger = logging.getLogger(__name__)

FD_PROBLEMS = ("allen_cahn", "burgers", "diffusion", "heat", "wave")


@dataclass(frozen=True)
class FDGrid:
    """
    Solution values on a uniform space-time grid.

    ``values[i, n]`` is the solution at ``x[i]`` and ``t[n]``.
    """

    name: str
    x: np.ndarray
    t: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != (self.x.size, self.t.size):
            raise ConfigurationError(
                f"Grid values shape {self.values.shape} does not match "
                f"({self.x.size}, {self.t.size})"
            )
        if not np.isfinite(self.values).all():
            raise NumericError(f"{self.name} reference contains non-finite values")

    @property
    def nx(self) -> int:
        return self.x.size

    @property
    def nt(self) -> int:
        return self.t.size

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def x_range(self) -> Tuple[float, float]:
        return float(self.x[0]), float(self.x[-1])

    @property
    def t_range(self) -> Tuple[float, float]:
        return float(self.t[0]), float(self.t[-1])


def time_horizon(spec: ProblemSpec) -> Tuple[float, float]:
    """Interval covering both the training and the test time ranges."""
    t0 = min(spec.train_domain.t_range[0], spec.test_domain.t_range[0])
    t1 = max(spec.train_domain.t_range[1], spec.test_domain.t_range[1])
    return t0, t1


def fd_solve(
    spec: ProblemSpec,
    nx: int,
    nt: int,
    tol: float = 1e-4,
    max_refinements: int = 10,
) -> FDGrid:
    """
    Solve ``spec`` on an ``nx`` by ``nt`` grid over the problem's space range
    and its full time horizon.

    Args:
        spec: One of heat, diffusion, burgers, allen_cahn, wave
        nx: Number of space nodes, ends included
        nt: Number of output time levels, ends included
        tol: Max-norm agreement required between successive dt refinements
            (Burgers and Allen-Cahn only)
        max_refinements: Number of halvings tried before giving up

    Raises:
        ConfigurationError: On unsupported problems, too small grids or a
            violated stability bound
        NumericError: If the refinement does not converge
    """
    if spec.name not in FD_PROBLEMS:
        raise ConfigurationError(f"No finite-difference solver for {spec.name}")
    if nx < 3 or nt < 2:
        raise ConfigurationError(f"Grid too small: nx={nx}, nt={nt}")

    x = np.linspace(*spec.train_domain.x_range, nx)
    t = np.linspace(*time_horizon(spec), nt)
    left = _call(spec.bc[0], t)
    right = _call(spec.bc[1], t)
    u0 = _call(spec.ic, x).copy()
    u0[0], u0[-1] = left[0], right[0]
    params = spec.physical_params

    if spec.name in ("heat", "diffusion"):
        kappa = params.get("alpha", 1.0)
        source = _diffusion_source if spec.name == "diffusion" else None
        values = _crank_nicolson(x, t, u0, left, right, kappa, source)
    elif spec.name == "wave":
        values = _leapfrog(x, t, u0, _call(spec.ic_velocity, x), left, right, params["c"])
    else:
        values = _refine(spec, x, t, u0, left, right, tol, max_refinements)
    return FDGrid(name=spec.name, x=x, t=t, values=values)


def interpolate(grid: FDGrid, points) -> np.ndarray:
    """
    Bilinear interpolation of ``grid`` at ``(x, t)`` points.

    Raises:
        DomainRangeError: If any point lies outside the grid
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    (x_lo, x_hi), (t_lo, t_hi) = grid.x_range, grid.t_range
    outside = (
        (pts[:, 0] < x_lo) | (pts[:, 0] > x_hi) | (pts[:, 1] < t_lo) | (pts[:, 1] > t_hi)
    )
    if outside.any():
        index = int(np.flatnonzero(outside)[0])
        raise DomainRangeError(
            f"Point {tuple(pts[index])} is outside the {grid.name} grid "
            f"x in {grid.x_range}, t in {grid.t_range}"
        )
    interpolator = RegularGridInterpolator((grid.x, grid.t), grid.values, method="linear")
    return interpolator(pts)


# --- schemes --------------------------------------------------------------


def _diffusion_source(x: np.ndarray, t: float) -> np.ndarray:
    return np.exp(-t) * (np.pi**2 - 1.0) * np.sin(np.pi * x)


def _crank_nicolson(
    x: np.ndarray,
    t: np.ndarray,
    u0: np.ndarray,
    left: np.ndarray,
    right: np.ndarray,
    kappa: float,
    source: Optional[Callable[[np.ndarray, float], np.ndarray]],
) -> np.ndarray:
    dx = x[1] - x[0]
    dt = t[1] - t[0]
    r = kappa * dt / dx**2
    m = x.size - 2
    ab = _tridiagonal(np.full(m, -r / 2), np.full(m, 1.0 + r), np.full(m, -r / 2))
    interior = x[1:-1]

    values = np.empty((x.size, t.size))
    values[:, 0] = u0
    u = values[:, 0].copy()
    for n in range(t.size - 1):
        rhs = u[1:-1] + (r / 2) * (u[:-2] - 2.0 * u[1:-1] + u[2:])
        rhs[0] += (r / 2) * left[n + 1]
        rhs[-1] += (r / 2) * right[n + 1]
        if source is not None:
            rhs += (dt / 2) * (source(interior, t[n]) + source(interior, t[n + 1]))
        u = np.concatenate(([left[n + 1]], solve_banded((1, 1), ab, rhs), [right[n + 1]]))
        values[:, n + 1] = u
    return values


def _leapfrog(
    x: np.ndarray,
    t: np.ndarray,
    u0: np.ndarray,
    v0: np.ndarray,
    left: np.ndarray,
    right: np.ndarray,
    c: float,
) -> np.ndarray:
    dx = x[1] - x[0]
    dt = t[1] - t[0]
    courant = c * dt / dx
    if courant > 1.0:
        raise ConfigurationError(
            f"Leapfrog CFL violated: c*dt/dx = {courant:.4f} > 1 (nx={x.size}, nt={t.size})"
        )
    c2 = courant**2
    values = np.empty((x.size, t.size))
    values[:, 0] = u0

    prev = values[:, 0]
    curr = prev.copy()
    curr[1:-1] = prev[1:-1] + dt * v0[1:-1] + 0.5 * c2 * _laplacian(prev)
    curr[0], curr[-1] = left[1], right[1]
    values[:, 1] = curr
    for n in range(1, t.size - 1):
        nxt = np.empty_like(curr)
        nxt[1:-1] = 2.0 * curr[1:-1] - prev[1:-1] + c2 * _laplacian(curr)
        nxt[0], nxt[-1] = left[n + 1], right[n + 1]
        values[:, n + 1] = nxt
        prev, curr = curr, nxt
    return values


def _refine(
    spec: ProblemSpec,
    x: np.ndarray,
    t: np.ndarray,
    u0: np.ndarray,
    left: np.ndarray,
    right: np.ndarray,
    tol: float,
    max_refinements: int,
) -> np.ndarray:
    dx = x[1] - x[0]
    interval = t[1] - t[0]
    substeps = _stable_substeps(spec, u0, dx, interval)
    integrate = _burgers if spec.name == "burgers" else _allen_cahn

    previous = integrate(spec, x, t, u0, left, right, substeps)
    for _ in range(max_refinements):
        substeps *= 2
        current = integrate(spec, x, t, u0, left, right, substeps)
        change = float(np.max(np.abs(current - previous)))
        logger.debug(
            "%s reference: %d substeps per level, max change %.3e",
            spec.name,
            substeps,
            change,
        )
        if change <= tol:
            return current
        previous = current
    raise NumericError(
        f"{spec.name} reference did not converge to {tol:g} after "
        f"{max_refinements} dt refinements (last change {change:.3e})"
    )


def _stable_substeps(spec: ProblemSpec, u0: np.ndarray, dx: float, interval: float) -> int:
    """Smallest power-of-two substep count meeting the explicit-term bound."""
    if spec.name == "burgers":
        # Maximum principle: |u| never exceeds its initial and boundary maximum.
        limit = dx / max(float(np.max(np.abs(u0))), 1e-12)
    else:
        # 5 * max |1 - 3u^2| on [-1, 1].
        limit = 1.0 / 10.0
    substeps = 1
    while interval / substeps > limit:
        substeps *= 2
    return substeps


def _burgers(spec, x, t, u0, left, right, substeps) -> np.ndarray:
    nu = spec.physical_params["nu"]
    dx = x[1] - x[0]
    dt = (t[1] - t[0]) / substeps
    diff = nu / dx**2
    values = np.empty((x.size, t.size))
    values[:, 0] = u0
    u = u0.copy()
    u_old = u0.copy()
    for n in range(t.size - 1):
        for k in range(substeps):
            first = n == 0 and k == 0
            w = u[1:-1] if first else 1.5 * u[1:-1] - 0.5 * u_old[1:-1]
            lower = w / (2 * dx) + diff
            upper = -w / (2 * dx) + diff
            centre = np.full_like(w, -2.0 * diff)
            explicit = lower * u[:-2] + centre * u[1:-1] + upper * u[2:]
            theta = n + (k + 1) / substeps
            bl = np.interp(theta, np.arange(t.size), left)
            br = np.interp(theta, np.arange(t.size), right)
            rhs = u[1:-1] + 0.5 * dt * explicit
            rhs[0] += 0.5 * dt * lower[0] * bl
            rhs[-1] += 0.5 * dt * upper[-1] * br
            ab = _tridiagonal(-0.5 * dt * lower, 1.0 - 0.5 * dt * centre, -0.5 * dt * upper)
            u_old = u
            u = np.concatenate(([bl], solve_banded((1, 1), ab, rhs), [br]))
        values[:, n + 1] = u
    return values


def _allen_cahn(spec, x, t, u0, left, right, substeps) -> np.ndarray:
    d = spec.physical_params["d"]
    dx = x[1] - x[0]
    dt = (t[1] - t[0]) / substeps
    r = d * dt / dx**2
    m = x.size - 2
    ab = _tridiagonal(np.full(m, -r / 2), np.full(m, 1.0 + r), np.full(m, -r / 2))

    def reaction(v):
        return 5.0 * (v - v**3)

    values = np.empty((x.size, t.size))
    values[:, 0] = u0
    u = u0.copy()
    f_old = None
    for n in range(t.size - 1):
        for k in range(substeps):
            theta = n + (k + 1) / substeps
            bl = np.interp(theta, np.arange(t.size), left)
            br = np.interp(theta, np.arange(t.size), right)
            f_now = reaction(u[1:-1])
            forcing = f_now if f_old is None else 1.5 * f_now - 0.5 * f_old
            rhs = u[1:-1] + (r / 2) * (u[:-2] - 2.0 * u[1:-1] + u[2:]) + dt * forcing
            rhs[0] += (r / 2) * bl
            rhs[-1] += (r / 2) * br
            f_old = f_now
            u = np.concatenate(([bl], solve_banded((1, 1), ab, rhs), [br]))
        values[:, n + 1] = u
    return values


def _tridiagonal(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Banded storage for ``solve_banded((1, 1), ...)`` of a tridiagonal matrix."""
    ab = np.zeros((3, diag.size))
    ab[0, 1:] = upper[:-1]
    ab[1] = diag
    ab[2, :-1] = lower[1:]
    return ab


def _laplacian(u: np.ndarray) -> np.ndarray:
    return u[:-2] - 2.0 * u[1:-1] + u[2:]


def _call(fn, values: np.ndarray) -> np.ndarray:
    with torch.no_grad():
        return fn(torch.as_tensor(values, dtype=torch.float64)).numpy()
