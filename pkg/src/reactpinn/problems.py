# this_file: src/reactpinn/problems.py
"""
Problem definitions: the five forward IBVPs, the wave problem, the three
regression targets, their inverse variants and the sampling plans used to
train and test on them.

Point arrays are float64 with one column per coordinate, in the order given by
``ProblemSpec.coords`` (``("x", "t")`` for PDEs, ``("t",)`` for the vibration
ODE, ``("x",)`` for regression).
"""

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Tuple, Union

import numpy as np
import torch

from .autodiff import Jet, jet_of
from .errors import ConfigurationError

logger = logging.getLogger(__name__)

Params = Mapping[str, Union[float, torch.Tensor]]
PointFn = Callable[[torch.Tensor, Params], torch.Tensor]

PI = math.pi


@dataclass(frozen=True)
class Domain:
    """
    Axis-aligned sampling domain.

    Args:
        x_range: Spatial interval, absent for the vibration ODE
        t_range: Time interval, absent for regression targets
        n_space: Number of grid points along x
        n_time: Number of grid points along t
    """

    x_range: Optional[Tuple[float, float]] = None
    t_range: Optional[Tuple[float, float]] = None
    n_space: Optional[int] = None
    n_time: Optional[int] = None

    def __post_init__(self) -> None:
        if self.x_range is None and self.t_range is None:
            raise ConfigurationError("A domain needs at least one axis")
        for rng, count, axis in (
            (self.x_range, self.n_space, "x"),
            (self.t_range, self.n_time, "t"),
        ):
            if rng is None:
                continue
            if not rng[0] < rng[1]:
                raise ConfigurationError(f"Empty {axis} range {rng}")
            if count is None or count < 1:
                raise ConfigurationError(f"{axis} axis needs a positive point count")

    @property
    def axes(self) -> "list[Tuple[float, float, int]]":
        """(lo, hi, count) per present axis, x before t."""
        axes = []
        if self.x_range is not None:
            axes.append((*self.x_range, self.n_space))
        if self.t_range is not None:
            axes.append((*self.t_range, self.n_time))
        return axes

    @property
    def size(self) -> int:
        return int(np.prod([count for _, _, count in self.axes]))


@dataclass(frozen=True)
class Targets:
    """Points with target values; ``velocity`` holds du/dt targets if any."""

    points: np.ndarray
    values: np.ndarray
    velocity: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class SampleSet:
    """
    Training or test points.

    ``boundary`` stores every left-boundary point first and then the matching
    right-boundary points in the same time order.
    """

    collocation: np.ndarray
    initial: Optional[Targets] = None
    boundary: Optional[Targets] = None
    data: Optional[Targets] = None


@dataclass(frozen=True)
class NoiseModel:
    """Gaussian measurement noise for inverse problems."""

    sigma: float = 0.1
    n_data: int = 5000
    n_points: int = 10000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sigma < 0:
            raise ConfigurationError(f"Noise sigma must be nonnegative, got {self.sigma}")
        if not 0 < self.n_data <= self.n_points:
            raise ConfigurationError(
                f"Need 0 < n_data <= n_points, got {self.n_data} and {self.n_points}"
            )


@dataclass(frozen=True)
class ProblemSpec:
    """
    One IBVP, ODE or regression task.

    ``residual`` receives named partial derivatives (``u``, ``u_x``, ``u_t``,
    ``u_xx``, ``u_tt``), the point columns by name and the physical
    parameters. ``trainable`` names the physical parameters estimated in
    inverse runs.
    """

    name: str
    coords: Tuple[str, ...]
    train_domain: Domain
    test_domain: Domain
    residual: Optional[Callable[..., torch.Tensor]] = None
    ic: Optional[Callable[[torch.Tensor], torch.Tensor]] = None
    ic_velocity: Optional[Callable[[torch.Tensor], torch.Tensor]] = None
    bc: Optional[Tuple[Callable, Callable]] = None
    physical_params: Mapping[str, float] = field(default_factory=dict)
    trainable: Tuple[str, ...] = ()
    analytic: Optional[PointFn] = None
    target: Optional[Callable[[torch.Tensor], torch.Tensor]] = None
    reference: str = "analytic"

    @property
    def is_regression(self) -> bool:
        return self.target is not None

    @property
    def is_inverse(self) -> bool:
        return bool(self.trainable)

    @property
    def input_dim(self) -> int:
        return len(self.coords)


# --- equations ------------------------------------------------------------


def _heat(d, cols, p):
    return d["u_t"] - p["alpha"] * d["u_xx"]


def _diffusion(d, cols, p):
    x, t = cols["x"], cols["t"]
    source = torch.exp(-t) * (PI**2 - 1.0) * torch.sin(PI * x)
    return d["u_t"] - d["u_xx"] - source


def _burgers(d, cols, p):
    return d["u_t"] + d["u"] * d["u_x"] - p["nu"] * d["u_xx"]


def _allen_cahn(d, cols, p):
    u = d["u"]
    return d["u_t"] - p["d"] * d["u_xx"] - 5.0 * (u - u**3)


def _vibration(d, cols, p):
    zeta, omega = p["zeta"], p["omega_n"]
    return d["u_tt"] + 2.0 * zeta * omega * d["u_t"] + omega**2 * d["u"]


def _wave(d, cols, p):
    return d["u_tt"] - p["c"] ** 2 * d["u_xx"]


def _heat_exact(z, p):
    x, t = z[:, 0], z[:, 1]
    return torch.sin(PI * x) * torch.exp(-p["alpha"] * PI**2 * t)


def _diffusion_exact(z, p):
    return torch.exp(-z[:, 1]) * torch.sin(PI * z[:, 0])


def _vibration_exact(z, p):
    t = z[:, 0]
    zeta, omega = float(p["zeta"]), float(p["omega_n"])
    omega_d = omega * math.sqrt(1.0 - zeta**2)
    decay = torch.exp(-zeta * omega * t)
    return decay * (torch.cos(omega_d * t) + zeta * omega / omega_d * torch.sin(omega_d * t))


def _wave_exact(z, p):
    x, t = z[:, 0], z[:, 1]
    return torch.sin(PI * x / 2.0) * torch.cos(PI * p["c"] * t / 2.0)


def _f1(x):
    return x**2 * torch.sin(2.0 * x)


def _f2(x):
    return (x**3 - x) / 7.0 * torch.sin(7.0 * x) + torch.sin(12.0 * x)


def _f3(x):
    return torch.sin(2.0 * x + PI / 3.0) * torch.sin(4.0 * x + PI / 6.0)


def _zero(t):
    return torch.zeros_like(t)


def _minus_one(t):
    return -torch.ones_like(t)


def _regression(name: str, target, lo: float, hi: float) -> ProblemSpec:
    return ProblemSpec(
        name=name,
        coords=("x",),
        train_domain=Domain(x_range=(lo, hi), n_space=1000),
        test_domain=Domain(x_range=(lo, hi), n_space=1000),
        target=target,
        analytic=lambda z, p: target(z[:, 0]),
    )


PROBLEMS: Dict[str, ProblemSpec] = {
    "allen_cahn": ProblemSpec(
        name="allen_cahn",
        coords=("x", "t"),
        train_domain=Domain((-1.0, 1.0), (0.0, 1.0), 100, 100),
        test_domain=Domain((-1.0, 1.0), (0.0, 1.0), 1000, 1000),
        residual=_allen_cahn,
        ic=lambda x: x**2 * torch.cos(PI * x),
        bc=(_minus_one, _minus_one),
        physical_params={"d": 0.001},
        reference="fd",
    ),
    "burgers": ProblemSpec(
        name="burgers",
        coords=("x", "t"),
        train_domain=Domain((-1.0, 1.0), (0.0, 0.8), 256, 100),
        test_domain=Domain((-1.0, 1.0), (0.8, 1.0), 256, 21),
        residual=_burgers,
        ic=lambda x: -torch.sin(PI * x),
        bc=(_zero, _zero),
        physical_params={"nu": 0.01 / PI},
        reference="fd",
    ),
    "diffusion": ProblemSpec(
        name="diffusion",
        coords=("x", "t"),
        train_domain=Domain((-1.0, 1.0), (0.0, 0.8), 100, 100),
        test_domain=Domain((-1.0, 1.0), (0.8, 1.0), 100, 21),
        residual=_diffusion,
        ic=lambda x: torch.sin(PI * x),
        bc=(_zero, _zero),
        analytic=_diffusion_exact,
    ),
    "heat": ProblemSpec(
        name="heat",
        coords=("x", "t"),
        train_domain=Domain((0.0, 1.0), (0.0, 0.8), 100, 100),
        test_domain=Domain((0.0, 1.0), (0.8, 1.0), 100, 21),
        residual=_heat,
        ic=lambda x: torch.sin(PI * x),
        bc=(_zero, _zero),
        physical_params={"alpha": 0.4},
        analytic=_heat_exact,
    ),
    "vibration": ProblemSpec(
        name="vibration",
        coords=("t",),
        train_domain=Domain(t_range=(0.0, 1.0), n_time=1000),
        test_domain=Domain(t_range=(0.0, 1.0), n_time=10000),
        residual=_vibration,
        ic=lambda t: torch.ones_like(t),
        ic_velocity=_zero,
        physical_params={"zeta": 0.5, "omega_n": 3.0},
        analytic=_vibration_exact,
    ),
    "wave": ProblemSpec(
        name="wave",
        coords=("x", "t"),
        train_domain=Domain((0.0, 2.0), (0.0, 1.0), 100, 100),
        test_domain=Domain((0.0, 2.0), (0.0, 1.0), 100, 100),
        residual=_wave,
        ic=lambda x: torch.sin(PI * x / 2.0),
        ic_velocity=_zero,
        bc=(_zero, _zero),
        physical_params={"c": 2.0},
        analytic=_wave_exact,
    ),
    "f1": _regression("f1", _f1, -PI, PI),
    "f2": _regression("f2", _f2, -PI, PI),
    "f3": _regression("f3", _f3, 0.0, 2.0 * PI),
}

FORWARD_PROBLEMS = ("allen_cahn", "burgers", "diffusion", "heat", "vibration", "wave")
REGRESSION_PROBLEMS = ("f1", "f2", "f3")
INVERSE_PROBLEMS = {"heat": "alpha", "wave": "c"}


def get_problem(name: str) -> ProblemSpec:
    """
    Look up a registered problem by name.

    Raises:
        ConfigurationError: If the name is unknown
    """
    try:
        return PROBLEMS[name]
    except KeyError:
        choices = ", ".join(PROBLEMS)
        raise ConfigurationError(
            f"Unknown problem {name!r}; expected one of: {choices}"
        ) from None


def inverse_problem(name: str) -> ProblemSpec:
    """
    Inverse variant of ``heat`` or ``wave``: the diffusivity or wave velocity
    becomes trainable and the 100 x 100 grid covers the whole time interval.
    """
    if name not in INVERSE_PROBLEMS:
        raise ConfigurationError(
            f"No inverse variant for {name!r}; expected one of: {', '.join(INVERSE_PROBLEMS)}"
        )
    spec = get_problem(name)
    domain = spec.train_domain
    full = Domain(domain.x_range, (spec.train_domain.t_range[0], 1.0), 100, 100)
    return dataclasses.replace(
        spec, train_domain=full, test_domain=full, trainable=(INVERSE_PROBLEMS[name],)
    )


# --- operations -----------------------------------------------------------


def residual(
    spec: ProblemSpec, points: torch.Tensor, jet: Jet, params: Optional[Params] = None
) -> torch.Tensor:
    """
    Signed residual of the governing equation at each point.

    Args:
        spec: Problem with a residual operator
        points: ``(N, D)`` points the jet was evaluated at
        jet: Network (or exact) jet of order 2
        params: Physical parameters; defaults to ``spec.physical_params``

    Raises:
        ConfigurationError: If the problem has no residual or the jet order is
            too low
    """
    if spec.residual is None:
        raise ConfigurationError(f"{spec.name} has no residual operator")
    if jet.order < 2:
        raise ConfigurationError(
            f"{spec.name} residual needs second derivatives, jet has order {jet.order}"
        )
    points = torch.as_tensor(points, dtype=torch.float64)
    derivatives = {"u": jet.value}
    for index, coord in enumerate(spec.coords):
        derivatives[f"u_{coord}"] = jet.d1[:, index]
        derivatives[f"u_{coord}{coord}"] = jet.d2[:, index]
    columns = {coord: points[:, index] for index, coord in enumerate(spec.coords)}
    merged = {**spec.physical_params, **(params or {})}
    return spec.residual(derivatives, columns, merged)


def sample_grid(domain: Domain, spec: Optional[ProblemSpec] = None) -> SampleSet:
    """
    Uniform tensor-product grid with endpoints included.

    Points are ordered with x varying slowest. The initial slice is the
    ``t = t_lo`` row and the boundary slices are ``x = lo`` and ``x = hi`` at
    every time sample. When ``spec`` is given, initial and boundary targets are
    filled from its conditions.
    """
    axes = [np.linspace(lo, hi, count) for lo, hi, count in domain.axes]
    mesh = np.meshgrid(*axes, indexing="ij")
    collocation = np.stack([m.ravel() for m in mesh], axis=1)
    if spec is None or spec.is_regression:
        data = None
        if spec is not None:
            data = Targets(collocation, _evaluate(spec.target, collocation[:, 0]))
        return SampleSet(collocation=collocation, data=data)

    initial = _initial_targets(spec, domain, axes)
    boundary = _boundary_targets(spec, domain, axes)
    return SampleSet(collocation=collocation, initial=initial, boundary=boundary)


def make_test_set(spec: ProblemSpec) -> SampleSet:
    """
    Test points: a 10x finer grid for Allen-Cahn and vibration, the held-out
    time band at training resolution for Burgers, diffusion and heat.
    """
    return sample_grid(spec.test_domain)


def analytic_solution(
    spec: ProblemSpec, points, params: Optional[Params] = None
) -> Optional[np.ndarray]:
    """Closed-form solution values, or ``None`` when only an FD reference exists."""
    if spec.analytic is None:
        return None
    z = torch.as_tensor(np.asarray(points, dtype=np.float64).reshape(-1, spec.input_dim))
    merged = {**spec.physical_params, **(params or {})}
    with torch.no_grad():
        return spec.analytic(z, merged).numpy()


def analytic_jet(spec: ProblemSpec, points, params: Optional[Params] = None) -> Jet:
    """Exact jet of the closed-form solution, differentiated through torch."""
    if spec.analytic is None:
        raise ConfigurationError(f"{spec.name} has no closed-form solution")
    z = torch.as_tensor(np.asarray(points, dtype=np.float64).reshape(-1, spec.input_dim))
    merged = {**spec.physical_params, **(params or {})}
    return jet_of(lambda y: spec.analytic(y, merged), z, order=2)


def regression_target(name: str, x):
    """Value of f1, f2 or f3 at ``x`` (scalar or array)."""
    spec = get_problem(name)
    if not spec.is_regression:
        raise ConfigurationError(f"{name} is not a regression target")
    values = _evaluate(spec.target, np.asarray(x, dtype=np.float64))
    return float(values) if np.ndim(x) == 0 else values


def make_noisy_data(spec: ProblemSpec, noise: NoiseModel) -> Targets:
    """
    Noisy supervised samples for inverse runs.

    Draws ``noise.n_points`` uniform points in the training domain, keeps the
    first ``noise.n_data`` after a shuffle and adds N(0, sigma^2) noise to the
    exact solution there. Everything comes from one seeded generator.
    """
    if spec.analytic is None:
        raise ConfigurationError(f"{spec.name} has no closed-form solution to sample")
    rng = np.random.default_rng(noise.seed)
    lows = [lo for lo, _, _ in spec.train_domain.axes]
    highs = [hi for _, hi, _ in spec.train_domain.axes]
    points = rng.uniform(lows, highs, size=(noise.n_points, len(lows)))
    chosen = points[rng.permutation(noise.n_points)[: noise.n_data]]
    clean = analytic_solution(spec, chosen)
    values = clean + rng.normal(0.0, noise.sigma, size=clean.shape)
    logger.debug(
        "Sampled %d noisy points (sigma=%g) for %s", noise.n_data, noise.sigma, spec.name
    )
    return Targets(points=chosen, values=values)


def init_physical_param(seed: int) -> float:
    """Initial guess for an unknown physical constant, drawn from U[0.2, 2.5]."""
    return float(np.random.default_rng(seed).uniform(0.2, 2.5))


def _evaluate(fn: Callable[[torch.Tensor], torch.Tensor], values: np.ndarray) -> np.ndarray:
    with torch.no_grad():
        return fn(torch.as_tensor(values, dtype=torch.float64)).numpy()


def _initial_targets(spec: ProblemSpec, domain: Domain, axes) -> Optional[Targets]:
    if spec.ic is None:
        return None
    t0 = domain.t_range[0]
    if spec.coords == ("t",):
        points = np.array([[t0]])
        values = _evaluate(spec.ic, points[:, 0])
    else:
        xs = axes[0]
        points = np.stack([xs, np.full_like(xs, t0)], axis=1)
        values = _evaluate(spec.ic, xs)
    velocity = None
    if spec.ic_velocity is not None:
        velocity = _evaluate(spec.ic_velocity, points[:, 0])
    return Targets(points=points, values=values, velocity=velocity)


def _boundary_targets(spec: ProblemSpec, domain: Domain, axes) -> Optional[Targets]:
    if spec.bc is None:
        return None
    ts = axes[-1]
    lo, hi = domain.x_range
    left = np.stack([np.full_like(ts, lo), ts], axis=1)
    right = np.stack([np.full_like(ts, hi), ts], axis=1)
    values = np.concatenate([_evaluate(spec.bc[0], ts), _evaluate(spec.bc[1], ts)])
    return Targets(points=np.concatenate([left, right]), values=values)
