# this_file: src/reactpinn/loss.py
"""
Physics, initial-condition, boundary-condition and data losses, and their
weighted sum. Every loss is a mean of squared pointwise terms computed over
the full batch and stays differentiable with respect to all parameters.
"""

from dataclasses import dataclass
from typing import Mapping, Optional, Tuple

import torch

from .autodiff import evaluate_with_input_derivatives
from .errors import ConfigurationError, NumericError
from .network import Network
from .problems import ProblemSpec, SampleSet, Targets, residual


@dataclass(frozen=True)
class LossWeights:
    """Weights of the physics, IC, BC and data terms."""

    lambda_p: float = 1.0
    lambda_I: float = 1.0
    lambda_B: float = 1.0
    lambda_d: float = 1.0

    def __post_init__(self) -> None:
        for name in ("lambda_p", "lambda_I", "lambda_B", "lambda_d"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be nonnegative")


@dataclass(frozen=True)
class LossBreakdown:
    """Per-component loss values of one evaluation; absent terms are 0."""

    phy: float = 0.0
    ic: float = 0.0
    bc: float = 0.0
    data: float = 0.0
    total: float = 0.0


def physics_loss(
    spec: ProblemSpec,
    network: Network,
    collocation,
    params: Optional[Mapping[str, torch.Tensor]] = None,
) -> torch.Tensor:
    """
    Mean squared residual over the collocation points.

    Physical parameters registered on the network (trainable in inverse runs)
    override the problem's constants unless ``params`` is given.

    Raises:
        ConfigurationError: If there are no collocation points
        NumericError: If a residual is non-finite; carries the point index
    """
    points = torch.as_tensor(collocation, dtype=torch.float64)
    if points.shape[0] == 0:
        raise ConfigurationError("Physics loss needs at least one collocation point")
    jet = evaluate_with_input_derivatives(network, points, order=2)
    physical = dict(network.physical.items()) if params is None else params
    r = residual(spec, points, jet, physical)
    _check_pointwise(r, "residual")
    return (r**2).mean()


def ic_loss(spec: ProblemSpec, network: Network, initial: Targets) -> torch.Tensor:
    """
    Mean squared mismatch against the initial condition.

    Problems that are second order in time also prescribe du/dt at t = 0; the
    mean squared velocity mismatch is then added.
    """
    points = _nonempty(initial, "initial")
    order = 1 if initial.velocity is not None else 0
    jet = evaluate_with_input_derivatives(network, points, order=order)
    error = jet.value - torch.as_tensor(initial.values, dtype=torch.float64)
    _check_pointwise(error, "initial-condition mismatch")
    loss = (error**2).mean()
    if initial.velocity is not None:
        t_column = spec.coords.index("t")
        velocity = jet.d1[:, t_column] - torch.as_tensor(initial.velocity, dtype=torch.float64)
        loss = loss + (velocity**2).mean()
    return loss


def bc_loss(network: Network, boundary: Targets) -> torch.Tensor:
    """
    Mean over time samples of the summed squared mismatch at both ends.

    Raises:
        ConfigurationError: If the set does not pair left and right points
    """
    points = _nonempty(boundary, "boundary")
    if points.shape[0] % 2:
        raise ConfigurationError("Boundary set must hold both ends for every time sample")
    prediction = network(points)[:, 0]
    error = prediction - torch.as_tensor(boundary.values, dtype=torch.float64)
    _check_pointwise(error, "boundary mismatch")
    left, right = error.reshape(2, -1)
    return (left**2 + right**2).mean()


def data_loss(network: Network, data: Targets) -> torch.Tensor:
    """Mean squared mismatch against supervised samples."""
    points = _nonempty(data, "data")
    error = network(points)[:, 0] - torch.as_tensor(data.values, dtype=torch.float64)
    _check_pointwise(error, "data mismatch")
    return (error**2).mean()


def total_loss(
    components: Mapping[str, Optional[torch.Tensor]],
    weights: LossWeights = LossWeights(),
) -> Tuple[torch.Tensor, LossBreakdown]:
    """
    Weighted sum of the components present in ``components``.

    Args:
        components: Any of ``phy``, ``ic``, ``bc``, ``data``; ``None`` or a
            missing key means the term is absent
        weights: Loss weights

    Returns:
        The differentiable total and the per-component values
    """
    scale = {
        "phy": weights.lambda_p,
        "ic": weights.lambda_I,
        "bc": weights.lambda_B,
        "data": weights.lambda_d,
    }
    unknown = set(components) - set(scale)
    if unknown:
        raise ConfigurationError(f"Unknown loss components: {sorted(unknown)}")
    present = {name: value for name, value in components.items() if value is not None}
    if not present:
        raise ConfigurationError("At least one loss component is required")
    total = sum(scale[name] * value for name, value in present.items())
    values = {name: float(value.detach()) for name, value in present.items()}
    return total, LossBreakdown(total=float(total.detach()), **values)


def compute_losses(
    spec: ProblemSpec,
    network: Network,
    samples: SampleSet,
    weights: LossWeights = LossWeights(),
) -> Tuple[torch.Tensor, LossBreakdown]:
    """
    Total loss of one training iteration.

    Terms are included when the sample set provides their points: forward runs
    carry collocation, initial and boundary sets; regression runs only data;
    inverse runs all four.
    """
    components = {}
    if spec.residual is not None:
        components["phy"] = physics_loss(spec, network, samples.collocation)
    if samples.initial is not None:
        components["ic"] = ic_loss(spec, network, samples.initial)
    if samples.boundary is not None:
        components["bc"] = bc_loss(network, samples.boundary)
    if samples.data is not None:
        components["data"] = data_loss(network, samples.data)
    return total_loss(components, weights)


def _nonempty(targets: Targets, what: str) -> torch.Tensor:
    points = torch.as_tensor(targets.points, dtype=torch.float64)
    if points.shape[0] == 0:
        raise ConfigurationError(f"Empty {what} set")
    return points


def _check_pointwise(values: torch.Tensor, what: str) -> None:
    finite = torch.isfinite(values)
    if not finite.all():
        index = int((~finite).nonzero()[0, 0])
        raise NumericError(f"Non-finite {what} at point {index}", index=index)
