# this_file: src/reactpinn/autodiff.py
"""
Input derivatives of network outputs and parameter gradients of scalar losses.

Derivatives come from ``torch.autograd`` with ``create_graph=True``: the first
and pure second input derivatives stay on the graph, so a loss built from them
can be differentiated again with respect to every weight, activation shape
parameter and physical parameter.
"""

from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
import torch

from .errors import ConfigurationError, NumericError

ArrayLike = Union[torch.Tensor, np.ndarray, Sequence[float], Sequence[Sequence[float]]]


@dataclass(frozen=True)
class Jet:
    """
    Network output bundled with its input derivatives.

    ``value`` has shape ``(N,)``; ``d1`` and ``d2`` have shape ``(N, D)`` with
    one column per input coordinate (``d2`` holds pure second derivatives only).
    Derivative fields are ``None`` below the requested order.
    """

    value: torch.Tensor
    d1: Optional[torch.Tensor] = None
    d2: Optional[torch.Tensor] = None

    @property
    def order(self) -> int:
        if self.d2 is not None:
            return 2
        return 1 if self.d1 is not None else 0

    def __len__(self) -> int:
        return self.value.shape[0]


class GradientMap(Mapping):
    """Read-only mapping of parameter identifier to ``d loss / d parameter``."""

    def __init__(self, entries: "dict[str, torch.Tensor]") -> None:
        self._entries = dict(entries)

    def __getitem__(self, name: str) -> torch.Tensor:
        return self._entries[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self) -> str:
        return f"GradientMap({sorted(self._entries)})"


def as_points(points: ArrayLike, input_dim: int) -> torch.Tensor:
    """
    Convert points to a float64 ``(N, input_dim)`` tensor.

    A 1-D input of length ``input_dim`` is treated as a single point.

    Raises:
        ConfigurationError: If the trailing dimension does not match
    """
    tensor = torch.as_tensor(points, dtype=torch.float64)
    if tensor.ndim == 1:
        tensor = tensor.reshape(1, -1) if tensor.shape[0] == input_dim else tensor[:, None]
    if tensor.ndim != 2 or tensor.shape[1] != input_dim:
        raise ConfigurationError(
            f"Expected points with {input_dim} coordinates, got shape {tuple(tensor.shape)}"
        )
    return tensor


def evaluate_with_input_derivatives(
    network: torch.nn.Module,
    points: ArrayLike,
    order: int = 2,
) -> Jet:
    """
    Evaluate a scalar-output network and its input derivatives.

    Each output row depends only on its own input row, so the gradient of the
    summed output with respect to the inputs gives every per-point derivative
    in one backward pass.

    Args:
        network: Module mapping ``(N, D)`` inputs to ``(N, 1)`` outputs; must
            expose ``input_dim``
        points: One point or a batch of points
        order: 0 (value only), 1 (adds d1) or 2 (adds pure d2)

    Returns:
        Jet whose derivative tensors remain differentiable w.r.t. parameters

    Raises:
        ConfigurationError: On bad order, input width or output width
        NumericError: If any derivative is non-finite
    """
    if getattr(network, "output_dim", 1) != 1:
        raise ConfigurationError("Input derivatives are defined for scalar outputs only")
    x = as_points(points, network.input_dim)
    return jet_of(lambda z: network(z)[:, 0], x, order)


def jet_of(
    fn: Callable[[torch.Tensor], torch.Tensor], x: torch.Tensor, order: int = 2
) -> Jet:
    """
    Jet of any pointwise scalar function ``fn: (N, D) -> (N,)``.

    Used for networks and for closed-form solutions alike.
    """
    if order not in (0, 1, 2):
        raise ConfigurationError(f"Derivative order must be 0, 1 or 2, not {order}")
    if order == 0:
        return Jet(value=fn(x))

    x = x.detach().requires_grad_(True)
    u = fn(x)
    d1 = _grad_or_zeros(u.sum(), x)
    _check_finite(d1, "first input derivative")
    if order == 1:
        return Jet(value=u, d1=d1)

    columns = [_grad_or_zeros(d1[:, k].sum(), x)[:, k] for k in range(x.shape[1])]
    d2 = torch.stack(columns, dim=1)
    _check_finite(d2, "second input derivative")
    return Jet(value=u, d1=d1, d2=d2)


def gradient_of_scalar(
    loss: torch.Tensor,
    parameters: "Mapping[str, torch.Tensor]",
    retain_graph: bool = False,
) -> GradientMap:
    """
    Exact gradient of a scalar loss with respect to registered parameters.

    Parameters that do not influence the loss get a zero entry, so the result
    always has exactly one entry per registered parameter.

    Args:
        loss: Scalar tensor produced by a recorded computation
        parameters: Identifier to parameter tensor, e.g. ``network.trainable()``
        retain_graph: Keep the graph for a further backward pass

    Raises:
        ConfigurationError: If the loss is not a recorded scalar or a parameter
            is not trainable
        NumericError: If the loss is non-finite
    """
    if loss.numel() != 1:
        raise ConfigurationError(f"Loss must be a scalar, got shape {tuple(loss.shape)}")
    if not torch.isfinite(loss).all():
        raise NumericError(f"Loss is not finite: {loss.item()}")
    if loss.grad_fn is None:
        raise ConfigurationError("Loss was not recorded over any trainable parameter")

    names = list(parameters)
    tensors = [parameters[name] for name in names]
    for name, tensor in zip(names, tensors):
        if not tensor.requires_grad:
            raise ConfigurationError(f"Parameter {name!r} is not registered as trainable")

    grads = torch.autograd.grad(
        loss.reshape(()), tensors, retain_graph=retain_graph, allow_unused=True
    )
    return GradientMap(
        {
            name: torch.zeros_like(tensor) if grad is None else grad
            for name, tensor, grad in zip(names, tensors, grads)
        }
    )


def _grad_or_zeros(output: torch.Tensor, x: torch.Tensor) -> torch.Tensor:
    # Affine and ReLU networks leave derivatives that no longer depend on x.
    if not output.requires_grad:
        return torch.zeros_like(x)
    (grad,) = torch.autograd.grad(output, x, create_graph=True, allow_unused=True)
    return torch.zeros_like(x) if grad is None else grad


def _check_finite(tensor: torch.Tensor, what: str) -> None:
    finite = torch.isfinite(tensor)
    if not finite.all():
        index = int((~finite).nonzero()[0, 0])
        raise NumericError(f"Non-finite {what} at point {index}", index=index)
