# this_file: src/reactpinn/network.py
"""
Fully connected network with one activation kind on every hidden layer and a
linear output layer. Weights, activation shape parameters and optional
physical parameters all live on the module, so ``named_parameters`` gives the
stable identifiers used in gradient maps and optimizer state.
"""

import math
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple, Union

import numpy as np
import torch
from torch import nn

from .activation import ActivationKind, ActivationParams, init_activation, make_activation
from .autodiff import ArrayLike, as_points
from .errors import ConfigurationError, NumericError


@dataclass(frozen=True)
class NetworkConfig:
    """
    Shape and seed of a network.

    Args:
        input_dim: Number of input coordinates
        hidden: Hidden-layer widths, e.g. ``(32, 32, 32)`` for "32 x 3"
        output_dim: Number of outputs
        activation: Activation kind used on every hidden layer
        seed: Seed for weight initialization
    """

    input_dim: int
    hidden: Tuple[int, ...]
    output_dim: int = 1
    activation: ActivationKind = ActivationKind.TANH
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "hidden", tuple(int(w) for w in self.hidden))
        object.__setattr__(self, "activation", ActivationKind.parse(self.activation))
        if not self.hidden:
            raise ConfigurationError("A network needs at least one hidden layer")
        widths = (self.input_dim, *self.hidden, self.output_dim)
        if any(width <= 0 for width in widths):
            raise ConfigurationError(f"Zero-width layer in {widths}")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError(f"Seed must fit in 64 unsigned bits, got {self.seed}")

    @property
    def widths(self) -> Tuple[int, ...]:
        return (self.input_dim, *self.hidden, self.output_dim)


def count_weights(cfg: NetworkConfig) -> int:
    """Number of weights and biases (activation parameters excluded)."""
    widths = cfg.widths
    return sum(n_in * n_out + n_out for n_in, n_out in zip(widths[:-1], widths[1:]))


class Network(nn.Module):
    """
    MLP holding every optimizable symbol of a run.

    Parameter identifiers look like ``layers.0.weight``, ``activations.1.a``
    and ``physical.alpha``.
    """

    def __init__(self, cfg: NetworkConfig) -> None:
        super().__init__()
        self.config = cfg
        self.input_dim = cfg.input_dim
        self.output_dim = cfg.output_dim
        widths = cfg.widths
        self.layers = nn.ModuleList(
            nn.Linear(n_in, n_out, dtype=torch.float64)
            for n_in, n_out in zip(widths[:-1], widths[1:])
        )
        self.activations = nn.ModuleList(
            make_activation(cfg.activation, init_activation(cfg.activation))
            for _ in cfg.hidden
        )
        self.physical = nn.ParameterDict()

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        h = x
        for index, (layer, activation) in enumerate(zip(self.layers, self.activations)):
            h = activation(layer(h))
            if not torch.isfinite(h).all():
                raise NumericError(
                    f"Non-finite activation output in hidden layer {index}", layer=index
                )
        out = self.layers[-1](h)
        if not torch.isfinite(out).all():
            raise NumericError("Non-finite network output", layer=len(self.activations))
        return out

    def trainable(self) -> Dict[str, nn.Parameter]:
        """Identifier to parameter, for every parameter that requires grad."""
        return {
            name: param for name, param in self.named_parameters() if param.requires_grad
        }

    def add_physical_param(self, name: str, value: float, trainable: bool = True) -> None:
        """Register a physical constant such as ``alpha`` or ``c``."""
        self.physical[name] = nn.Parameter(
            torch.tensor(float(value), dtype=torch.float64), requires_grad=trainable
        )

    def physical_values(self) -> Dict[str, float]:
        return {name: float(param) for name, param in self.physical.items()}

    def activation_params(self) -> "list[ActivationParams]":
        """Current shape parameters of every hidden layer."""
        return [activation.snapshot() for activation in self.activations]


def build_network(cfg: NetworkConfig) -> Network:
    """
    Build a network with Glorot-uniform weights and zero biases.

    The same config (and seed) always yields bit-identical parameters.

    Raises:
        ConfigurationError: On a zero-width layer or empty hidden list
    """
    network = Network(cfg)
    generator = torch.Generator().manual_seed(cfg.seed)
    with torch.no_grad():
        for layer in network.layers:
            fan_out, fan_in = layer.weight.shape
            bound = math.sqrt(6.0 / (fan_in + fan_out))
            layer.weight.uniform_(-bound, bound, generator=generator)
            layer.bias.zero_()
    return network


def forward(
    network: Network, points: Union[ArrayLike, Sequence[float], np.ndarray]
) -> torch.Tensor:
    """Network output for one point or a batch, as an ``(N,)`` tensor."""
    return network(as_points(points, network.input_dim))[:, 0]

