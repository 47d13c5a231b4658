# this_file: src/reactpinn/optim.py
"""
Adam and RMSprop steps driven by an explicit gradient map.

The update rules are those of ``torch.optim.Adam`` (bias-corrected moments)
and ``torch.optim.RMSprop`` (uncentered, no momentum); this module adds the
gradient-map plumbing, per-parameter finiteness checks and a step counter.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Mapping, Union

import torch

from .autodiff import GradientMap
from .errors import ConfigurationError, NumericError


class OptimizerKind(str, Enum):
    ADAM = "adam"
    RMSPROP = "rmsprop"

    @classmethod
    def parse(cls, name: Union[str, "OptimizerKind"]) -> "OptimizerKind":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ConfigurationError(
                f"Unknown optimizer {name!r}; expected adam or rmsprop"
            ) from None


ADAM_DEFAULTS = {"betas": (0.9, 0.999), "eps": 1e-8}
RMSPROP_DEFAULTS = {"alpha": 0.99, "eps": 1e-8}


@dataclass
class OptimizerState:
    """
    Optimizer bound to a fixed, named set of parameters.

    Moment accumulators live inside ``optimizer`` keyed by the same tensors
    as ``parameters``; ``step_count`` grows by one per applied step.
    """

    kind: OptimizerKind
    lr: float
    parameters: Dict[str, torch.nn.Parameter]
    optimizer: torch.optim.Optimizer
    hyper: Dict[str, object] = field(default_factory=dict)
    step_count: int = 0


def make_optimizer(
    kind: Union[str, OptimizerKind],
    parameters: Mapping[str, torch.nn.Parameter],
    lr: float,
) -> OptimizerState:
    """
    Create Adam (beta1 0.9, beta2 0.999, eps 1e-8) or RMSprop (alpha 0.99,
    eps 1e-8) over ``parameters``.

    Raises:
        ConfigurationError: On an unknown kind, non-positive learning rate or
            empty parameter set
    """
    kind = OptimizerKind.parse(kind)
    if not (lr > 0 and math.isfinite(lr)):
        raise ConfigurationError(f"Learning rate must be positive, got {lr}")
    if not parameters:
        raise ConfigurationError("Nothing to optimize")
    params = dict(parameters)
    if kind is OptimizerKind.ADAM:
        hyper = dict(ADAM_DEFAULTS)
        optimizer = torch.optim.Adam(params.values(), lr=lr, **hyper)
    else:
        hyper = dict(RMSPROP_DEFAULTS)
        optimizer = torch.optim.RMSprop(params.values(), lr=lr, **hyper)
    return OptimizerState(kind=kind, lr=lr, parameters=params, optimizer=optimizer, hyper=hyper)


def adam_step(state: OptimizerState, grads: GradientMap) -> OptimizerState:
    """Apply one Adam update in place and return the state."""
    if state.kind is not OptimizerKind.ADAM:
        raise ConfigurationError(f"adam_step called on a {state.kind.value} state")
    return _step(state, grads)


def rmsprop_step(state: OptimizerState, grads: GradientMap) -> OptimizerState:
    """Apply one RMSprop update in place and return the state."""
    if state.kind is not OptimizerKind.RMSPROP:
        raise ConfigurationError(f"rmsprop_step called on a {state.kind.value} state")
    return _step(state, grads)


def step(state: OptimizerState, grads: GradientMap) -> OptimizerState:
    """Apply one update with whichever rule ``state`` was built for."""
    return _step(state, grads)


def _step(state: OptimizerState, grads: GradientMap) -> OptimizerState:
    missing = set(state.parameters) - set(grads)
    extra = set(grads) - set(state.parameters)
    if missing or extra:
        raise ConfigurationError(
            f"Gradient map does not match parameters (missing {sorted(missing)}, "
            f"unexpected {sorted(extra)})"
        )
    for name, param in state.parameters.items():
        grad = grads[name]
        if not torch.isfinite(grad).all():
            raise NumericError(f"Non-finite gradient for {name}", parameter=name)
        param.grad = grad.detach().clone()
    state.optimizer.step()
    state.optimizer.zero_grad(set_to_none=True)
    state.step_count += 1
    return state
