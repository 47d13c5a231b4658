# this_file: src/reactpinn/activation.py
"""
Activation functions: REAct, the learnable baselines STan and ABU, and the
fixed baselines ReLU, sigmoid, tanh, sin and softplus.

REAct is

    REAct(x) = (1 - exp(a*x + b)) / (1 + exp(c*x + d))

and equals tanh at (a, b, c, d) = (-2, 0, -2, 0). It is evaluated as
``sigmoid(-q) - exp(p + logsigmoid(-q))`` with ``p = a*x + b`` and
``q = c*x + d``, which divides numerator and denominator by the dominant
exponential without branching.

Each learnable kind has a ``torch.nn.Module`` wrapper holding one parameter
set per hidden layer.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn

from .errors import ConfigurationError, NumericError

Real = Union[float, np.ndarray, torch.Tensor]


class ActivationKind(str, Enum):
    """The eight activations compared by the benchmarks."""

    RELU = "relu"
    SIGMOID = "sigmoid"
    TANH = "tanh"
    SIN = "sin"
    SOFTPLUS = "softplus"
    STAN = "stan"
    ABU = "abu"
    REACT = "react"

    @classmethod
    def parse(cls, name: Union[str, "ActivationKind"]) -> "ActivationKind":
        """Look up a kind by its value, case-insensitively."""
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            choices = ", ".join(kind.value for kind in cls)
            raise ConfigurationError(
                f"Unknown activation {name!r}; expected one of: {choices}"
            ) from None

    @property
    def learnable(self) -> bool:
        return self in (ActivationKind.STAN, ActivationKind.ABU, ActivationKind.REACT)


FIXED_KINDS = tuple(kind for kind in ActivationKind if not kind.learnable)

# Candidate order inside ABU; logits index into this tuple.
ABU_CANDIDATES: Tuple[ActivationKind, ...] = (
    ActivationKind.RELU,
    ActivationKind.SIGMOID,
    ActivationKind.SIN,
    ActivationKind.TANH,
    ActivationKind.SOFTPLUS,
)


@dataclass(frozen=True)
class REActParams:
    """Shape parameters of REAct."""

    a: float = -2.0
    b: float = 0.0
    c: float = -2.0
    d: float = 0.0

    def __post_init__(self) -> None:
        _require_finite(self.astuple(), "REAct parameters")

    def astuple(self) -> Tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class STanParams:
    """Self-scaling coefficient of STan."""

    beta: float = 0.1

    def __post_init__(self) -> None:
        _require_finite((self.beta,), "STan beta")


@dataclass(frozen=True)
class ABUParams:
    """Blending logits of ABU, in ``ABU_CANDIDATES`` order."""

    logits: Tuple[float, ...] = (0.0,) * len(ABU_CANDIDATES)

    def __post_init__(self) -> None:
        if len(self.logits) != len(ABU_CANDIDATES):
            raise ConfigurationError(
                f"ABU needs {len(ABU_CANDIDATES)} logits, got {len(self.logits)}"
            )
        _require_finite(self.logits, "ABU logits")

    @property
    def weights(self) -> np.ndarray:
        """Softmax mixing weights; positive and summing to one."""
        return torch.softmax(torch.tensor(self.logits, dtype=torch.float64), 0).numpy()


@dataclass(frozen=True)
class FixedParams:
    """Empty parameter set of a non-learnable activation."""

    kind: ActivationKind = ActivationKind.TANH


ActivationParams = Union[REActParams, STanParams, ABUParams, FixedParams]


class REActDerivatives(NamedTuple):
    dydx: Real
    d2ydx2: Real
    dyda: Real
    dydb: Real
    dydc: Real
    dydd: Real


# --- tensor kernels -------------------------------------------------------


def react(x: torch.Tensor, a, b, c, d) -> torch.Tensor:
    """REAct on tensors; differentiable in ``x`` and all four shape parameters."""
    p = a * x + b
    q = c * x + d
    return torch.sigmoid(-q) - torch.exp(p + F.logsigmoid(-q))


def stan(x: torch.Tensor, beta) -> torch.Tensor:
    return (1.0 + beta * x) * torch.tanh(x)


def fixed(kind: ActivationKind, x: torch.Tensor) -> torch.Tensor:
    """Standard fixed activations; ReLU has zero derivative at 0."""
    if kind is ActivationKind.RELU:
        return torch.relu(x)
    if kind is ActivationKind.SIGMOID:
        return torch.sigmoid(x)
    if kind is ActivationKind.TANH:
        return torch.tanh(x)
    if kind is ActivationKind.SIN:
        return torch.sin(x)
    if kind is ActivationKind.SOFTPLUS:
        return F.softplus(x)
    raise ConfigurationError(f"{kind.value} is not a fixed activation")


def abu(x: torch.Tensor, logits: torch.Tensor) -> torch.Tensor:
    weights = torch.softmax(logits, dim=0)
    return sum(w * fixed(kind, x) for w, kind in zip(weights, ABU_CANDIDATES))


# --- scalar/array operations ---------------------------------------------


def react_eval(x: Real, p: REActParams) -> Real:
    """
    Evaluate REAct at ``x``.

    Raises:
        NumericError: If the value overflows even after rearrangement
    """
    return _apply(lambda t: react(t, *p.astuple()), x, "REAct")


def react_derivatives(x: Real, p: REActParams) -> REActDerivatives:
    """
    Closed-form derivatives of REAct with respect to ``x`` (first and second)
    and to each shape parameter.

    With ``p = a*x + b``, ``q = c*x + d``, ``s = sigmoid(-q)``, ``r = sigmoid(q)``
    and ``e = exp(p) * s``: ``y_p = -e``, ``y_q = -y*r``, ``y_pq = e*r`` and
    ``y_qq = y*r*(r - s)``.
    """
    t = torch.as_tensor(x, dtype=torch.float64)
    a, b, c, d = p.astuple()
    pe = a * t + b
    qe = c * t + d
    s = torch.sigmoid(-qe)
    r = torch.sigmoid(qe)
    e = torch.exp(pe + F.logsigmoid(-qe))
    y = s - e
    y_p = -e
    y_q = -y * r
    y_pq = e * r
    y_qq = y * r * (r - s)
    values = (
        a * y_p + c * y_q,
        a * a * y_p + 2.0 * a * c * y_pq + c * c * y_qq,
        t * y_p,
        y_p,
        t * y_q,
        y_q,
    )
    for value in values:
        _check_result(value, "REAct derivative")
    return REActDerivatives(*(_unwrap(value, x) for value in values))


def stan_eval(x: Real, p: STanParams) -> Real:
    """STan: ``(1 + beta*x) * tanh(x)``."""
    return _apply(lambda t: stan(t, p.beta), x, "STan")


def abu_eval(x: Real, p: ABUParams) -> Real:
    """Softmax-weighted blend of ReLU, sigmoid, sin, tanh and softplus."""
    logits = torch.tensor(p.logits, dtype=torch.float64)
    return _apply(lambda t: abu(t, logits), x, "ABU")


def fixed_eval(kind: Union[str, ActivationKind], x: Real) -> Real:
    """Evaluate a fixed activation."""
    kind = ActivationKind.parse(kind)
    return _apply(lambda t: fixed(kind, t), x, kind.value)


def init_activation(kind: Union[str, ActivationKind]) -> ActivationParams:
    """
    Initial parameters: REAct at the tanh point, STan with beta 0.1, ABU with
    uniform logits and an empty set for fixed kinds.
    """
    kind = ActivationKind.parse(kind)
    if kind is ActivationKind.REACT:
        return REActParams()
    if kind is ActivationKind.STAN:
        return STanParams()
    if kind is ActivationKind.ABU:
        return ABUParams()
    return FixedParams(kind=kind)


# --- modules --------------------------------------------------------------


class REAct(nn.Module):
    """REAct with one learnable (a, b, c, d) set for the whole layer."""

    kind = ActivationKind.REACT

    def __init__(self, params: Optional[REActParams] = None) -> None:
        super().__init__()
        params = params or REActParams()
        for name, value in zip("abcd", params.astuple()):
            setattr(self, name, nn.Parameter(torch.tensor(value, dtype=torch.float64)))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return react(x, self.a, self.b, self.c, self.d)

    def snapshot(self) -> REActParams:
        return REActParams(*(float(getattr(self, name)) for name in "abcd"))


class STan(nn.Module):
    """STan with one learnable beta for the whole layer."""

    kind = ActivationKind.STAN

    def __init__(self, params: Optional[STanParams] = None) -> None:
        super().__init__()
        params = params or STanParams()
        self.beta = nn.Parameter(torch.tensor(params.beta, dtype=torch.float64))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return stan(x, self.beta)

    def snapshot(self) -> STanParams:
        return STanParams(float(self.beta))


class ABU(nn.Module):
    """ABU with one learnable logit vector for the whole layer."""

    kind = ActivationKind.ABU

    def __init__(self, params: Optional[ABUParams] = None) -> None:
        super().__init__()
        params = params or ABUParams()
        self.logits = nn.Parameter(torch.tensor(params.logits, dtype=torch.float64))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return abu(x, self.logits)

    def snapshot(self) -> ABUParams:
        return ABUParams(tuple(float(v) for v in self.logits))


class FixedActivation(nn.Module):
    """Parameter-free activation."""

    def __init__(self, kind: ActivationKind) -> None:
        super().__init__()
        if kind.learnable:
            raise ConfigurationError(f"{kind.value} is learnable, not fixed")
        self.kind = kind

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return fixed(self.kind, x)

    def snapshot(self) -> FixedParams:
        return FixedParams(kind=self.kind)

    def extra_repr(self) -> str:
        return self.kind.value


def make_activation(
    kind: Union[str, ActivationKind], params: Optional[ActivationParams] = None
) -> nn.Module:
    """Build the module for ``kind``, starting from ``params`` or the defaults."""
    kind = ActivationKind.parse(kind)
    if kind is ActivationKind.REACT:
        return REAct(params)
    if kind is ActivationKind.STAN:
        return STan(params)
    if kind is ActivationKind.ABU:
        return ABU(params)
    return FixedActivation(kind)


def params_from_values(
    kind: Union[str, ActivationKind], values: Optional[Sequence[float]]
) -> ActivationParams:
    """Build a parameter set from a flat list, e.g. one given on the CLI."""
    kind = ActivationKind.parse(kind)
    if values is None:
        return init_activation(kind)
    values = tuple(float(v) for v in values)
    if kind is ActivationKind.REACT:
        if len(values) != 4:
            raise ConfigurationError("REAct takes four parameters: a, b, c, d")
        return REActParams(*values)
    if kind is ActivationKind.STAN:
        if len(values) != 1:
            raise ConfigurationError("STan takes one parameter: beta")
        return STanParams(values[0])
    if kind is ActivationKind.ABU:
        return ABUParams(values)
    if values:
        raise ConfigurationError(f"{kind.value} has no parameters")
    return FixedParams(kind=kind)


def evaluate(kind: Union[str, ActivationKind], params: ActivationParams, x: Real) -> Real:
    """Dispatch to the evaluation function for ``kind``."""
    kind = ActivationKind.parse(kind)
    if kind is ActivationKind.REACT:
        return react_eval(x, params)
    if kind is ActivationKind.STAN:
        return stan_eval(x, params)
    if kind is ActivationKind.ABU:
        return abu_eval(x, params)
    return fixed_eval(kind, x)


def react_family() -> "list[Tuple[str, REActParams]]":
    """
    Named REAct parameter sets around the tanh point, varying one shape
    parameter at a time.
    """
    base = REActParams()
    family = [("base", base)]
    sweeps = {
        "a": (-3.0, -1.0, 1.0, 3.0),
        "b": (-2.0, -1.0, 1.0, 2.0),
        "c": (-3.0, -1.0, 1.0, 3.0),
        "d": (-2.0, -1.0, 1.0, 2.0),
    }
    for name, values in sweeps.items():
        for value in values:
            changed = dict(zip("abcd", base.astuple()))
            changed[name] = value
            family.append((f"{name}={value:g}", REActParams(**changed)))
    return family


def _apply(kernel, x: Real, what: str) -> Real:
    t = torch.as_tensor(x, dtype=torch.float64)
    with torch.no_grad():
        out = kernel(t)
    _check_result(out, what)
    return _unwrap(out, x)


def _unwrap(value: torch.Tensor, like: Real) -> Real:
    if isinstance(like, torch.Tensor):
        return value
    if value.ndim == 0:
        return float(value)
    return value.numpy()


def _check_result(value: torch.Tensor, what: str) -> None:
    if not torch.isfinite(value).all():
        raise NumericError(f"{what} produced a non-finite value")


def _require_finite(values: Sequence[float], what: str) -> None:
    if not all(math.isfinite(float(v)) for v in values):
        raise ConfigurationError(f"{what} must be finite, got {tuple(values)}")
