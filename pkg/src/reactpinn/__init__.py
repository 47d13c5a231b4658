# this_file: src/reactpinn/__init__.py
"""
reactpinn - physics-informed neural networks with the REAct activation.

REAct, (1 - exp(ax + b)) / (1 + exp(cx + d)), learns its shape per hidden
layer and reduces to tanh at (a, b, c, d) = (-2, 0, -2, 0). The package trains
PINNs for forward and inverse PDE/ODE problems and plain regressions, and
compares REAct with fixed and other adaptive activations.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("reactpinn")
except PackageNotFoundError:
    __version__ = "unknown"
finally:
    del version, PackageNotFoundError

from .activation import ActivationKind, REActParams
from .config import ExperimentConfig, load_config
from .errors import (
    ConfigurationError,
    DegenerateInputError,
    DomainRangeError,
    NumericError,
    PinnError,
)
from .network import NetworkConfig, build_network
from .problems import get_problem
from .runner import run, run_ablation, run_approx, run_forward, run_inverse

__all__ = [
    "ActivationKind",
    "ConfigurationError",
    "DegenerateInputError",
    "DomainRangeError",
    "ExperimentConfig",
    "NetworkConfig",
    "NumericError",
    "PinnError",
    "REActParams",
    "build_network",
    "get_problem",
    "load_config",
    "run",
    "run_ablation",
    "run_approx",
    "run_forward",
    "run_inverse",
    "__version__",
]
