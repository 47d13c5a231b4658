# this_file: src/reactpinn/config.py
"""
Experiment configuration.

Settings are read, lowest precedence first, from the built-in defaults table,
a JSON file and command-line flags. Unset fields stay ``None`` until
``resolve_defaults`` fills them for the run's mode and problem.
"""

import dataclasses
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, NamedTuple, Optional, Tuple, Union

from .activation import ActivationKind
from .errors import ConfigurationError
from .loss import LossWeights
from .network import NetworkConfig
from .optim import OptimizerKind
from .problems import (
    FORWARD_PROBLEMS,
    INVERSE_PROBLEMS,
    REGRESSION_PROBLEMS,
    NoiseModel,
    get_problem,
)

logger = logging.getLogger(__name__)

MODES = ("forward", "approx", "inverse", "ablate", "plot-activation")


class Defaults(NamedTuple):
    optimizer: OptimizerKind
    lr: float
    iterations: int
    hidden: Tuple[int, ...]


_ADAM = OptimizerKind.ADAM
_RMSPROP = OptimizerKind.RMSPROP

FORWARD_DEFAULTS: Dict[str, Defaults] = {
    "allen_cahn": Defaults(_RMSPROP, 1e-4, 50000, (32,) * 3),
    "burgers": Defaults(_RMSPROP, 1e-4, 20000, (32,) * 3),
    "diffusion": Defaults(_ADAM, 1e-3, 30000, (30,) * 6),
    "heat": Defaults(_RMSPROP, 1e-4, 50000, (48,) * 3),
    "vibration": Defaults(_ADAM, 1e-3, 50000, (48,) * 3),
    "wave": Defaults(_RMSPROP, 1e-4, 50000, (48,) * 3),
}
APPROX_DEFAULTS = Defaults(_ADAM, 1e-3, 20000, (48,) * 3)
INVERSE_DEFAULTS: Dict[str, Defaults] = {
    "heat": Defaults(_ADAM, 1e-3, 50000, (48,) * 3),
    "wave": Defaults(_RMSPROP, 1e-4, 75000, (48,) * 3),
}
ABLATION_SIGMAS: Dict[str, Tuple[float, ...]] = {
    "heat": (0.1, 0.5, 1.0, 5.0),
    "wave": (0.1, 0.5, 1.0, 3.0),
}
ABLATION_ACTIVATIONS = (ActivationKind.STAN, ActivationKind.ABU, ActivationKind.REACT)


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Everything one run (or one ablation sweep) needs.

    ``hidden`` and ``network_seed`` describe the network; the full
    ``NetworkConfig`` is available as ``network`` once the problem is known.
    ``network_seed`` and the noise seed default to ``seed``.
    """

    mode: str = "forward"
    problem: Optional[str] = None
    activation: ActivationKind = ActivationKind.REACT
    optimizer: Optional[OptimizerKind] = None
    lr: Optional[float] = None
    iterations: Optional[int] = None
    hidden: Optional[Tuple[int, ...]] = None
    network_seed: Optional[int] = None
    weights: LossWeights = field(default_factory=LossWeights)
    noise: Optional[NoiseModel] = None
    seed: int = 0
    output_dir: Path = Path("runs")
    cache_dir: Optional[Path] = None
    log_stride: int = 100
    record_runtime: bool = True
    quick: bool = False
    sigmas: Optional[Tuple[float, ...]] = None
    activations: Optional[Tuple[ActivationKind, ...]] = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigurationError(f"Unknown mode {self.mode!r}; expected one of: {', '.join(MODES)}")
        object.__setattr__(self, "activation", ActivationKind.parse(self.activation))
        if self.optimizer is not None:
            object.__setattr__(self, "optimizer", OptimizerKind.parse(self.optimizer))
        if self.hidden is not None:
            object.__setattr__(self, "hidden", parse_hidden(self.hidden))
        if self.activations is not None:
            object.__setattr__(
                self, "activations", tuple(ActivationKind.parse(a) for a in _as_tuple(self.activations))
            )
        if self.sigmas is not None:
            object.__setattr__(self, "sigmas", tuple(float(s) for s in _as_tuple(self.sigmas)))
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        if self.cache_dir is not None:
            object.__setattr__(self, "cache_dir", Path(self.cache_dir))
        if self.lr is not None and not self.lr > 0:
            raise ConfigurationError(f"Learning rate must be positive, got {self.lr}")
        if self.iterations is not None and self.iterations < 0:
            raise ConfigurationError(f"Iterations must be nonnegative, got {self.iterations}")
        if self.log_stride < 1:
            raise ConfigurationError(f"log_stride must be positive, got {self.log_stride}")

    @property
    def network(self) -> NetworkConfig:
        if self.problem is None or self.hidden is None:
            raise ConfigurationError("Network is unknown before defaults are resolved")
        return NetworkConfig(
            input_dim=get_problem(self.problem).input_dim,
            hidden=self.hidden,
            activation=self.activation,
            seed=self.seed if self.network_seed is None else self.network_seed,
        )

    def as_dict(self) -> Dict[str, Any]:
        """JSON-ready view, in the same shape ``from_dict`` accepts."""
        data = dataclasses.asdict(self)
        data["activation"] = self.activation.value
        data["optimizer"] = self.optimizer.value if self.optimizer else None
        data["output_dir"] = str(self.output_dir)
        data["cache_dir"] = str(self.cache_dir) if self.cache_dir else None
        if self.activations is not None:
            data["activations"] = [a.value for a in self.activations]
        data["network"] = {"hidden": data.pop("hidden"), "seed": data.pop("network_seed")}
        return data


def parse_hidden(value: Union[str, int, Tuple[int, ...], list]) -> Tuple[int, ...]:
    """Accept ``(48, 48, 48)``, ``[48, 48, 48]``, ``"48,48,48"`` or ``"48x3"``."""
    if isinstance(value, str):
        text = value.strip().lower()
        if "x" in text:
            width, _, depth = text.partition("x")
            try:
                return (int(width),) * int(depth)
            except ValueError:
                raise ConfigurationError(f"Cannot parse hidden layers {value!r}") from None
        value = [part for part in text.strip("[]()").split(",") if part.strip()]
    try:
        return tuple(int(w) for w in _as_tuple(value))
    except (TypeError, ValueError):
        raise ConfigurationError(f"Cannot parse hidden layers {value!r}") from None


def from_dict(data: Mapping[str, Any]) -> ExperimentConfig:
    """
    Build a config from plain data (a parsed JSON file merged with flags).

    Raises:
        ConfigurationError: On unknown keys or invalid values
    """
    data = dict(data)
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    network = data.pop("network", None)
    if network is not None:
        if not isinstance(network, Mapping):
            raise ConfigurationError("'network' must be an object")
        unknown = set(network) - {"hidden", "seed"}
        if unknown:
            raise ConfigurationError(f"Unknown network keys: {sorted(unknown)}")
        if "hidden" in network:
            data.setdefault("hidden", network["hidden"])
        if "seed" in network:
            data.setdefault("network_seed", network["seed"])
    unknown = set(data) - known
    if unknown:
        raise ConfigurationError(f"Unknown configuration keys: {sorted(unknown)}")

    try:
        if isinstance(data.get("weights"), Mapping):
            data["weights"] = LossWeights(**data["weights"])
        if isinstance(data.get("noise"), Mapping):
            data["noise"] = NoiseModel(**data["noise"])
        return ExperimentConfig(**data)
    except TypeError as e:
        raise ConfigurationError(f"Invalid configuration: {e}") from None


def resolve_defaults(cfg: ExperimentConfig) -> ExperimentConfig:
    """
    Fill unset fields from the defaults table for ``cfg.mode`` and
    ``cfg.problem`` and apply ``quick``.

    Raises:
        ConfigurationError: If the problem does not fit the mode
    """
    if cfg.mode == "plot-activation":
        return cfg
    defaults = _defaults_for(cfg.mode, cfg.problem)
    iterations = defaults.iterations if cfg.iterations is None else cfg.iterations
    if cfg.quick and iterations > 0:
        iterations = max(1, iterations // 10)
    changes: Dict[str, Any] = {
        "optimizer": cfg.optimizer or defaults.optimizer,
        "lr": defaults.lr if cfg.lr is None else cfg.lr,
        "iterations": iterations,
        "hidden": cfg.hidden or defaults.hidden,
        "quick": False,
    }
    if cfg.mode in ("inverse", "ablate"):
        changes["noise"] = cfg.noise or NoiseModel(seed=cfg.seed)
    if cfg.mode == "ablate":
        changes["sigmas"] = cfg.sigmas or ABLATION_SIGMAS[cfg.problem]
        changes["activations"] = cfg.activations or ABLATION_ACTIVATIONS
    return dataclasses.replace(cfg, **changes)


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> ExperimentConfig:
    """
    Read ``path`` (JSON), apply ``overrides`` (flags; ``None`` values are
    ignored) and resolve defaults.

    Raises:
        ConfigurationError: On malformed JSON or invalid settings
        OSError: If the file cannot be read
    """
    data: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Malformed config file {path}: {e}") from None
        if not isinstance(data, dict):
            raise ConfigurationError(f"Config file {path} must hold a JSON object")
        logger.debug("Loaded config file %s", path)
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    cfg = resolve_defaults(from_dict(data))
    logger.debug("Resolved configuration: %s", cfg)
    return cfg


def _defaults_for(mode: str, problem: Optional[str]) -> Defaults:
    if problem is None:
        raise ConfigurationError(f"Mode {mode!r} needs a problem")
    get_problem(problem)
    if mode == "approx":
        _require(problem, REGRESSION_PROBLEMS, mode)
        return APPROX_DEFAULTS
    if mode == "forward":
        _require(problem, FORWARD_PROBLEMS, mode)
        return FORWARD_DEFAULTS[problem]
    _require(problem, tuple(INVERSE_PROBLEMS), mode)
    return INVERSE_DEFAULTS[problem]


def _require(problem: str, allowed, mode: str) -> None:
    if problem not in allowed:
        raise ConfigurationError(
            f"Problem {problem!r} is not available in {mode} mode; expected one of: "
            f"{', '.join(allowed)}"
        )


def _as_tuple(value) -> tuple:
    if isinstance(value, (list, tuple)):
        return tuple(value)
    if isinstance(value, str):
        return tuple(part.strip() for part in value.split(",") if part.strip())
    return (value,)
