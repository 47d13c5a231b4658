#!/usr/bin/env python3
# this_file: src/reactpinn/__main__.py
"""
Command-line interface for reactpinn.

Subcommands: forward, approx, inverse, ablate, plot-activation.
"""

import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional

import fire

from .config import load_config
from .errors import NumericError, PinnError
from .runner import plot_activation as _plot_activation
from .runner import run

logger = logging.getLogger(__name__)

EXIT_FAILURE = 2


def forward(
    problem: Optional[str] = None,
    activation: Optional[str] = None,
    config: Optional[str] = None,
    out: Optional[str] = None,
    quick: bool = False,
    seed: Optional[int] = None,
    iterations: Optional[int] = None,
    lr: Optional[float] = None,
    optimizer: Optional[str] = None,
    hidden: Optional[str] = None,
    cache_dir: Optional[str] = None,
    record_runtime: Optional[bool] = None,
    verbose: bool = False,
    quiet: bool = False,
) -> None:
    """
    Solve a forward problem (allen_cahn, burgers, diffusion, heat, vibration,
    wave) and write metrics.csv, losses.csv and solution.csv.

    Args:
        problem: Problem name
        activation: relu, sigmoid, tanh, sin, softplus, stan, abu or react
        config: JSON file with ExperimentConfig fields; flags override it
        out: Output directory
        quick: Divide the iteration count by 10
        seed: Seed for initialization
        iterations: Optimizer steps
        lr: Learning rate
        optimizer: adam or rmsprop
        hidden: Hidden widths, e.g. "48x3" or "32,32,32"
        cache_dir: Reference cache directory
        record_runtime: Write wall-clock seconds (False writes 0.0)
        verbose: Debug logging
        quiet: Warnings and errors only
    """
    _run("forward", locals())


def approx(
    problem: Optional[str] = None,
    activation: Optional[str] = None,
    config: Optional[str] = None,
    out: Optional[str] = None,
    quick: bool = False,
    seed: Optional[int] = None,
    iterations: Optional[int] = None,
    lr: Optional[float] = None,
    optimizer: Optional[str] = None,
    hidden: Optional[str] = None,
    record_runtime: Optional[bool] = None,
    verbose: bool = False,
    quiet: bool = False,
) -> None:
    """Fit f1, f2 or f3 from 1000 samples; also writes generalization.csv."""
    _run("approx", locals())


def inverse(
    problem: Optional[str] = None,
    activation: Optional[str] = None,
    config: Optional[str] = None,
    out: Optional[str] = None,
    quick: bool = False,
    seed: Optional[int] = None,
    iterations: Optional[int] = None,
    lr: Optional[float] = None,
    optimizer: Optional[str] = None,
    hidden: Optional[str] = None,
    sigma: Optional[float] = None,
    record_runtime: Optional[bool] = None,
    verbose: bool = False,
    quiet: bool = False,
) -> None:
    """
    Estimate the heat diffusivity or the wave velocity from noisy samples.

    Args:
        sigma: Standard deviation of the measurement noise (default 0.1)
    """
    _run("inverse", locals())


def ablate(
    problem: Optional[str] = None,
    config: Optional[str] = None,
    out: Optional[str] = None,
    quick: bool = False,
    seed: Optional[int] = None,
    iterations: Optional[int] = None,
    sigmas: Optional[str] = None,
    activations: Optional[str] = None,
    record_runtime: Optional[bool] = None,
    verbose: bool = False,
    quiet: bool = False,
) -> None:
    """
    Sweep noise levels and adaptive activations on an inverse problem and
    write ablation.csv.

    Args:
        sigmas: Comma-separated noise levels (heat: 0.1,0.5,1,5; wave: 0.1,0.5,1,3)
        activations: Comma-separated activations (default stan,abu,react)
    """
    _run("ablate", locals())


def plot_activation(
    activation: str = "react",
    params: Optional[Any] = None,
    out: str = ".",
    x_min: float = -5.0,
    x_max: float = 5.0,
    n_points: int = 201,
    verbose: bool = False,
    quiet: bool = False,
) -> None:
    """
    Write activation.csv with curves of one activation.

    Args:
        activation: Activation kind
        params: JSON list of shape parameters, e.g. "[-2,0,-2,0]"; REAct
            without params writes its shape-parameter family
        out: Output directory
    """
    setup_logging(verbose, quiet)
    if isinstance(params, str):
        try:
            params = json.loads(params)
        except json.JSONDecodeError as e:
            raise ValueError(f"--params must be a JSON list: {e}") from None
    _plot_activation(activation, Path(out), params, (x_min, x_max), n_points)


COMMANDS = {
    "forward": forward,
    "approx": approx,
    "inverse": inverse,
    "ablate": ablate,
    "plot-activation": plot_activation,
}


def setup_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(level)


def _run(mode: str, flags: Dict[str, Any]) -> None:
    flags = dict(flags)
    setup_logging(flags.pop("verbose"), flags.pop("quiet"))
    path = flags.pop("config")
    sigma = flags.pop("sigma", None)
    out = flags.pop("out")
    overrides = {
        **flags,
        "mode": mode,
        "output_dir": out,
        "quick": flags.get("quick") or None,
    }
    cfg = load_config(path, overrides)
    if sigma is not None:
        cfg = dataclasses.replace(cfg, noise=dataclasses.replace(cfg.noise, sigma=float(sigma)))
    result = run(cfg)
    logs = result if isinstance(result, list) else [result]
    diverged = [log for log in logs if log.diverged]
    if mode != "ablate" and diverged:
        log = diverged[0]
        raise NumericError(
            f"{log.problem}/{log.activation.value} diverged after iteration "
            f"{log.last_finite_iteration}; partial outputs are in {cfg.output_dir}"
        )


def main():
    """Main CLI entry point."""
    fire.core.Display = lambda lines, out: print(*lines, file=out)
    try:
        fire.Fire(COMMANDS)
    except fire.core.FireExit as e:
        # Help exits with 0; usage errors have already printed fire's usage text
        if not e.code:
            raise
        _fail("UsageError", f"Could not parse arguments: {' '.join(sys.argv[1:])}")
    except (PinnError, OSError, ValueError) as e:
        _fail(type(e).__name__, str(e))


def _fail(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    sys.exit(EXIT_FAILURE)


if __name__ == "__main__":
    main()
