# this_file: src/reactpinn/runner.py
"""
Experiment orchestration: training loops for the forward, function
approximation and inverse modes, noise ablation sweeps, output files and
activation curve export.
"""

import csv
import dataclasses
import errno
import json
import logging
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import torch

from .activation import (
    ABU_CANDIDATES,
    ABUParams,
    ActivationKind,
    REActParams,
    STanParams,
    evaluate,
    params_from_values,
    react_family,
)
from .autodiff import gradient_of_scalar
from .config import ExperimentConfig
from .errors import NumericError, PinnError
from .loss import LossBreakdown, compute_losses
from .metrics import MetricsReport, compute_metrics
from .network import Network, build_network
from .optim import make_optimizer, step
from .oracle import ReferenceCache, reference_values
from .problems import (
    INVERSE_PROBLEMS,
    Domain,
    ProblemSpec,
    SampleSet,
    get_problem,
    init_physical_param,
    inverse_problem,
    make_noisy_data,
    make_test_set,
    sample_grid,
)

logger = logging.getLogger(__name__)

METRICS_HEADER = [
    "problem",
    "activation",
    "seed",
    "iterations",
    "l2_rel",
    "mse",
    "mae",
    "evs",
    "runtime_s",
]
INVERSE_COLUMNS = ["param_estimate", "param_pct_error"]
LOSS_COLUMNS = ["iteration", "phy", "ic", "bc", "data", "total"]
SOLUTION_HEADER = ["x", "t", "u_pred", "u_true"]
ABLATION_HEADER = [
    "problem",
    "sigma",
    "activation",
    "initial_value",
    "estimate",
    "pct_error",
    "status",
]
ACTIVATION_HEADER = ["curve", "a", "b", "c", "d", "x", "y"]

PREDICT_BATCH = 65536
GENERALIZATION_FACTOR = 10


@dataclass(frozen=True)
class LossRecord:
    """Loss breakdown and tracked parameters at one logged iteration."""

    iteration: int
    losses: LossBreakdown
    shape: Dict[str, float] = field(default_factory=dict)
    estimate: Optional[float] = None


@dataclass(frozen=True)
class Solution:
    """Test points with predicted and true values."""

    points: np.ndarray
    coords: Sequence[str]
    pred: np.ndarray
    truth: np.ndarray


@dataclass
class RunLog:
    """Everything one training run produced."""

    problem: str
    activation: ActivationKind
    seed: int
    iterations: int
    records: List[LossRecord] = field(default_factory=list)
    metrics: Optional[MetricsReport] = None
    generalization: Optional[MetricsReport] = None
    solution: Optional[Solution] = None
    parameter: Optional[str] = None
    initial_value: Optional[float] = None
    true_value: Optional[float] = None
    estimate: Optional[float] = None
    diverged: bool = False
    last_finite_iteration: Optional[int] = None
    runtime_s: float = 0.0
    network: Optional[Network] = field(default=None, repr=False)

    @property
    def pct_error(self) -> Optional[float]:
        """``100 * |estimate - true| / true`` for inverse runs."""
        if self.estimate is None or self.true_value is None:
            return None
        return 100.0 * abs(self.estimate - self.true_value) / self.true_value

    @property
    def completed_iterations(self) -> int:
        if not self.diverged:
            return self.iterations
        return self.last_finite_iteration or 0


class Trainer:
    """
    Full-batch training of one network on one sample set.

    The optimizer covers every trainable parameter of ``network``: weights,
    activation shape parameters and, in inverse runs, physical constants.
    """

    def __init__(
        self,
        spec: ProblemSpec,
        network: Network,
        samples: SampleSet,
        cfg: ExperimentConfig,
    ):
        self.spec = spec
        self.network = network
        self.samples = samples
        self.cfg = cfg
        self.state = make_optimizer(cfg.optimizer, network.trainable(), cfg.lr)

    def train(self, log: RunLog) -> RunLog:
        """
        Run ``cfg.iterations`` optimizer steps, recording losses every
        ``cfg.log_stride`` iterations and after the last one.

        A non-finite loss or gradient stops training; ``log.diverged`` is set
        and ``log.last_finite_iteration`` names the last iteration whose loss
        was finite.
        """
        iterations = self.cfg.iterations
        stride = self.cfg.log_stride
        for iteration in range(iterations + 1):
            try:
                loss, losses = compute_losses(
                    self.spec, self.network, self.samples, self.cfg.weights
                )
                if not math.isfinite(losses.total):
                    raise NumericError(f"Loss is not finite: {losses.total}")
                log.last_finite_iteration = iteration
                if iteration % stride == 0 or iteration == iterations:
                    log.records.append(self.record(iteration, losses, log.parameter))
                    logger.info(
                        "%s/%s iter %d: total %.4e (phy %.3e, ic %.3e, bc %.3e, data %.3e)",
                        log.problem,
                        log.activation.value,
                        iteration,
                        losses.total,
                        losses.phy,
                        losses.ic,
                        losses.bc,
                        losses.data,
                    )
                if iteration == iterations:
                    break
                grads = gradient_of_scalar(loss, self.state.parameters)
                step(self.state, grads)
            except NumericError as e:
                log.diverged = True
                logger.warning(
                    "Training diverged at iteration %d (last finite: %s): %s",
                    iteration,
                    log.last_finite_iteration,
                    e,
                )
                break
        return log

    def record(
        self, iteration: int, losses: LossBreakdown, parameter: Optional[str] = None
    ) -> LossRecord:
        estimate = None
        if parameter is not None:
            estimate = self.network.physical_values()[parameter]
        return LossRecord(
            iteration=iteration,
            losses=losses,
            shape=shape_columns(self.network),
            estimate=estimate,
        )


def predict(network: Network, points) -> np.ndarray:
    """Network output at ``points`` without building a graph."""
    points = torch.as_tensor(np.asarray(points, dtype=np.float64)).reshape(
        -1, network.input_dim
    )
    with torch.no_grad():
        chunks = [
            network(points[start : start + PREDICT_BATCH])[:, 0]
            for start in range(0, points.shape[0], PREDICT_BATCH)
        ]
    return torch.cat(chunks).numpy()


def shape_columns(network: Network) -> Dict[str, float]:
    """Shape parameters of the first hidden layer, keyed by CSV column name."""
    params = network.activation_params()[0]
    if isinstance(params, REActParams):
        return dict(zip("abcd", params.astuple()))
    if isinstance(params, STanParams):
        return {"beta": params.beta}
    if isinstance(params, ABUParams):
        return {f"w_{kind.value}": float(w) for kind, w in zip(ABU_CANDIDATES, params.weights)}
    return {}


# --- runs -----------------------------------------------------------------


def run_forward(cfg: ExperimentConfig) -> RunLog:
    """
    Train on the physics, IC and BC losses and evaluate on the test set
    against the closed form or the FD reference.
    """
    prepare_output_dir(cfg.output_dir)
    spec = get_problem(cfg.problem)
    samples = sample_grid(spec.train_domain, spec)
    log = _train(spec, samples, cfg)
    test = make_test_set(spec).collocation
    truth = reference_values(spec, test, ReferenceCache(cfg.cache_dir))
    _score(log, spec, test, truth)
    emit_outputs(log, cfg)
    return log


def run_approx(cfg: ExperimentConfig) -> RunLog:
    """
    Fit f1, f2 or f3 on its uniform points with the data loss only.

    Metrics are computed on the training points; ``generalization`` holds the
    same metrics on a ten times finer grid over the same interval.
    """
    prepare_output_dir(cfg.output_dir)
    spec = get_problem(cfg.problem)
    samples = sample_grid(spec.train_domain, spec)
    log = _train(spec, samples, cfg)
    _score(log, spec, samples.data.points, samples.data.values)

    if log.metrics is not None:
        domain = spec.train_domain
        fine = Domain(
            x_range=domain.x_range, n_space=GENERALIZATION_FACTOR * domain.n_space
        )
        points = sample_grid(fine).collocation
        try:
            log.generalization = _metrics(
                log, predict(log.network, points), reference_values(spec, points)
            )
        except PinnError as e:
            logger.warning("Generalization metrics unavailable: %s", e)
    emit_outputs(log, cfg)
    return log


def run_inverse(cfg: ExperimentConfig) -> RunLog:
    """
    Jointly fit the network and the unknown diffusivity (heat) or wave velocity
    (wave) from noisy samples, the equation, the IC and the BC.
    """
    prepare_output_dir(cfg.output_dir)
    spec = inverse_problem(cfg.problem)
    parameter = INVERSE_PROBLEMS[cfg.problem]
    samples = sample_grid(spec.train_domain, spec)
    samples = dataclasses.replace(samples, data=make_noisy_data(spec, cfg.noise))
    initial = init_physical_param(cfg.seed)
    logger.info(
        "Inverse %s: %s starts at %.4f (true %.4f), sigma %g",
        spec.name,
        parameter,
        initial,
        spec.physical_params[parameter],
        cfg.noise.sigma,
    )

    def setup(network: Network) -> None:
        network.add_physical_param(parameter, initial)

    log = _train(spec, samples, cfg, setup=setup, parameter=parameter)
    log.initial_value = initial
    log.true_value = spec.physical_params[parameter]
    if log.records:
        log.estimate = log.records[-1].estimate
    test = make_test_set(spec).collocation
    _score(log, spec, test, reference_values(spec, test))
    if log.estimate is not None:
        logger.info(
            "Estimated %s = %.6f (%.4f%% error)", parameter, log.estimate, log.pct_error
        )
    emit_outputs(log, cfg)
    return log


def run_ablation(cfg: ExperimentConfig) -> List[RunLog]:
    """
    Inverse runs over every noise level and activation of the sweep.

    Each member writes its own outputs to ``<out>/<activation>_sigma<sigma>``.
    A failing member is logged and recorded as ``failed``; the sweep goes on.
    """
    prepare_output_dir(cfg.output_dir)
    logs: List[RunLog] = []
    rows = []
    initial = init_physical_param(cfg.seed)
    for sigma in cfg.sigmas:
        for activation in cfg.activations:
            member = dataclasses.replace(
                cfg,
                mode="inverse",
                activation=activation,
                noise=dataclasses.replace(cfg.noise, sigma=sigma),
                output_dir=cfg.output_dir / f"{activation.value}_sigma{sigma:g}",
            )
            try:
                log = run_inverse(member)
            except (PinnError, OSError) as e:
                logger.error(
                    "Ablation member %s sigma=%g failed: %s", activation.value, sigma, e
                )
                rows.append([cfg.problem, sigma, activation.value, initial, None, None, "failed"])
                continue
            logs.append(log)
            status = "diverged" if log.diverged else "ok"
            rows.append(
                [
                    cfg.problem,
                    sigma,
                    activation.value,
                    log.initial_value,
                    log.estimate,
                    log.pct_error,
                    status,
                ]
            )
    _write_csv(cfg.output_dir / "ablation.csv", ABLATION_HEADER, rows)
    logger.info("Ablation finished: %d of %d runs completed", len(logs), len(rows))
    return logs


def run(cfg: ExperimentConfig) -> Union[RunLog, List[RunLog]]:
    """Dispatch on ``cfg.mode``."""
    runners = {
        "forward": run_forward,
        "approx": run_approx,
        "inverse": run_inverse,
        "ablate": run_ablation,
    }
    return runners[cfg.mode](cfg)


def _train(
    spec: ProblemSpec,
    samples: SampleSet,
    cfg: ExperimentConfig,
    setup=None,
    parameter: Optional[str] = None,
) -> RunLog:
    seed_everything(cfg.seed)
    network = build_network(cfg.network)
    if setup is not None:
        setup(network)
    logger.info(
        "Training %s with %s: %s lr=%g, %d iterations, hidden %s",
        spec.name,
        cfg.activation.value,
        cfg.optimizer.value,
        cfg.lr,
        cfg.iterations,
        "x".join(map(str, cfg.hidden)),
    )
    log = RunLog(
        problem=spec.name,
        activation=cfg.activation,
        seed=cfg.seed,
        iterations=cfg.iterations,
        parameter=parameter,
        network=network,
    )
    trainer = Trainer(spec, network, samples, cfg)
    started = time.perf_counter()
    trainer.train(log)
    log.runtime_s = time.perf_counter() - started if cfg.record_runtime else 0.0
    return log


def _score(log: RunLog, spec: ProblemSpec, points, truth) -> None:
    try:
        pred = predict(log.network, points)
    except NumericError as e:
        logger.warning("Skipping evaluation of %s: %s", spec.name, e)
        return
    log.metrics = _metrics(log, pred, truth)
    log.solution = Solution(points=np.asarray(points), coords=spec.coords, pred=pred, truth=np.asarray(truth))
    logger.info(
        "%s/%s: L2 rel %.4e, MSE %.4e, MAE %.4e, EVS %.6f",
        log.problem,
        log.activation.value,
        log.metrics.l2_rel,
        log.metrics.mse,
        log.metrics.mae,
        log.metrics.evs,
    )


def _metrics(log: RunLog, pred, truth) -> MetricsReport:
    return compute_metrics(pred, truth).with_metadata(
        problem=log.problem,
        activation=log.activation.value,
        seed=log.seed,
        iterations=log.completed_iterations,
    )


def seed_everything(seed: int) -> None:
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True)


# --- outputs --------------------------------------------------------------


def prepare_output_dir(path: Path) -> Path:
    """
    Create ``path`` and make sure files can be written there.

    Raises:
        OSError: If the directory cannot be created or is not writable
    """
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    if not os.access(path, os.W_OK | os.X_OK):
        raise OSError(errno.EACCES, "Output directory is not writable", str(path))
    return path


def emit_outputs(log: RunLog, cfg: ExperimentConfig) -> List[Path]:
    """
    Write ``metrics.csv``, ``losses.csv`` and ``solution.csv`` (plus
    ``generalization.csv`` for approximation runs and the resolved
    ``config.json``) to ``cfg.output_dir``.
    """
    out = prepare_output_dir(cfg.output_dir)
    written = [
        _write_csv(out / "metrics.csv", *_metrics_table(log, log.metrics)),
        _write_csv(out / "losses.csv", *_losses_table(log)),
    ]
    if log.solution is not None:
        written.append(_write_csv(out / "solution.csv", *_solution_table(log.solution)))
    if log.generalization is not None:
        written.append(
            _write_csv(out / "generalization.csv", *_metrics_table(log, log.generalization))
        )
    config_path = out / "config.json"
    config_path.write_text(json.dumps(cfg.as_dict(), indent=2, sort_keys=True), encoding="utf-8")
    written.append(config_path)
    logger.info("Wrote %s", ", ".join(p.name for p in written))
    return written


def _metrics_table(log: RunLog, metrics: Optional[MetricsReport]):
    header = list(METRICS_HEADER)
    values = (
        [metrics.l2_rel, metrics.mse, metrics.mae, metrics.evs]
        if metrics is not None
        else [math.nan] * 4
    )
    row = [log.problem, log.activation.value, log.seed, log.completed_iterations, *values, log.runtime_s]
    if log.parameter is not None:
        header += INVERSE_COLUMNS
        row += [log.estimate, log.pct_error]
    return header, [row]


def _losses_table(log: RunLog):
    shape_names = list(log.records[0].shape) if log.records else []
    header = LOSS_COLUMNS + shape_names
    if log.parameter is not None:
        header.append("param_estimate")
    rows = []
    for record in log.records:
        losses = record.losses
        row = [record.iteration, losses.phy, losses.ic, losses.bc, losses.data, losses.total]
        row += [record.shape[name] for name in shape_names]
        if log.parameter is not None:
            row.append(record.estimate)
        rows.append(row)
    return header, rows


def _solution_table(solution: Solution):
    columns = {coord: solution.points[:, i] for i, coord in enumerate(solution.coords)}
    n = solution.pred.shape[0]
    blank = [None] * n
    xs = columns.get("x", blank)
    ts = columns.get("t", blank)
    rows = [
        [x, t, p, u] for x, t, p, u in zip(xs, ts, solution.pred, solution.truth)
    ]
    return SOLUTION_HEADER, rows


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(value) for value in row])
    return path


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


# --- activation curves ----------------------------------------------------


def plot_activation(
    kind: Union[str, ActivationKind],
    output_dir: Path,
    params: Optional[Sequence[float]] = None,
    x_range=(-5.0, 5.0),
    n_points: int = 201,
) -> Path:
    """
    Sample activation curves to ``activation.csv`` for plotting.

    REAct without explicit ``params`` gives the whole shape-parameter family;
    every other case gives one curve.
    """
    kind = ActivationKind.parse(kind)
    out = prepare_output_dir(output_dir)
    x = np.linspace(float(x_range[0]), float(x_range[1]), int(n_points))
    if kind is ActivationKind.REACT and params is None:
        curves = react_family()
    else:
        values = params_from_values(kind, params)
        curves = [(_curve_label(kind, values), values)]

    rows = []
    for label, values in curves:
        y = evaluate(kind, values, x)
        shape = list(values.astuple()) if isinstance(values, REActParams) else [None] * 4
        rows.extend([label, *shape, xi, yi] for xi, yi in zip(x, y))
    path = _write_csv(out / "activation.csv", ACTIVATION_HEADER, rows)
    logger.info("Wrote %d %s curve(s) to %s", len(curves), kind.value, path)
    return path


def _curve_label(kind: ActivationKind, values) -> str:
    if isinstance(values, REActParams):
        return "a={:g},b={:g},c={:g},d={:g}".format(*values.astuple())
    if isinstance(values, STanParams):
        return f"beta={values.beta:g}"
    if isinstance(values, ABUParams):
        return "logits=" + ",".join(f"{v:g}" for v in values.logits)
    return kind.value
