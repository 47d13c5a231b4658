# this_file: src/reactpinn/metrics.py
"""
Evaluation metrics: L2 relative error, MSE, MAE and explained variance score.
"""

from dataclasses import dataclass, field, replace
from typing import Any, Dict

import numpy as np

from .errors import ConfigurationError, DegenerateInputError

METRIC_NAMES = ("l2_rel", "mse", "mae", "evs")


@dataclass(frozen=True)
class MetricsReport:
    """Metric values plus the metadata of the run that produced them."""

    l2_rel: float
    mse: float
    mae: float
    evs: float
    n_points: int
    metadata: Dict[str, Any] = field(default_factory=dict)

    def with_metadata(self, **metadata: Any) -> "MetricsReport":
        return replace(self, metadata={**self.metadata, **metadata})


def compute_metrics(pred, truth) -> MetricsReport:
    """
    Compare predictions with ground truth.

    EVS uses population variances: ``1 - Var(truth - pred) / Var(truth)``.

    Raises:
        ConfigurationError: If lengths differ or fewer than two points are given
        DegenerateInputError: If the truth has zero norm or zero variance
    """
    pred = np.asarray(pred, dtype=np.float64).ravel()
    truth = np.asarray(truth, dtype=np.float64).ravel()
    if pred.shape != truth.shape:
        raise ConfigurationError(
            f"Prediction and truth lengths differ: {pred.size} vs {truth.size}"
        )
    if truth.size < 2:
        raise ConfigurationError("Metrics need at least two points")
    norm = np.linalg.norm(truth)
    if norm == 0.0:
        raise DegenerateInputError("Truth has zero norm; L2 relative error undefined")
    if np.var(truth) == 0.0:
        raise DegenerateInputError("Truth is constant; explained variance undefined")

    error = pred - truth
    return MetricsReport(
        l2_rel=float(np.linalg.norm(error) / norm),
        mse=float(np.mean(error**2)),
        mae=float(np.mean(np.abs(error))),
        evs=float(1.0 - np.var(error) / np.var(truth)),
        n_points=int(truth.size),
    )
