# this_file: tests/test_metrics.py
"""
Tests for L2 relative error, MSE, MAE and EVS.
"""

import numpy as np
import pytest

from reactpinn.errors import ConfigurationError, DegenerateInputError
from reactpinn.metrics import compute_metrics


class TestComputeMetrics:
    def test_perfect_prediction(self):
        truth = np.array([0.5, -1.0, 2.0, 3.5])
        report = compute_metrics(truth.copy(), truth)
        assert (report.l2_rel, report.mse, report.mae, report.evs) == (0.0, 0.0, 0.0, 1.0)
        assert report.n_points == 4

    def test_constant_offset(self):
        """EVS ignores a constant offset; MSE and MAE do not."""
        truth = np.linspace(-1.0, 1.0, 11)
        report = compute_metrics(truth + 5.0, truth)
        assert report.evs == pytest.approx(1.0, abs=1e-12)
        assert report.mse == pytest.approx(25.0)
        assert report.mae == pytest.approx(5.0)

    def test_equal_absolute_errors(self):
        truth = np.array([1.0, 2.0, 3.0, 4.0])
        report = compute_metrics(truth + np.array([0.5, -0.5, 0.5, -0.5]), truth)
        assert report.mse == pytest.approx(report.mae**2)

    def test_l2_relative(self):
        report = compute_metrics([3.0, 9.0], [3.0, 4.0])
        assert report.l2_rel == pytest.approx(1.0)

    def test_evs_uses_population_variance(self):
        truth = np.array([1.0, 2.0, 3.0])
        pred = np.array([1.0, 2.0, 4.0])
        residual = truth - pred
        expected = 1.0 - np.var(residual) / np.var(truth)
        assert compute_metrics(pred, truth).evs == pytest.approx(expected)

    def test_evs_shift_invariance(self, rng):
        for _ in range(100):
            truth = rng.normal(size=50)
            pred = truth + rng.normal(scale=0.3, size=50)
            shift = rng.uniform(-10.0, 10.0)
            assert compute_metrics(pred + shift, truth).evs == pytest.approx(
                compute_metrics(pred, truth).evs, abs=1e-9
            )

    def test_metadata(self):
        report = compute_metrics([1.0, 2.0], [1.0, 3.0]).with_metadata(problem="heat")
        assert report.metadata == {"problem": "heat"}


class TestDegenerateInputs:
    def test_zero_truth(self):
        with pytest.raises(DegenerateInputError, match="zero norm"):
            compute_metrics([1.0, 2.0], [0.0, 0.0])

    def test_constant_truth(self):
        with pytest.raises(DegenerateInputError, match="constant"):
            compute_metrics([1.0, 2.0], [3.0, 3.0])

    def test_length_mismatch(self):
        with pytest.raises(ConfigurationError, match="lengths differ"):
            compute_metrics([1.0, 2.0, 3.0], [1.0, 2.0])

    def test_single_point(self):
        with pytest.raises(ConfigurationError, match="two points"):
            compute_metrics([1.0], [2.0])
