# this_file: tests/test_problems.py
"""
Tests for the problem registry, sampling plans and noisy data.
"""

import math

import numpy as np
import pytest
import torch

from reactpinn.autodiff import Jet
from reactpinn.errors import ConfigurationError
from reactpinn.problems import (
    PROBLEMS,
    NoiseModel,
    analytic_jet,
    analytic_solution,
    get_problem,
    init_physical_param,
    inverse_problem,
    make_noisy_data,
    make_test_set,
    regression_target,
    residual,
    sample_grid,
)


def _constant_jet(value, n):
    """Jet of u = value: every derivative is zero."""
    return Jet(
        value=torch.full((n,), value, dtype=torch.float64),
        d1=torch.zeros(n, 2, dtype=torch.float64),
        d2=torch.zeros(n, 2, dtype=torch.float64),
    )


class TestRegistry:
    def test_names(self):
        assert set(PROBLEMS) == {
            "allen_cahn",
            "burgers",
            "diffusion",
            "heat",
            "vibration",
            "wave",
            "f1",
            "f2",
            "f3",
        }

    def test_unknown(self):
        with pytest.raises(ConfigurationError, match="Unknown problem"):
            get_problem("poisson")

    def test_constants(self):
        assert get_problem("heat").physical_params["alpha"] == 0.4
        assert get_problem("burgers").physical_params["nu"] == pytest.approx(0.01 / math.pi)
        assert get_problem("allen_cahn").physical_params["d"] == 0.001
        assert get_problem("wave").physical_params["c"] == 2.0
        assert get_problem("vibration").input_dim == 1

    @pytest.mark.parametrize("name", ["heat", "diffusion", "vibration", "wave"])
    def test_closed_forms_satisfy_equations(self, name, rng):
        spec = get_problem(name)
        lows = [lo for lo, _, _ in spec.train_domain.axes]
        highs = [hi for _, hi, _ in spec.train_domain.axes]
        points = rng.uniform(lows, highs, size=(50, len(lows)))
        r = residual(spec, torch.as_tensor(points), analytic_jet(spec, points))
        assert float(r.abs().max()) <= 1e-9

    def test_closed_forms_meet_initial_conditions(self):
        x = np.linspace(0.0, 1.0, 11)
        heat = analytic_solution(get_problem("heat"), np.stack([x, np.zeros_like(x)], 1))
        np.testing.assert_allclose(heat, np.sin(np.pi * x), atol=1e-15)
        vib = analytic_jet(get_problem("vibration"), [[0.0]])
        assert float(vib.value) == pytest.approx(1.0)
        assert float(vib.d1[0, 0]) == pytest.approx(0.0, abs=1e-12)

    def test_wrong_parameter_leaves_residual(self, rng):
        spec = get_problem("heat")
        points = rng.uniform(0.0, 0.8, size=(20, 2))
        r = residual(spec, torch.as_tensor(points), analytic_jet(spec, points), {"alpha": 0.5})
        assert float(r.abs().max()) > 1e-3

    def test_residual_needs_second_order(self):
        spec = get_problem("heat")
        jet = Jet(value=torch.zeros(1), d1=torch.zeros(1, 2))
        with pytest.raises(ConfigurationError, match="second derivatives"):
            residual(spec, torch.zeros(1, 2), jet)

    @pytest.mark.parametrize("u", [-1.0, 0.0, 0.5, 1.0])
    def test_allen_cahn_constant_state(self, u):
        """Constant u leaves only the reaction term -5 (u - u^3)."""
        jet = _constant_jet(u, 4)
        r = residual(get_problem("allen_cahn"), torch.zeros(4, 2), jet)
        np.testing.assert_allclose(r, -5.0 * (u - u**3), atol=1e-15)

    @pytest.mark.parametrize("nu", [0.01 / math.pi, 0.3])
    def test_burgers_constant_state(self, nu):
        jet = _constant_jet(1.7, 4)
        r = residual(get_problem("burgers"), torch.zeros(4, 2), jet, {"nu": nu})
        assert torch.count_nonzero(r) == 0

    def test_regression_targets(self):
        assert regression_target("f1", 1.0) == pytest.approx(math.sin(2.0))
        assert regression_target("f3", 0.0) == pytest.approx(
            math.sin(math.pi / 3) * math.sin(math.pi / 6)
        )
        with pytest.raises(ConfigurationError):
            regression_target("heat", 0.0)


class TestSampling:
    def test_heat_training_grid(self):
        spec = get_problem("heat")
        samples = sample_grid(spec.train_domain, spec)
        assert samples.collocation.shape == (10000, 2)
        assert len(samples.initial) == 100
        assert np.all(samples.initial.points[:, 1] == 0.0)
        assert len(samples.boundary) == 200
        assert np.all(samples.boundary.points[:100, 0] == 0.0)
        assert np.all(samples.boundary.points[100:, 0] == 1.0)
        assert samples.collocation[:, 1].max() == pytest.approx(0.8)

    def test_x_varies_slowest(self):
        spec = get_problem("heat")
        grid = sample_grid(spec.train_domain).collocation
        assert grid[0, 0] == grid[99, 0]
        assert grid[100, 0] > grid[0, 0]

    @pytest.mark.parametrize(
        "name, size",
        [("heat", 2100), ("diffusion", 2100), ("burgers", 5376), ("vibration", 10000), ("f1", 1000)],
    )
    def test_test_set_sizes(self, name, size):
        assert make_test_set(get_problem(name)).collocation.shape[0] == size

    def test_heat_test_band(self):
        points = make_test_set(get_problem("heat")).collocation
        assert points[:, 1].min() == pytest.approx(0.8)
        assert points[:, 1].max() == pytest.approx(1.0)

    def test_vibration_has_velocity_condition(self):
        spec = get_problem("vibration")
        samples = sample_grid(spec.train_domain, spec)
        assert samples.boundary is None
        assert samples.initial.points.shape == (1, 1)
        assert samples.initial.velocity.tolist() == [0.0]

    def test_regression_grid_has_data(self):
        samples = sample_grid(get_problem("f2").train_domain, get_problem("f2"))
        assert samples.data.points.shape == (1000, 1)
        assert samples.initial is None and samples.boundary is None


class TestInverse:
    def test_inverse_variant(self):
        spec = inverse_problem("heat")
        assert spec.trainable == ("alpha",)
        assert spec.train_domain.t_range == (0.0, 1.0)
        assert spec.train_domain.size == 10000
        assert inverse_problem("wave").trainable == ("c",)

    def test_no_inverse_for_burgers(self):
        with pytest.raises(ConfigurationError, match="No inverse variant"):
            inverse_problem("burgers")

    def test_noisy_data_is_seeded(self):
        spec = inverse_problem("heat")
        first = make_noisy_data(spec, NoiseModel(sigma=0.1, seed=3))
        second = make_noisy_data(spec, NoiseModel(sigma=0.1, seed=3))
        assert first.points.shape == (5000, 2)
        np.testing.assert_array_equal(first.values, second.values)

    def test_noise_free_data_is_exact(self):
        spec = inverse_problem("wave")
        data = make_noisy_data(spec, NoiseModel(sigma=0.0))
        np.testing.assert_allclose(data.values, analytic_solution(spec, data.points))

    def test_noise_level(self):
        spec = inverse_problem("heat")
        data = make_noisy_data(spec, NoiseModel(sigma=0.5))
        noise = data.values - analytic_solution(spec, data.points)
        assert np.std(noise) == pytest.approx(0.5, rel=0.05)

    def test_noise_mean_is_unbiased(self):
        """Sample mean of the noise within 3 sigma / sqrt(5000) of zero."""
        spec = inverse_problem("wave")
        noise = NoiseModel(sigma=0.1, n_data=5000, n_points=10000, seed=0)
        data = make_noisy_data(spec, noise)
        clean = analytic_solution(spec, data.points)
        assert abs(np.mean(data.values) - np.mean(clean)) <= 3 * 0.1 / math.sqrt(5000)

    def test_invalid_noise(self):
        with pytest.raises(ConfigurationError):
            NoiseModel(sigma=-0.1)
        with pytest.raises(ConfigurationError):
            NoiseModel(n_data=20000, n_points=10000)

    def test_initial_guess_range(self):
        values = [init_physical_param(seed) for seed in range(50)]
        assert all(0.2 <= v <= 2.5 for v in values)
        assert init_physical_param(7) == init_physical_param(7)
