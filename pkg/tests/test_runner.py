# this_file: tests/test_runner.py
"""
Tests for the training loops, ablation sweeps and output files.
"""

import csv
import dataclasses

import numpy as np
import pytest

import reactpinn.runner as runner_module
from reactpinn.activation import ABU_CANDIDATES, ActivationKind
from reactpinn.errors import ConfigurationError, NumericError
from reactpinn.runner import (
    ABLATION_HEADER,
    METRICS_HEADER,
    plot_activation,
    run,
    run_ablation,
    run_forward,
    run_inverse,
    shape_columns,
)


def _read(path):
    with path.open(newline="", encoding="utf-8") as f:
        return list(csv.reader(f))


class TestForward:
    def test_heat_outputs(self, quick_config):
        cfg = quick_config()
        log = run_forward(cfg)
        out = cfg.output_dir

        losses = _read(out / "losses.csv")
        assert losses[0][:6] == ["iteration", "phy", "ic", "bc", "data", "total"]
        assert losses[0][6:] == ["a", "b", "c", "d"]
        assert [row[0] for row in losses[1:]] == ["0", "1", "2", "3"]

        metrics = _read(out / "metrics.csv")
        assert metrics[0] == METRICS_HEADER
        assert metrics[1][:4] == ["heat", "react", "0", "3"]
        assert metrics[1][-1] == "0.0"

        solution = _read(out / "solution.csv")
        assert solution[0] == ["x", "t", "u_pred", "u_true"]
        assert len(solution) == 1 + 100 * 21
        assert (out / "config.json").exists()
        assert not log.diverged
        assert log.metrics.n_points == 2100

    def test_zero_iterations_records_initial_loss(self, quick_config):
        log = run_forward(quick_config(iterations=0))
        assert [r.iteration for r in log.records] == [0]
        assert log.metrics is not None

    def test_log_stride(self, quick_config):
        log = run_forward(quick_config(iterations=5, log_stride=2))
        assert [r.iteration for r in log.records] == [0, 2, 4, 5]

    def test_repeat_runs_are_identical(self, quick_config, tmp_path):
        first = quick_config(output_dir=tmp_path / "a")
        second = quick_config(output_dir=tmp_path / "b")
        run_forward(first)
        run_forward(second)
        for name in ("metrics.csv", "losses.csv", "solution.csv"):
            assert (first.output_dir / name).read_bytes() == (second.output_dir / name).read_bytes()

    def test_time_only_problem_leaves_x_blank(self, quick_config):
        cfg = quick_config(problem="vibration", iterations=1)
        run_forward(cfg)
        rows = _read(cfg.output_dir / "solution.csv")[1:]
        assert len(rows) == 10000
        assert all(row[0] == "" and row[1] != "" for row in rows[:10])

    def test_tanh_has_no_shape_columns(self, quick_config):
        cfg = quick_config(activation="tanh", iterations=1)
        run_forward(cfg)
        assert _read(cfg.output_dir / "losses.csv")[0] == [
            "iteration",
            "phy",
            "ic",
            "bc",
            "data",
            "total",
        ]

    def test_unwritable_output_dir(self, quick_config, tmp_path):
        blocker = tmp_path / "taken"
        blocker.write_text("not a directory")
        with pytest.raises(OSError):
            run_forward(quick_config(output_dir=blocker))


class TestDivergence:
    def test_non_finite_loss_stops_training(self, quick_config, monkeypatch):
        real = runner_module.compute_losses
        calls = {"n": 0}

        def flaky(*args, **kwargs):
            calls["n"] += 1
            if calls["n"] == 3:
                raise NumericError("Non-finite physics residual at point 7", index=7)
            return real(*args, **kwargs)

        monkeypatch.setattr(runner_module, "compute_losses", flaky)
        cfg = quick_config(iterations=10)
        log = run_forward(cfg)

        assert log.diverged
        assert log.last_finite_iteration == 1
        assert log.completed_iterations == 1
        assert [r.iteration for r in log.records] == [0, 1]
        assert _read(cfg.output_dir / "metrics.csv")[1][3] == "1"


class TestApprox:
    def test_f1_writes_generalization(self, quick_config):
        cfg = quick_config(mode="approx", problem="f1")
        log = run(cfg)
        assert log.metrics.n_points == 1000
        assert log.generalization.n_points == 10000
        general = _read(cfg.output_dir / "generalization.csv")
        assert general[0] == METRICS_HEADER
        solution = _read(cfg.output_dir / "solution.csv")
        assert len(solution) == 1001
        assert solution[1][1] == ""

    def test_losses_are_data_only(self, quick_config):
        log = run(quick_config(mode="approx", problem="f3", iterations=1))
        first = log.records[0].losses
        assert first.phy == first.ic == first.bc == 0.0
        assert first.data == first.total > 0.0


class TestInverse:
    def test_heat_tracks_parameter(self, quick_config):
        cfg = quick_config(mode="inverse", problem="heat")
        log = run_inverse(cfg)
        assert log.parameter == "alpha"
        assert log.true_value == 0.4
        assert 0.2 <= log.initial_value <= 2.5
        assert log.records[0].estimate == pytest.approx(log.initial_value)
        assert log.estimate == log.records[-1].estimate
        assert log.pct_error == pytest.approx(100.0 * abs(log.estimate - 0.4) / 0.4)

        metrics = _read(cfg.output_dir / "metrics.csv")
        assert metrics[0][-2:] == ["param_estimate", "param_pct_error"]
        assert float(metrics[1][-2]) == log.estimate
        losses = _read(cfg.output_dir / "losses.csv")
        assert losses[0][-1] == "param_estimate"

    def test_parameter_moves(self, quick_config):
        log = run_inverse(quick_config(mode="inverse", problem="heat", lr=1e-2))
        assert log.estimate != log.initial_value

    def test_initial_guess_depends_on_seed(self, quick_config, tmp_path):
        a = run_inverse(quick_config(mode="inverse", iterations=0, seed=1, output_dir=tmp_path / "1"))
        b = run_inverse(quick_config(mode="inverse", iterations=0, seed=2, output_dir=tmp_path / "2"))
        assert a.initial_value != b.initial_value


class TestAblation:
    @pytest.fixture
    def sweep(self, quick_config):
        return quick_config(
            mode="ablate",
            iterations=1,
            sigmas=(0.1, 0.5),
            activations=("stan", "react"),
        )

    def test_rows_per_member(self, sweep):
        logs = run_ablation(sweep)
        assert len(logs) == 4
        rows = _read(sweep.output_dir / "ablation.csv")
        assert rows[0] == ABLATION_HEADER
        assert [(r[1], r[2]) for r in rows[1:]] == [
            ("0.1", "stan"),
            ("0.1", "react"),
            ("0.5", "stan"),
            ("0.5", "react"),
        ]
        assert all(r[-1] == "ok" for r in rows[1:])
        assert len({r[3] for r in rows[1:]}) == 1
        assert (sweep.output_dir / "react_sigma0.5" / "metrics.csv").exists()

    def test_failed_member_does_not_stop_sweep(self, sweep, monkeypatch):
        real = runner_module.run_inverse

        def fragile(cfg):
            if cfg.activation is ActivationKind.STAN and cfg.noise.sigma == 0.5:
                raise ConfigurationError("broken member")
            return real(cfg)

        monkeypatch.setattr(runner_module, "run_inverse", fragile)
        logs = run_ablation(sweep)
        assert len(logs) == 3
        rows = _read(sweep.output_dir / "ablation.csv")[1:]
        failed = [r for r in rows if r[-1] == "failed"]
        assert len(failed) == 1
        assert failed[0][1:3] == ["0.5", "stan"]
        assert failed[0][4:6] == ["", ""]

    def test_member_noise_seed_is_shared(self, sweep, monkeypatch):
        seen = []

        def capture(cfg):
            seen.append((cfg.noise.sigma, cfg.noise.seed, cfg.mode))
            raise ConfigurationError("skip")

        monkeypatch.setattr(runner_module, "run_inverse", capture)
        run_ablation(dataclasses.replace(sweep, seed=5, noise=dataclasses.replace(sweep.noise, seed=5)))
        assert {s for _, s, _ in seen} == {5}
        assert {m for _, _, m in seen} == {"inverse"}


class TestShapeColumns:
    def test_abu_weights(self, network_factory):
        columns = shape_columns(network_factory("abu"))
        assert list(columns) == [f"w_{kind.value}" for kind in ABU_CANDIDATES]
        assert sum(columns.values()) == pytest.approx(1.0)

    def test_stan_beta(self, network_factory):
        assert list(shape_columns(network_factory("stan"))) == ["beta"]

    def test_fixed_activation(self, network_factory):
        assert shape_columns(network_factory("sin")) == {}


class TestPlotActivation:
    def test_react_family(self, tmp_path):
        path = plot_activation("react", tmp_path)
        rows = _read(path)
        assert rows[0] == ["curve", "a", "b", "c", "d", "x", "y"]
        assert len(rows) == 1 + 17 * 201
        assert len({r[0] for r in rows[1:]}) == 17

    def test_tanh_curve(self, tmp_path):
        rows = _read(plot_activation("tanh", tmp_path, n_points=11))[1:]
        assert len(rows) == 11
        assert {r[0] for r in rows} == {"tanh"}
        x = np.array([float(r[5]) for r in rows])
        y = np.array([float(r[6]) for r in rows])
        np.testing.assert_allclose(y, np.tanh(x), atol=1e-12)

    def test_react_with_explicit_params(self, tmp_path):
        rows = _read(plot_activation("react", tmp_path, params=[1.0, 0.0, 1.0, 0.0], n_points=5))[1:]
        assert {r[0] for r in rows} == {"a=1,b=0,c=1,d=0"}


@pytest.fixture
def full_config(quick_config, tmp_path):
    """Configs with the per-problem default network and iteration count."""

    def make(mode="forward", problem="heat", name="run", **overrides):
        settings = {
            "iterations": None,
            "hidden": None,
            "log_stride": 1000,
            "output_dir": tmp_path / name,
        }
        settings.update(overrides)
        return quick_config(mode=mode, problem=problem, **settings)

    return make


@pytest.mark.slow
class TestAcceptance:
    """Full-length runs; minutes to hours on a CPU."""

    def test_heat_forward(self, full_config):
        react = run_forward(full_config(name="react"))
        assert not react.diverged
        assert react.metrics.mse <= 1e-5
        assert react.metrics.evs >= 0.99
        tanh = run_forward(full_config(name="tanh", activation="tanh"))
        assert tanh.metrics.mse >= 10 * react.metrics.mse

    def test_vibration_forward(self, full_config):
        react = run_forward(full_config(problem="vibration", name="react"))
        assert react.metrics.mse <= 1e-8
        assert react.metrics.evs >= 0.9999
        relu = run_forward(full_config(problem="vibration", name="relu", activation="relu"))
        assert relu.metrics.evs <= 0.5

    def test_burgers_forward(self, full_config):
        log = run_forward(full_config(problem="burgers"))
        assert log.metrics.l2_rel <= 0.3

    @pytest.mark.parametrize("problem", ["f1", "f2", "f3"])
    def test_approximation(self, full_config, problem):
        log = run(full_config(mode="approx", problem=problem))
        assert log.metrics.mse <= 1e-3

    def test_f3_tanh_gap(self, full_config):
        react = run(full_config(mode="approx", problem="f3", name="react"))
        tanh = run(full_config(mode="approx", problem="f3", name="tanh", activation="tanh"))
        assert tanh.metrics.l2_rel >= 5 * react.metrics.l2_rel

    def test_heat_inverse(self, full_config):
        log = run_inverse(full_config(mode="inverse"))
        assert log.pct_error <= 1.0

    def test_wave_inverse(self, full_config):
        log = run_inverse(full_config(mode="inverse", problem="wave"))
        assert log.true_value == 2.0
        assert abs(log.estimate - 2.0) <= 0.02

    def test_wave_ablation(self, full_config):
        sweep = full_config(mode="ablate", problem="wave")
        run_ablation(sweep)
        rows = [dict(zip(ABLATION_HEADER, r)) for r in _read(sweep.output_dir / "ablation.csv")[1:]]
        errors = {(float(r["sigma"]), r["activation"]): float(r["pct_error"]) for r in rows}
        for sigma in (0.1, 0.5, 1.0, 3.0):
            assert errors[(sigma, "react")] <= 2.0
        assert errors[(0.1, "abu")] > errors[(0.1, "react")]
