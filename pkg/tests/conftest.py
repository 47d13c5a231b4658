"""
Test configuration and fixtures for reactpinn.

This file contains shared fixtures and test utilities for the reactpinn test suite.
"""

from pathlib import Path

import numpy as np
import pytest
import torch

from reactpinn.config import ExperimentConfig, resolve_defaults
from reactpinn.network import NetworkConfig, build_network


@pytest.fixture(autouse=True, scope="session")
def float64_default():
    """Run every test with float64 as the torch default dtype."""
    previous = torch.get_default_dtype()
    torch.set_default_dtype(torch.float64)
    yield
    torch.set_default_dtype(previous)


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Keep FD reference caches out of the user's home directory."""
    cache = tmp_path / "cache"
    monkeypatch.setenv("REACTPINN_CACHE_DIR", str(cache))
    return cache


@pytest.fixture
def network_factory():
    """Build small seeded networks."""

    def make(activation="react", input_dim=2, hidden=(8, 8), seed=0):
        return build_network(
            NetworkConfig(
                input_dim=input_dim, hidden=hidden, activation=activation, seed=seed
            )
        )

    return make


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def quick_config(tmp_path):
    """Resolved configs with a tiny network and few iterations."""

    def make(mode="forward", problem="heat", **overrides):
        settings = {
            "mode": mode,
            "problem": problem,
            "iterations": 3,
            "hidden": (6, 6),
            "log_stride": 1,
            "record_runtime": False,
            "output_dir": Path(tmp_path) / "out",
        }
        settings.update(overrides)
        return resolve_defaults(ExperimentConfig(**settings))

    return make


@pytest.fixture
def tolerance_checker():
    """Fixture for checking numeric tolerances in tests."""

    def check_tolerance(actual, expected, rel=1e-3, abs_tol=1e-8):
        """Check |actual - expected| <= abs_tol + rel * |expected| elementwise."""
        actual = np.asarray(actual, dtype=np.float64)
        expected = np.asarray(expected, dtype=np.float64)
        return bool(np.all(np.abs(actual - expected) <= abs_tol + rel * np.abs(expected)))

    return check_tolerance
