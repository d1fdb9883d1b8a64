"""Pytest configuration and shared fixtures."""

import numpy as np
import pytest

from src.config import get_settings
from src.config.loader import load_config
from src.core.logging import setup_logging
from src.flow.initial import make_initial
from src.flow.integrator import TrajectoryRecord
from src.noise.model import build_noise_model
from src.torus.grid import Grid

# Runs in well under a second per trajectory: n=32, ten steps, three samples.
SMALL_RUN = [
    "grid.n=32",
    "noise.cutoff=4",
    "scheme.dt=1e-3",
    "sim.T=0.01",
    "sim.record_stride=5",
    "bubble.rho=0.7",
    "initial.params.cutoff=3",
    "ensemble.count=4",
    "constants.samples=5",
    "constants.snapshots=2",
    "constants.grid_sizes=[32, 64]",
    "constants.radii=[0.7]",
    "wente.count=3",
    "wente.grid_sizes=[32, 64]",
    "couple.validation_runs=2",
    "verify.fixed_point_T=0.01",
    "verify.reproducibility_count=2",
]


@pytest.fixture(scope="session", autouse=True)
def setup_test_logging():
    """Setup logging for tests."""
    setup_logging()


@pytest.fixture
def grid():
    """32×32 grid."""
    return Grid(32)


@pytest.fixture
def small_overrides():
    """``--set`` overrides of a run small enough for unit tests."""
    return list(SMALL_RUN)


@pytest.fixture
def small_config(small_overrides):
    """Resolved SimConfig of the small run."""
    return load_config(overrides=small_overrides)


@pytest.fixture
def noise_model(grid):
    """σ = 0.1, s = 2, K = 2 noise on the 32 grid (13 modes)."""
    return build_noise_model(grid, sigma=0.1, s=2.0, cutoff=2)


@pytest.fixture
def quiet_model(grid):
    """Noiseless model on the 32 grid."""
    return build_noise_model(grid, sigma=0.0, s=2.0, cutoff=2)


@pytest.fixture
def smooth_u(grid):
    """Default random_smooth initial data on the 32 grid."""
    return make_initial("random_smooth", {"cutoff": 3}, grid)


@pytest.fixture
def equator(grid):
    """The equator map (cos x₁, sin x₁, 0)."""
    return make_initial("equator", {}, grid)


@pytest.fixture
def min_ensemble(monkeypatch):
    """Lower the statistical ensemble floor for small synthetic ensembles."""

    def set_floor(value: int) -> None:
        monkeypatch.setattr(get_settings(), "min_ensemble", value)

    return set_floor


def synthetic_record(trajectory_id: int, times, **series) -> TrajectoryRecord:
    """TrajectoryRecord with the given series sampled at ``times``."""
    record = TrajectoryRecord(trajectory_id=trajectory_id, dt=0.1, record_stride=1)
    for index, t in enumerate(times):
        record.append(t, {name: values[index] for name, values in series.items()})
    return record


@pytest.fixture
def make_record():
    """Factory for synthetic trajectory records."""
    return synthetic_record


@pytest.fixture
def rng():
    """Fixed numpy generator."""
    return np.random.default_rng(1234)
