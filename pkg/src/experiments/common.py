"""Shared setup for experiments: building the run and fanning out trajectories."""

import os
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import TypeVar

import numpy as np

from src.bubble.cover import BallCover, build_cover
from src.config import get_settings
from src.core.exceptions import ConfigurationError
from src.core.experiment import BaseExperiment
from src.flow.initial import make_initial
from src.flow.scheme import StepScheme
from src.models.config import SimConfig
from src.noise.model import NoiseModel, build_noise_model
from src.torus.fields import VectorField3
from src.torus.grid import Grid

T = TypeVar("T")


@dataclass(frozen=True, eq=False)
class RunSetup:
    """Everything a trajectory needs, built once from a SimConfig."""

    config: SimConfig
    grid: Grid
    model: NoiseModel
    scheme: StepScheme
    u0: VectorField3
    cover: BallCover

    @property
    def T(self) -> float:
        return self.config.sim.T

    def with_noise(self, sigma: float) -> "RunSetup":
        noise = self.config.noise
        return replace(self, model=build_noise_model(self.grid, sigma, noise.s, noise.cutoff))

    def with_scheme(self, **changes) -> "RunSetup":
        return replace(self, scheme=replace(self.scheme, **changes))


def build_setup(config: SimConfig, n: int | None = None) -> RunSetup:
    """Grid, noise model, scheme, initial data and cover for ``config``.

    Args:
        config: Resolved configuration
        n: Grid size overriding ``grid.n`` (refinement studies)
    """
    grid = Grid(n if n is not None else config.grid.n)
    noise = config.noise
    scheme = StepScheme(
        kind=config.scheme.kind,
        dt=config.scheme.dt,
        projection=config.scheme.projection,
        ito_correction=config.scheme.ito_correction,
    )
    return RunSetup(
        config=config,
        grid=grid,
        model=build_noise_model(grid, noise.sigma, noise.s, noise.cutoff),
        scheme=scheme,
        u0=make_initial(config.initial.kind, config.initial.params, grid),
        cover=build_cover(grid, config.bubble.rho, config.bubble.dilation),
    )


def resolve_workers(workers: int | None) -> int:
    """Explicit count, else settings; 0 means one thread per CPU."""
    if workers is None:
        return get_settings().workers
    return workers or os.cpu_count() or 1


def map_trajectories(
    task: Callable[[int], T], ids: Sequence[int], workers: int | None = None
) -> list[T]:
    """Run ``task`` for every trajectory id and return results in id order.

    The worker count changes scheduling only; every trajectory owns the
    random stream keyed by its id.
    """
    count = resolve_workers(workers)
    if count == 1 or len(ids) <= 1:
        return [task(i) for i in ids]
    with ThreadPoolExecutor(max_workers=count) as pool:
        return list(pool.map(task, ids))


def busiest_window(setup: RunSetup) -> int:
    """Cover center whose window holds the most initial energy (lowest index on ties)."""
    return int(np.argmax(setup.cover.window_energies(setup.u0)))


class SimExperiment(BaseExperiment):
    """Experiment driven by a SimConfig, returning an ExperimentResult."""

    def validate_input(self, config: SimConfig, workers: int | None = None, **kwargs) -> None:
        if not isinstance(config, SimConfig):
            raise ConfigurationError(f"{self.name} expects a SimConfig, got {type(config).__name__}")
        if workers is not None and workers < 0:
            raise ConfigurationError(f"workers must be non-negative, got {workers}")
