"""Time stepping of the stochastic harmonic map flow.

The Itô form du = (Δu + u|∇u|² + F_φu)dt + u×dW is advanced by one of the
rules in :mod:`src.flow.scheme`, followed by a collapse check and optional
projection back onto the sphere.
"""

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Any

import numpy as np

from src.core.exceptions import (
    ConfigurationError,
    GridMismatchError,
    NonFiniteError,
    NormCollapseError,
    NumericalAbort,
)
from src.core.logging import get_logger
from src.core.metrics import get_metrics
from src.flow.observers import Observer, StopEvolution
from src.flow.scheme import StepScheme, advance, tension
from src.noise.model import NoiseIncrement, NoiseModel, trajectory_rng
from src.torus.fields import VectorField3
from src.torus.spectral import gradient, laplacian, lp_norm

if TYPE_CHECKING:
    from src.bubble.cover import BallCover

logger = get_logger(__name__)

COLLAPSE_THRESHOLD = 0.5

SERIES_NAMES = (
    "energy",
    "tension_integral",
    "gain",
    "qv",
    "grad_l4_4",
    "laplacian_sq",
    "grad_sq_integral",
    "laplacian_integral",
    "sphere_defect",
)


@dataclass(frozen=True)
class FlowState:
    """Instantaneous state of one trajectory.

    Attributes:
        u: Current field
        dt: Time step of the clock
        step: Number of accepted steps; t = step·dt exactly
        rng: Random stream owned by this trajectory
        restart_step: Step index of the last restart, if any
    """

    u: VectorField3
    dt: float
    step: int = 0
    rng: np.random.Generator | None = field(default=None, compare=False, repr=False)
    restart_step: int | None = None

    @property
    def t(self) -> float:
        return self.step * self.dt


@dataclass
class TrajectoryRecord:
    """Sampled scalar diagnostics of one trajectory plus its event ledger."""

    trajectory_id: int
    dt: float
    record_stride: int
    times: list[float] = field(default_factory=list)
    series: dict[str, list[float]] = field(default_factory=dict)
    events: list[Any] = field(default_factory=list)
    stop_reason: str | None = None
    stop_time: float | None = None
    final_state: FlowState | None = field(default=None, compare=False, repr=False)

    def append(self, t: float, sample: dict[str, float]) -> None:
        self.times.append(t)
        for name, value in sample.items():
            self.series.setdefault(name, []).append(float(value))

    def values(self, name: str) -> np.ndarray:
        """Series ``name`` as an array aligned with ``times``."""
        return np.asarray(self.series[name], dtype=float)

    def rows(self) -> Iterable[tuple[int, float, str, float]]:
        """(traj_id, t, quantity, value) rows in time-major, name-sorted order."""
        names = sorted(self.series)
        for index, t in enumerate(self.times):
            for name in names:
                values = self.series[name]
                if index < len(values):
                    yield (self.trajectory_id, t, name, values[index])


def energy(u: VectorField3) -> float:
    """Dirichlet energy ½Σ_i‖∇u^i‖²."""
    return 0.5 * lp_norm(gradient(u), 2) ** 2


def step(
    state: FlowState,
    model: NoiseModel,
    scheme: StepScheme,
    increment: NoiseIncrement | None = None,
) -> FlowState:
    """Advance one step.

    Args:
        state: Current state; its ``rng`` is consumed unless ``increment`` is given
        model: Noise model on the state's grid
        scheme: Step rule
        increment: Pre-drawn increment, shared by coupled trajectories

    Returns:
        The next state with ``step`` incremented

    Raises:
        NonFiniteError: If the update produced NaN or Inf
        NormCollapseError: If min|u| < 1/2 before projection
    """
    if increment is None:
        if state.rng is None:
            raise ConfigurationError("FlowState has no random stream and no increment was given")
        increment = model.sample_increment(scheme.dt, state.rng)

    index = state.step + 1
    try:
        values = advance(state.u, increment.dW, model, scheme)
    except NonFiniteError as e:
        raise NonFiniteError("Non-finite predictor", step=index) from e

    if not np.all(np.isfinite(values)):
        raise NonFiniteError("Non-finite values after update", step=index)
    magnitude = np.sqrt(np.sum(values**2, axis=0))
    smallest = float(np.min(magnitude))
    if smallest < COLLAPSE_THRESHOLD:
        raise NormCollapseError(f"min|u| = {smallest:.3e} below {COLLAPSE_THRESHOLD}", step=index)
    if scheme.projection:
        values = values / magnitude[None]

    return replace(state, u=VectorField3(state.u.grid, values), step=index)


class DiagnosticAccumulator:
    """Left-point time integrals and per-sample diagnostics of one trajectory."""

    def __init__(self, model: NoiseModel, scheme: StepScheme, cover: "BallCover | None"):
        self.model = model
        self.scheme = scheme
        self.cover = cover
        self.c_phi = model.c_phi
        self.noisy = bool(np.any(model.lambdas))
        self.tension_integral = 0.0
        self.qv = 0.0
        self.grad_sq_integral = 0.0
        self.laplacian_integral = 0.0
        self.current: dict[str, float] | None = None

    def _pointwise(self, u: VectorField3) -> dict[str, float]:
        grad = gradient(u)
        lap = laplacian(u)
        return {
            "energy": 0.5 * lp_norm(grad, 2) ** 2,
            "tension_sq": lp_norm(tension(u), 2) ** 2,
            "qv_rate": self.model.qv_rate(u) if self.noisy else 0.0,
            "grad_l4_4": lp_norm(grad, 4) ** 4,
            "laplacian_sq": lp_norm(lap, 2) ** 2,
        }

    def observe(self, u: VectorField3) -> None:
        self.current = self._pointwise(u)

    def integrate(self) -> None:
        """Add dt times the integrands at the current (left) point."""
        assert self.current is not None
        dt = self.scheme.dt
        self.tension_integral += dt * self.current["tension_sq"]
        self.qv += dt * self.current["qv_rate"]
        self.grad_sq_integral += dt * 2.0 * self.current["energy"]
        self.laplacian_integral += dt * self.current["laplacian_sq"]

    def sample(self, state: FlowState) -> dict[str, float]:
        assert self.current is not None
        current = self.current
        values = {
            "energy": current["energy"],
            "tension_integral": self.tension_integral,
            "gain": current["energy"] - self.c_phi * state.t,
            "qv": self.qv,
            "grad_l4_4": current["grad_l4_4"],
            "laplacian_sq": current["laplacian_sq"],
            "grad_sq_integral": self.grad_sq_integral,
            "laplacian_integral": self.laplacian_integral,
            "sphere_defect": state.u.sphere_defect(),
        }
        if self.cover is not None:
            values["local_energy_sup"] = self.cover.local_energy_sup(state.u)[0]
        return values


def step_count(T: float, dt: float) -> int:
    """Number of steps covering [0, T]; T/dt must be integral."""
    if not T > 0:
        raise ConfigurationError(f"Final time must be positive, got {T}")
    count = int(round(T / dt))
    if count < 1 or abs(count * dt - T) > 1e-9 * max(T, 1.0):
        raise ConfigurationError(f"T/dt must be integral, got T={T}, dt={dt}")
    return count


def notify_observers(observers: Sequence[Observer], state: FlowState, sample: dict[str, float]) -> str | None:
    for observer in observers:
        try:
            observer(state, sample)
        except StopEvolution as stop:
            return stop.reason
    return None


def evolve(
    u0: VectorField3,
    model: NoiseModel,
    scheme: StepScheme,
    T: float,
    *observers: Observer,
    record_stride: int = 1,
    rng: np.random.Generator | None = None,
    cover: "BallCover | None" = None,
    trajectory_id: int = 0,
    master_seed: int = 0,
) -> TrajectoryRecord:
    """Integrate one trajectory on [0, T].

    Samples are taken at t = 0 and every ``record_stride`` steps, including
    T, so a full run has T/(dt·stride) + 1 samples. Observers see each
    sample and may add values to it or stop the run by raising
    :class:`StopEvolution`.

    Args:
        u0: Initial field
        model: Noise model
        scheme: Step rule
        T: Final time, an integer multiple of ``scheme.dt``
        *observers: Callables ``(state, sample)``
        record_stride: Steps between samples
        rng: Random stream; defaults to the (master_seed, trajectory_id) stream
        cover: Ball cover, adds the ``local_energy_sup`` series when given
        trajectory_id: Id recorded in the output rows
        master_seed: Seed of the default stream

    Returns:
        The sampled TrajectoryRecord

    Raises:
        NumericalAbort: Propagated from :func:`step` with the step index
    """
    if record_stride < 1:
        raise ConfigurationError(f"record_stride must be at least 1, got {record_stride}")
    if model.grid != u0.grid:
        raise GridMismatchError("Initial data and noise model live on different grids")
    total = step_count(T, scheme.dt)
    state = FlowState(
        u=u0,
        dt=scheme.dt,
        rng=rng if rng is not None else trajectory_rng(master_seed, trajectory_id),
    )
    record = TrajectoryRecord(trajectory_id=trajectory_id, dt=scheme.dt, record_stride=record_stride)
    accumulator = DiagnosticAccumulator(model, scheme, cover)
    metrics = get_metrics()
    extra = {"trajectory_id": trajectory_id}
    logger.debug(f"Evolving trajectory {trajectory_id} for {total} steps", extra=extra)

    accumulator.observe(state.u)
    sample = accumulator.sample(state)
    reason = notify_observers(observers, state, sample)
    record.append(state.t, sample)

    try:
        while reason is None and state.step < total:
            accumulator.integrate()
            state = step(state, model, scheme)
            accumulator.observe(state.u)
            if state.step % record_stride == 0 or state.step == total:
                sample = accumulator.sample(state)
                reason = notify_observers(observers, state, sample)
                record.append(state.t, sample)
    except NumericalAbort as e:
        metrics.increment("flow.aborts", tags={"error_type": type(e).__name__})
        logger.error(f"Trajectory {trajectory_id} aborted: {e}", extra={**extra, "step": e.step})
        raise

    if reason is not None:
        record.stop_reason = reason
        record.stop_time = state.t
        logger.debug(f"Trajectory {trajectory_id} stopped: {reason}", extra={**extra, "t": state.t})
    record.final_state = state
    metrics.increment("flow.trajectories")
    metrics.increment("flow.steps", value=state.step)
    return record


@dataclass
class CoupledRecord:
    """Two trajectories driven by the same noise path and their difference.

    Attributes:
        first: Record of the trajectory started at u0
        second: Record of the trajectory started at v0
        times: Sample times
        difference: d(t) = ½‖u − v‖²
        exponent: I(t) = ∫₀ᵗ(‖∇u‖⁴_{L⁴} + ‖∇v‖⁴_{L⁴} + 1)ds
        budget: B(t) = C∫₀ᵗ(‖∇u‖⁴_{L⁴} + ‖∇v‖⁴_{L⁴} + 1)d(s)ds
        constant: C used for ``budget``
    """

    first: TrajectoryRecord
    second: TrajectoryRecord
    times: list[float] = field(default_factory=list)
    difference: list[float] = field(default_factory=list)
    exponent: list[float] = field(default_factory=list)
    budget: list[float] = field(default_factory=list)
    constant: float = 1.0


def _half_distance_sq(u: VectorField3, v: VectorField3) -> float:
    return 0.5 * float(np.sum((u.values - v.values) ** 2) * u.grid.area)


def coupled_evolve(
    u0: VectorField3,
    v0: VectorField3,
    model: NoiseModel,
    scheme: StepScheme,
    T: float,
    record_stride: int = 1,
    rng: np.random.Generator | None = None,
    constant: float = 1.0,
    trajectory_id: int = 0,
    master_seed: int = 0,
) -> CoupledRecord:
    """Evolve two initial data on a common stochastic basis.

    Both trajectories consume the identical increment sequence, drawn once
    per step from ``rng``.

    Raises:
        GridMismatchError: If u0 and v0 live on different grids
    """
    if u0.grid != v0.grid:
        raise GridMismatchError(f"Coupled data live on grids n={u0.grid.n} and n={v0.grid.n}")
    total = step_count(T, scheme.dt)
    stream = rng if rng is not None else trajectory_rng(master_seed, trajectory_id)
    first = FlowState(u=u0, dt=scheme.dt)
    second = FlowState(u=v0, dt=scheme.dt)
    accumulators = (DiagnosticAccumulator(model, scheme, None), DiagnosticAccumulator(model, scheme, None))
    records = (
        TrajectoryRecord(trajectory_id=trajectory_id, dt=scheme.dt, record_stride=record_stride),
        TrajectoryRecord(trajectory_id=trajectory_id, dt=scheme.dt, record_stride=record_stride),
    )
    coupled = CoupledRecord(first=records[0], second=records[1], constant=constant)
    exponent = 0.0
    budget = 0.0

    def sample(d: float) -> None:
        for accumulator, record, state in zip(accumulators, records, (first, second)):
            record.append(state.t, accumulator.sample(state))
        coupled.times.append(first.t)
        coupled.difference.append(d)
        coupled.exponent.append(exponent)
        coupled.budget.append(budget)

    for accumulator, state in zip(accumulators, (first, second)):
        accumulator.observe(state.u)
    d = _half_distance_sq(first.u, second.u)
    sample(d)

    while first.step < total:
        rate = accumulators[0].current["grad_l4_4"] + accumulators[1].current["grad_l4_4"] + 1.0
        exponent += scheme.dt * rate
        budget += scheme.dt * constant * rate * d
        for accumulator in accumulators:
            accumulator.integrate()
        increment = model.sample_increment(scheme.dt, stream)
        first = step(first, model, scheme, increment)
        second = step(second, model, scheme, increment)
        for accumulator, state in zip(accumulators, (first, second)):
            accumulator.observe(state.u)
        d = _half_distance_sq(first.u, second.u)
        if first.step % record_stride == 0 or first.step == total:
            sample(d)

    records[0].final_state = first
    records[1].final_state = second
    get_metrics().increment("flow.trajectories", value=2)
    get_metrics().increment("flow.steps", value=2 * first.step)
    return coupled


def fit_gronwall_constant(coupled: CoupledRecord) -> float:
    """Smallest C with d(t) ≤ d(0)·exp(C·I(t)) at every sample."""
    d0 = coupled.difference[0]
    if d0 <= 0.0:
        return 0.0
    best = 0.0
    for d, exponent in zip(coupled.difference[1:], coupled.exponent[1:]):
        if d > d0 and exponent > 0.0:
            best = max(best, math.log(d / d0) / exponent)
    return best


def check_gronwall_bound(coupled: CoupledRecord, constant: float, rtol: float = 1e-12) -> bool:
    """Whether d(t) ≤ d(0)·exp(C·I(t)) holds at every sample."""
    d0 = coupled.difference[0]
    return all(
        d <= d0 * math.exp(constant * exponent) * (1.0 + rtol)
        for d, exponent in zip(coupled.difference, coupled.exponent)
    )
