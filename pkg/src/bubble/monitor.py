"""Stopping-time detection, restarts and the blow-up ledger."""

from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, replace

import numpy as np

from src.bubble.cover import BallCover, gradient_density
from src.core.exceptions import BubbleError
from src.core.logging import get_logger
from src.core.metrics import get_metrics
from src.flow.integrator import (
    DiagnosticAccumulator,
    FlowState,
    TrajectoryRecord,
    energy,
    notify_observers,
    step,
    step_count,
)
from src.flow.observers import Observer, StopEvolution
from src.flow.scheme import StepScheme
from src.noise.model import NoiseModel, trajectory_rng
from src.torus.fields import VectorField3
from src.torus.spectral import low_pass, project_to_sphere

logger = get_logger(__name__)

RESTART_SURROGATE = "low_pass_projection"


@dataclass(frozen=True)
class BlowupEvent:
    """One restart of the flow after local energy concentration.

    Attributes:
        time: ϑ
        step: Step index of the restart
        center: Cover center that triggered
        local_energy: Local energy at the trigger (≥ ε₁)
        energy_pre: E(ϑ−)
        energy_post: E(ϑ+) after the restart surrogate
        drop: energy_pre − energy_post
        quantum: Whether drop ≥ ε₁
        detection_stride: Steps between detector evaluations
        surrogate: Name of the grid-level restart construction
    """

    time: float
    step: int
    center: tuple[float, float] | None
    local_energy: float | None
    energy_pre: float
    energy_post: float
    drop: float
    quantum: bool
    detection_stride: int = 1
    surrogate: str = RESTART_SURROGATE

    def to_dict(self) -> dict:
        data = asdict(self)
        data["center"] = list(self.center) if self.center is not None else None
        return data


def detect_stop(fields: Iterable[VectorField3], cover: BallCover, eps1: float, mode: str = "smooth") -> int | None:
    """Index of the first field whose local energy reaches ε₁, or None.

    Raises:
        BubbleError: If ε₁ ≤ 0
    """
    if not eps1 > 0:
        raise BubbleError(f"eps1 must be positive, got {eps1}")
    for index, u in enumerate(fields):
        if cover.local_energy_sup(u, mode)[0] >= eps1:
            return index
    return None


def restart(
    state: FlowState,
    restart_cutoff: float,
    ledger: list[BlowupEvent] | None = None,
    eps1: float | None = None,
    trigger: tuple[float, tuple[float, float]] | None = None,
    detection_stride: int = 1,
) -> FlowState:
    """Low-pass u(ϑ) below ``restart_cutoff`` and re-project onto the sphere.

    A state produced by a restart with no step in between is returned
    unchanged and nothing is appended to the ledger.

    Args:
        state: State at the stopping time ϑ
        restart_cutoff: Euclidean mode cutoff K_restart
        ledger: Event list the BlowupEvent is appended to
        eps1: Threshold for the energy-quantum flag
        trigger: (local energy, center) reported by the detector
        detection_stride: Recorded so that detection latency is auditable

    Returns:
        State with the restart data and the clock unchanged
    """
    if state.restart_step == state.step:
        return state
    restarted = project_to_sphere(low_pass(state.u, restart_cutoff))
    energy_pre = energy(state.u)
    energy_post = energy(restarted)
    local_energy, center = trigger if trigger is not None else (None, None)
    drop = energy_pre - energy_post
    event = BlowupEvent(
        time=state.t,
        step=state.step,
        center=center,
        local_energy=None if local_energy is None else float(local_energy),
        energy_pre=energy_pre,
        energy_post=energy_post,
        drop=drop,
        quantum=bool(eps1 is not None and drop >= eps1),
        detection_stride=detection_stride,
    )
    if ledger is not None:
        ledger.append(event)
    get_metrics().increment("bubble.events")
    logger.info(
        f"Restart at t={state.t:.6g}: energy {energy_pre:.6g} -> {energy_post:.6g}",
        extra={"step": state.step, "t": state.t},
    )
    return replace(state, u=restarted, restart_step=state.step)


def run_with_restarts(
    u0: VectorField3,
    model: NoiseModel,
    scheme: StepScheme,
    T: float,
    cover: BallCover,
    eps1: float,
    restart_cutoff: float = 8,
    max_restarts: int = 8,
    observers: Sequence[Observer] = (),
    record_stride: int = 1,
    detection_stride: int = 1,
    rng: np.random.Generator | None = None,
    trajectory_id: int = 0,
    master_seed: int = 0,
) -> TrajectoryRecord:
    """Evolve with detect → restart → continue until T.

    The detector runs on the initial data and every ``detection_stride``
    steps; data above ε₁ at t = 0 are restarted at ϑ = 0. After a restart it
    is disarmed until the local energy falls back below ε₁. Reaching ε₁
    again once ``max_restarts`` events are logged stops the trajectory.
    """
    if not eps1 > 0:
        raise BubbleError(f"eps1 must be positive, got {eps1}")
    total = step_count(T, scheme.dt)
    state = FlowState(
        u=u0,
        dt=scheme.dt,
        rng=rng if rng is not None else trajectory_rng(master_seed, trajectory_id),
    )
    record = TrajectoryRecord(trajectory_id=trajectory_id, dt=scheme.dt, record_stride=record_stride)
    accumulator = DiagnosticAccumulator(model, scheme, cover)
    armed = True
    reason: str | None = None

    def detect(state: FlowState) -> FlowState:
        nonlocal armed, reason
        trigger = cover.local_energy_sup(state.u)
        if trigger[0] < eps1:
            armed = True
        elif armed and len(record.events) >= max_restarts:
            reason = f"max_restarts={max_restarts} reached"
        elif armed:
            state = restart(state, restart_cutoff, record.events, eps1, trigger, detection_stride)
            armed = False
        return state

    state = detect(state)
    accumulator.observe(state.u)
    sample = accumulator.sample(state)
    reason = notify_observers(observers, state, sample) or reason
    record.append(state.t, sample)

    while reason is None and state.step < total:
        accumulator.integrate()
        state = step(state, model, scheme)
        if state.step % detection_stride == 0:
            state = detect(state)
        accumulator.observe(state.u)

        if state.step % record_stride == 0 or state.step == total or reason is not None:
            sample = accumulator.sample(state)
            reason = notify_observers(observers, state, sample) or reason
            record.append(state.t, sample)

    if reason is not None:
        record.stop_reason = reason
        record.stop_time = state.t
    record.final_state = state
    get_metrics().increment("flow.trajectories")
    get_metrics().increment("flow.steps", value=state.step)
    return record


def count_events(ledger: Sequence[BlowupEvent], t: float) -> int:
    """N_t: number of events with ϑ < t."""
    return sum(1 for event in ledger if event.time < t)


@dataclass(frozen=True)
class BoundVerdict:
    """Comparison of the mean event count against (2E₀ + c_φT)/ε₁."""

    mean_count: float
    bound: float
    passed: bool


def bound_check(
    ledgers: Sequence[Sequence[BlowupEvent]],
    initial_energy: float,
    c_phi: float,
    T: float,
    eps1: float,
) -> BoundVerdict:
    """Check E[N_T] ≤ (2E₀ + c_φT)/ε₁ with the ensemble mean of N_T."""
    if not eps1 > 0:
        raise BubbleError(f"eps1 must be positive, got {eps1}")
    counts = [count_events(ledger, T) for ledger in ledgers] or [0]
    mean_count = float(np.mean(counts))
    bound = (2.0 * initial_energy + c_phi * T) / eps1
    return BoundVerdict(mean_count=mean_count, bound=bound, passed=mean_count <= bound)


class BubbleObserver:
    """Raises StopEvolution at the stopping time ζ(u, ϱ; ε₁)."""

    def __init__(self, cover: BallCover, eps1: float, mode: str = "smooth"):
        if not eps1 > 0:
            raise BubbleError(f"eps1 must be positive, got {eps1}")
        self.cover = cover
        self.eps1 = eps1
        self.mode = mode

    def __call__(self, state: FlowState, sample: dict[str, float]) -> None:
        if self.mode == "smooth" and "local_energy_sup" in sample:
            value = sample["local_energy_sup"]
        else:
            value = self.cover.local_energy_sup(state.u, self.mode)[0]
        if value >= self.eps1:
            raise StopEvolution(f"local energy {value:.6g} reached eps1={self.eps1:.6g}")


class WindowEnergyObserver:
    """Adds ``window_energy`` = ½‖η∇u‖² for one window to each sample."""

    def __init__(self, cover: BallCover, center: int = 0):
        self.window = cover.window.at(tuple(int(i) for i in cover.indices[center]))

    def __call__(self, state: FlowState, sample: dict[str, float]) -> None:
        density = gradient_density(state.u)
        sample["window_energy"] = 0.5 * float(
            np.sum(self.window.values**2 * density) * state.u.grid.area
        )
