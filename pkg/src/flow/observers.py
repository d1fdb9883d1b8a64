"""Observer hooks called by the evolution loop at every sample."""

from typing import TYPE_CHECKING, Protocol

from src.torus.fields import VectorField3

if TYPE_CHECKING:
    from src.flow.integrator import FlowState


class StopEvolution(Exception):
    """Raised by an observer to end a trajectory early."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


class Observer(Protocol):
    """Callable notified with the state and the mutable sample dictionary."""

    def __call__(self, state: "FlowState", sample: dict[str, float]) -> None: ...


class SnapshotCollector:
    """Keeps the field at sample times.

    Args:
        every: Keep one of every ``every`` samples
        steps: Keep only samples whose step index is in this set
    """

    def __init__(self, every: int = 1, steps: set[int] | None = None):
        self.every = max(1, every)
        self.steps = steps
        self.fields: list[VectorField3] = []
        self.times: list[float] = []
        self.step_indices: list[int] = []
        self._seen = 0

    def __call__(self, state: "FlowState", sample: dict[str, float]) -> None:
        keep = state.step in self.steps if self.steps is not None else self._seen % self.every == 0
        self._seen += 1
        if keep:
            self.fields.append(state.u)
            self.times.append(state.t)
            self.step_indices.append(state.step)
