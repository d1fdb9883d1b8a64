"""Time integration of the stochastic harmonic map flow."""

from .initial import InitialKind, make_initial
from .integrator import (
    CoupledRecord,
    DiagnosticAccumulator,
    FlowState,
    TrajectoryRecord,
    check_gronwall_bound,
    coupled_evolve,
    energy,
    evolve,
    fit_gronwall_constant,
    step,
    step_count,
)
from .observers import Observer, SnapshotCollector, StopEvolution
from .scheme import SchemeKind, StepScheme, drift, harmonic_nonlinearity, tension

__all__ = [
    "SchemeKind",
    "StepScheme",
    "FlowState",
    "TrajectoryRecord",
    "CoupledRecord",
    "DiagnosticAccumulator",
    "Observer",
    "SnapshotCollector",
    "StopEvolution",
    "tension",
    "drift",
    "harmonic_nonlinearity",
    "energy",
    "step",
    "step_count",
    "evolve",
    "coupled_evolve",
    "fit_gronwall_constant",
    "check_gronwall_bound",
    "InitialKind",
    "make_initial",
]
