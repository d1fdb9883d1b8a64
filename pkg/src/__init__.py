"""SLLG - Simulator and diagnostics for the stochastic harmonic map flow on the torus."""

from .__version__ import __version__
from .core import (
    BaseExperiment,
    ConfigurationError,
    ExperimentError,
    ExperimentRegistry,
    NumericalAbort,
    SllgError,
    WorkflowError,
    get_logger,
    get_metrics,
    get_registry,
    setup_logging,
)

__all__ = [
    "__version__",
    # Core
    "BaseExperiment",
    "ExperimentRegistry",
    "get_registry",
    "SllgError",
    "ConfigurationError",
    "ExperimentError",
    "NumericalAbort",
    "WorkflowError",
    "get_logger",
    "setup_logging",
    "get_metrics",
]
