"""Core components for SLLG."""

from .exceptions import (
    ConfigurationError,
    ExperimentError,
    NumericalAbort,
    SllgError,
    WorkflowError,
)
from .experiment import BaseExperiment
from .logging import get_logger, setup_logging
from .metrics import MetricsCollector, get_metrics
from .registry import ExperimentRegistry, get_registry

__all__ = [
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
    "MetricsCollector",
    "get_metrics",
]
