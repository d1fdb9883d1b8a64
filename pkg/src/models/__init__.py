"""Data models for SLLG."""

from .config import SimConfig
from .experiment import CheckResult, ExperimentResult
from .workflow import StepStatus, WorkflowResult, WorkflowStep

__all__ = [
    "SimConfig",
    "CheckResult",
    "ExperimentResult",
    "StepStatus",
    "WorkflowStep",
    "WorkflowResult",
]
