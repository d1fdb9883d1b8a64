"""Workflow orchestration for SLLG."""

from .acceptance import AcceptanceWorkflow
from .workflow import Workflow, WorkflowStep

__all__ = [
    "Workflow",
    "WorkflowStep",
    "AcceptanceWorkflow",
]
