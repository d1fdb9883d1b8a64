"""Pydantic models for workflow execution."""

from enum import Enum
from typing import Any

from pydantic import BaseModel, Field, field_validator


class StepStatus(str, Enum):
    """Status of a workflow step."""

    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"
    SKIPPED = "skipped"


class WorkflowStep(BaseModel):
    """One registered experiment run as part of a workflow."""

    name: str = Field(..., description="Name of the step")
    experiment: str = Field(..., description="Registered experiment to execute")
    inputs: dict[str, Any] = Field(
        default_factory=dict, description="Keyword inputs; '$' values are references"
    )
    depends_on: list[str] = Field(default_factory=list, description="Steps to complete first")
    condition: str | None = Field(
        default=None, description="'$step': run only if that step has a result"
    )

    @field_validator("condition")
    @classmethod
    def condition_is_reference(cls, value: str | None) -> str | None:
        if value is not None and not value.startswith("$"):
            raise ValueError(f"condition must be a '$step' reference, got {value!r}")
        return value


class WorkflowResult(BaseModel):
    """Result of a workflow execution."""

    workflow_name: str = Field(..., description="Name of the workflow")
    status: StepStatus = Field(..., description="Overall workflow status")
    steps: dict[str, dict[str, Any]] = Field(
        default_factory=dict, description="Status, result and error of each step"
    )
    final_result: Any | None = Field(default=None, description="Aggregated result")
    error: str | None = Field(default=None, description="Errors of the failed steps")

    @property
    def statuses(self) -> dict[str, str]:
        """Step name to status value, in execution order."""
        return {name: step["status"] for name, step in self.steps.items()}

    def steps_with(self, status: StepStatus) -> list[str]:
        return [name for name, value in self.statuses.items() if value == status.value]
