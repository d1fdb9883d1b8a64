"""Pydantic models for experiment outputs and verdicts."""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field


class CheckResult(BaseModel):
    """Verdict of one statistical or deterministic check."""

    name: str = Field(..., description="Name of the check")
    passed: bool = Field(..., description="Whether the check passed")
    statistics: dict[str, Any] = Field(
        default_factory=dict, description="Raw numbers behind the verdict"
    )
    message: str | None = Field(default=None, description="Short explanation")


class ExperimentResult(BaseModel):
    """Everything an experiment produced, ready to be written as artifacts."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    experiment: str = Field(..., description="Name of the experiment that ran")
    verdicts: list[CheckResult] = Field(default_factory=list, description="Check verdicts")
    records: list[Any] = Field(
        default_factory=list, description="TrajectoryRecords written to series.csv"
    )
    ledger: list[dict[str, Any]] = Field(
        default_factory=list, description="Blow-up events written to ledger.jsonl"
    )
    tables: dict[str, list[dict[str, Any]]] = Field(
        default_factory=dict, description="Named CSV tables, e.g. wente or helein"
    )
    snapshots: dict[str, Any] = Field(
        default_factory=dict, description="Snapshot file stem to field"
    )
    extras: dict[str, Any] = Field(
        default_factory=dict, description="Values echoed in the manifest"
    )

    @property
    def passed(self) -> bool:
        return all(verdict.passed for verdict in self.verdicts)

    def verdict(self, name: str) -> CheckResult:
        for verdict in self.verdicts:
            if verdict.name == name:
                return verdict
        raise KeyError(name)
