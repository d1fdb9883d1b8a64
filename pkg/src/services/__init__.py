"""Service layer for SLLG."""

from .run_service import ExitCode, RunOutcome, RunService

__all__ = ["ExitCode", "RunOutcome", "RunService"]
