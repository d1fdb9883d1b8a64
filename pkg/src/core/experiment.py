"""Common lifecycle of subcommands, workflow steps and acceptance checks."""

from abc import ABC, abstractmethod
from typing import Any

from src.core.exceptions import ExperimentError, SllgError
from src.core.logging import get_logger
from src.core.metrics import get_metrics


class BaseExperiment(ABC):
    """One unit of numerical work: a trajectory, an ensemble or a verdict set.

    ``execute`` validates the inputs, runs ``_execute`` and times it under
    ``experiment.duration``. Domain failures (``SllgError``, e.g. a numerical
    abort or a too-small ensemble) reach the caller unchanged so they can be
    mapped to exit codes; any other exception becomes an ``ExperimentError``.
    """

    def __init__(self, name: str | None = None):
        self.name = name or self.__class__.__name__
        self.logger = get_logger(f"experiment.{self.name}")
        self.metrics = get_metrics()

    def execute(self, *args: Any, **kwargs: Any) -> Any:
        """Run the experiment.

        Returns:
            Whatever ``_execute`` produced, usually an ExperimentResult

        Raises:
            SllgError: Configuration, initial-data and numerical failures
            ExperimentError: Anything else raised while running
        """
        context = {"experiment": self.name}
        self.logger.info(f"Running {self.name}", extra=context)
        self.metrics.increment("experiment.executions", tags=context)

        try:
            with self.metrics.timed("experiment.duration", context):
                self.validate_input(*args, **kwargs)
                result = self._execute(*args, **kwargs)
        except Exception as e:
            self.metrics.increment(
                "experiment.errors", tags={**context, "error_type": type(e).__name__}
            )
            self.logger.error(f"{self.name} failed: {e}", extra=context, exc_info=True)
            if isinstance(e, SllgError):
                raise
            raise ExperimentError(f"Experiment {self.name} failed: {e}") from e

        self.logger.info(f"{self.name} finished", extra=context)
        return result

    @abstractmethod
    def _execute(self, *args: Any, **kwargs: Any) -> Any:
        """Integrate, sample or check; subclasses hold the numerics here."""

    def validate_input(self, *args: Any, **kwargs: Any) -> None:
        """Reject unusable inputs before any step is taken.

        Raises:
            ConfigurationError: If the inputs cannot describe a run
        """
