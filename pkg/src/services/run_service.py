"""Service layer for running subcommands and writing their artifacts."""

from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

from src.config import get_settings
from src.core.exceptions import (
    ConfigurationError,
    InitialDataError,
    InsufficientEnsembleError,
    NumericalAbort,
    SllgError,
)
from src.core.logging import get_logger
from src.core.metrics import get_metrics
from src.core.registry import get_registry
from src.experiments import SUBCOMMANDS, register_experiments
from src.models.config import SimConfig
from src.models.experiment import ExperimentResult
from src.utils.artifacts import ArtifactWriter

logger = get_logger(__name__)


class ExitCode(IntEnum):
    OK = 0
    FAILED = 1
    CONFIG = 2
    NUMERICAL = 3


@dataclass
class RunOutcome:
    """Exit code, result and written files of one subcommand."""

    subcommand: str
    exit_code: ExitCode
    result: ExperimentResult | None = None
    output_dir: Path | None = None
    paths: list[Path] = field(default_factory=list)
    error: str | None = None


def exit_code_for(result: ExperimentResult) -> ExitCode:
    return ExitCode.OK if result.passed else ExitCode.FAILED


class RunService:
    """Runs registered experiments and maps their outcome to exit codes.

    0 for success, 1 for a failed verdict or a too-small ensemble, 2 for
    configuration and initial-data errors, 3 for numerical aborts.
    """

    def __init__(self):
        """Initialize the run service."""
        register_experiments()
        self.registry = get_registry()

    def output_dir(self, subcommand: str, config: SimConfig, output: str | Path | None) -> Path:
        if output is not None:
            return Path(output)
        if config.output.dir is not None:
            return Path(config.output.dir)
        return Path(get_settings().output_dir) / subcommand

    def run(
        self,
        subcommand: str,
        config: SimConfig,
        workers: int | None = None,
        output: str | Path | None = None,
        write: bool = True,
    ) -> RunOutcome:
        """Execute ``subcommand`` and write its artifacts.

        Args:
            subcommand: One of :data:`src.experiments.SUBCOMMANDS`
            config: Resolved configuration
            workers: Ensemble parallelism degree; None uses settings
            output: Run directory overriding ``output.dir``
            write: Write artifacts to disk

        Returns:
            RunOutcome with the exit code
        """
        if subcommand not in SUBCOMMANDS:
            return RunOutcome(
                subcommand, ExitCode.CONFIG, error=f"Unknown subcommand {subcommand!r}"
            )
        experiment = self.registry.get_instance(subcommand)
        before = get_metrics().snapshot()
        try:
            result = experiment.execute(config, workers=workers)
        except (ConfigurationError, InitialDataError) as e:
            return RunOutcome(subcommand, ExitCode.CONFIG, error=str(e))
        except NumericalAbort as e:
            return RunOutcome(subcommand, ExitCode.NUMERICAL, error=str(e))
        except InsufficientEnsembleError as e:
            return RunOutcome(subcommand, ExitCode.FAILED, error=str(e))
        except SllgError as e:
            return RunOutcome(subcommand, ExitCode.FAILED, error=f"{type(e).__name__}: {e}")

        outcome = RunOutcome(subcommand, exit_code_for(result), result=result)
        if write:
            outcome.output_dir = self.output_dir(subcommand, config, output)
            outcome.paths = ArtifactWriter(outcome.output_dir).write(subcommand, config, result)
        counts = ", ".join(f"{name}={value}" for name, value in get_metrics().since(before).items())
        logger.info(f"{subcommand} finished with exit code {int(outcome.exit_code)} ({counts})")
        return outcome
