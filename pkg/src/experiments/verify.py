"""The verify subcommand: the acceptance workflow as one experiment."""

from src.core.exceptions import ConfigurationError, InitialDataError, NumericalAbort
from src.experiments.common import SimExperiment
from src.models.config import SimConfig
from src.models.experiment import ExperimentResult
from src.models.workflow import StepStatus
from src.workflows.acceptance import AcceptanceWorkflow

FATAL_ERRORS = (ConfigurationError, InitialDataError, NumericalAbort)


class VerifyExperiment(SimExperiment):
    """Runs every acceptance check and collects their verdicts.

    Configuration errors and numerical aborts inside a step end the run
    instead of turning into failed verdicts.
    """

    def __init__(self):
        super().__init__(name="verify")

    def _execute(self, config: SimConfig, workers: int | None = None, **kwargs) -> ExperimentResult:
        workflow = AcceptanceWorkflow()
        outcome = workflow.execute({"config": config, "workers": workers})
        for error in workflow.errors.values():
            if isinstance(error, FATAL_ERRORS):
                raise error

        tables: dict[str, list[dict]] = {}
        extras: dict = {"steps": outcome.statuses}
        skipped = outcome.steps_with(StepStatus.SKIPPED)
        if skipped:
            self.logger.warning(f"Skipped acceptance steps: {skipped}")
        for result in workflow.results.values():
            if isinstance(result, ExperimentResult):
                tables.update(result.tables)
                extras.update(result.extras)
        pilot = workflow.results.get("pilot")
        if pilot is not None:
            extras["pilot"] = pilot["pilot"].to_dict()
        ensemble = workflow.results.get("ensemble")
        if ensemble is not None:
            extras["window_center"] = ensemble.center
            extras["c_phi"] = ensemble.setup.model.c_phi

        return ExperimentResult(
            experiment=self.name,
            verdicts=outcome.final_result or [],
            tables=tables,
            extras=extras,
        )
