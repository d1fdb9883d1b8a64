"""Acceptance workflow behind the verify subcommand."""

from src.models.experiment import CheckResult, ExperimentResult
from src.workflows.workflow import Workflow


class AcceptanceWorkflow(Workflow):
    """Pilot, shared ensemble, then every acceptance check.

    A check whose step failed or was skipped contributes a failed verdict
    named after the step, so the aggregate always lists every criterion.
    """

    def __init__(self):
        """Initialize the acceptance workflow."""
        super().__init__("acceptance")

        # Register experiments if not already registered
        from src.experiments import register_experiments
        from src.experiments.acceptance import ACCEPTANCE_CHECKS

        register_experiments()
        base = {"config": "$config", "workers": "$workers"}

        self.add_step(name="pilot", experiment="pilot", inputs=dict(base)).add_step(
            name="ensemble",
            experiment="ensemble-run",
            inputs={**base, "eps1": "$pilot.eps1"},
            depends_on=["pilot"],
        )
        for check in ACCEPTANCE_CHECKS:
            self.add_step(
                name=check.criterion,
                experiment=f"check.{check.criterion}",
                inputs={**base, **check.inputs},
                depends_on=list(check.depends_on),
            )

    def _aggregate_results(self) -> list[CheckResult]:
        """Verdicts of every check step in step order."""
        verdicts: list[CheckResult] = []
        for step in self.steps:
            if not step.experiment.startswith("check."):
                continue
            result = self.results.get(step.name)
            if isinstance(result, ExperimentResult):
                verdicts.extend(result.verdicts)
            elif step.name in self.errors:
                error = self.errors[step.name]
                verdicts.append(
                    CheckResult(
                        name=step.name,
                        passed=False,
                        statistics={"error": type(error).__name__},
                        message=str(error),
                    )
                )
            else:
                verdicts.append(
                    CheckResult(
                        name=step.name,
                        passed=False,
                        statistics={"error": "skipped"},
                        message=f"skipped: {', '.join(step.depends_on)} did not complete",
                    )
                )
        return verdicts
