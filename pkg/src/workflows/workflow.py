"""Workflow engine: registered experiments run as dependent steps."""

from typing import Any

from src.core.exceptions import WorkflowError
from src.core.logging import get_logger
from src.core.metrics import get_metrics
from src.core.registry import get_registry
from src.models.workflow import StepStatus, WorkflowResult, WorkflowStep

_MISSING = object()


class Workflow:
    """Base class for workflow orchestration.

    Steps run in dependency order. A failing step is marked FAILED and its
    exception kept in ``errors``; steps depending on it are SKIPPED while
    independent steps still run.
    """

    def __init__(self, name: str):
        self.name = name
        self.steps: list[WorkflowStep] = []
        self.results: dict[str, Any] = {}
        self.errors: dict[str, Exception] = {}
        self.registry = get_registry()
        self.logger = get_logger(f"workflow.{name}")
        self.metrics = get_metrics()

    def add_step(
        self,
        name: str,
        experiment: str,
        inputs: dict[str, Any] | None = None,
        depends_on: list[str] | None = None,
        condition: str | None = None,
    ) -> "Workflow":
        """Add a step to the workflow.

        Args:
            name: Name of the step, unique within the workflow
            experiment: Registered experiment to execute
            inputs: Input parameters; ``$name`` refers to an initial input and
                ``$step.field`` to a field of an earlier step's result
            depends_on: Names of steps this step depends on
            condition: ``$step`` runs this step only if that step produced a result

        Returns:
            Self for method chaining

        Raises:
            WorkflowError: If the workflow already has a step called ``name``
        """
        if any(step.name == name for step in self.steps):
            raise WorkflowError(f"Workflow {self.name} already has a step named '{name}'")
        self.steps.append(
            WorkflowStep(
                name=name,
                experiment=experiment,
                inputs=inputs or {},
                depends_on=depends_on or [],
                condition=condition,
            )
        )
        return self

    def execute(self, initial_inputs: dict[str, Any] | None = None) -> WorkflowResult:
        """Run every step and collect per-step statuses and results.

        A failing step never raises out of here. Unknown or circular
        dependencies fail the whole workflow before any step runs.
        """
        self.logger.info(f"Starting workflow: {self.name}")
        self.metrics.increment("workflow.started", tags={"workflow": self.name})

        initial_inputs = initial_inputs or {}
        self.results = {}
        self.errors = {}
        statuses: dict[str, StepStatus] = {}

        try:
            order = self._get_execution_order()
        except WorkflowError as e:
            self.logger.error(f"Workflow {self.name} failed: {str(e)}")
            return WorkflowResult(workflow_name=self.name, status=StepStatus.FAILED, error=str(e))

        for step in order:
            statuses[step.name] = self._run_step(step, statuses, initial_inputs)

        if StepStatus.FAILED in statuses.values():
            overall_status = StepStatus.FAILED
        elif all(s == StepStatus.SKIPPED for s in statuses.values()):
            overall_status = StepStatus.SKIPPED
        else:
            overall_status = StepStatus.COMPLETED

        self.metrics.increment(
            "workflow.completed",
            tags={"workflow": self.name, "status": overall_status.value},
        )
        self.logger.info(f"Workflow {self.name} completed with status {overall_status.value}")

        return WorkflowResult(
            workflow_name=self.name,
            status=overall_status,
            steps={
                name: {
                    "status": status.value,
                    "result": self.results.get(name),
                    "error": str(self.errors[name]) if name in self.errors else None,
                }
                for name, status in statuses.items()
            },
            final_result=self._aggregate_results(),
            error="; ".join(f"{name}: {e}" for name, e in self.errors.items()) or None,
        )

    def _run_step(
        self,
        step: WorkflowStep,
        statuses: dict[str, StepStatus],
        initial_inputs: dict[str, Any],
    ) -> StepStatus:
        if any(statuses.get(dep) != StepStatus.COMPLETED for dep in step.depends_on):
            self.logger.warning(f"Step {step.name} has unmet dependencies, skipping")
            return StepStatus.SKIPPED
        if step.condition and step.condition[1:] not in self.results:
            self.logger.info(f"Step {step.name} condition not met, skipping")
            return StepStatus.SKIPPED

        try:
            self.results[step.name] = self._execute_step(step, initial_inputs)
        except Exception as e:
            self.errors[step.name] = e
            self.logger.error(f"Step {step.name} failed: {str(e)}", exc_info=True)
            return StepStatus.FAILED
        self.logger.info(f"Step {step.name} completed successfully")
        return StepStatus.COMPLETED

    def _get_execution_order(self) -> list[WorkflowStep]:
        """Steps in dependency order; ready steps keep the order they were added in.

        Raises:
            WorkflowError: On a dependency on an unknown step or a cycle
        """
        known = {step.name for step in self.steps}
        for step in self.steps:
            unknown = sorted(set(step.depends_on) - known)
            if unknown:
                raise WorkflowError(f"Step {step.name} depends on unknown steps {unknown}")

        order: list[WorkflowStep] = []
        done: set[str] = set()
        pending = list(self.steps)
        while pending:
            ready = [step for step in pending if done.issuperset(step.depends_on)]
            if not ready:
                raise WorkflowError(
                    f"Unable to resolve step dependencies: {[s.name for s in pending]}"
                )
            order.extend(ready)
            done.update(step.name for step in ready)
            pending = [step for step in pending if step.name not in done]
        return order

    def _execute_step(self, step: WorkflowStep, initial_inputs: dict[str, Any]) -> Any:
        if not self.registry.is_registered(step.experiment):
            raise WorkflowError(f"Experiment '{step.experiment}' is not registered")

        inputs = {
            key: self._resolve(value, initial_inputs) for key, value in step.inputs.items()
        }
        experiment = self.registry.get_instance(step.experiment)
        with self.metrics.timed("workflow.step_duration", {"workflow": self.name, "step": step.name}):
            return experiment.execute(**inputs)

    def _resolve(self, value: Any, initial_inputs: dict[str, Any]) -> Any:
        """Value of a ``$`` reference; anything unresolvable passes through as is."""
        if not (isinstance(value, str) and value.startswith("$")):
            return value
        ref = value[1:]
        if ref in self.results:
            return self.results[ref]

        step_name, _, field = ref.partition(".")
        if field and step_name in self.results:
            result = self.results[step_name]
            if isinstance(result, dict):
                return result.get(field)
            found = getattr(result, field, _MISSING)
            return result if found is _MISSING else found
        return initial_inputs.get(ref, value)

    def _aggregate_results(self) -> Any:
        """Result of the last added step; subclasses override."""
        if self.results and self.steps:
            return self.results.get(self.steps[-1].name)
        return self.results
