"""Integration tests for workflows."""

import pytest
from pydantic import ValidationError

from src.core.exceptions import ExperimentError, WorkflowError
from src.core.experiment import BaseExperiment
from src.core.registry import get_registry
from src.experiments.acceptance import ACCEPTANCE_CHECKS
from src.models.experiment import CheckResult, ExperimentResult
from src.models.workflow import StepStatus
from src.workflows import AcceptanceWorkflow, Workflow


class AddExperiment(BaseExperiment):
    def _execute(self, a: float, b: float) -> dict:
        return {"sum": a + b}


class FailingExperiment(BaseExperiment):
    def _execute(self, **kwargs) -> dict:
        raise ValueError("boom")


@pytest.fixture
def registered():
    """Register the test experiments and remove them afterwards."""
    registry = get_registry()
    registry.register("test.add", AddExperiment, overwrite=True)
    registry.register("test.fail", FailingExperiment, overwrite=True)
    yield registry
    registry.unregister("test.add")
    registry.unregister("test.fail")


@pytest.mark.integration
class TestWorkflow:
    """Tests for the workflow engine."""

    def test_add_step_chains(self):
        """Test add_step returns the workflow."""
        workflow = Workflow("chain")
        assert workflow.add_step("a", "test.add") is workflow
        assert [step.name for step in workflow.steps] == ["a"]

    def test_references_and_order(self, registered):
        """Test $input and $step.field references in dependency order."""
        workflow = Workflow("sums")
        workflow.add_step(
            "second", "test.add", inputs={"a": "$first.sum", "b": 10}, depends_on=["first"]
        ).add_step("first", "test.add", inputs={"a": "$x", "b": "$y"})

        result = workflow.execute({"x": 1, "y": 2})

        assert result.status == StepStatus.COMPLETED
        assert workflow.results["first"] == {"sum": 3}
        assert workflow.results["second"] == {"sum": 13}
        assert list(result.steps) == ["first", "second"]

    def test_failure_skips_dependents(self, registered):
        """Test a failed step skips its dependents but not independent steps."""
        workflow = Workflow("partial")
        workflow.add_step("broken", "test.fail").add_step(
            "after", "test.add", inputs={"a": 1, "b": 1}, depends_on=["broken"]
        ).add_step("independent", "test.add", inputs={"a": 2, "b": 2})

        result = workflow.execute()

        assert result.status == StepStatus.FAILED
        assert result.steps["broken"]["status"] == "failed"
        assert result.steps["after"]["status"] == "skipped"
        assert result.steps["independent"]["status"] == "completed"
        assert isinstance(workflow.errors["broken"], ExperimentError)
        assert "boom" in result.error

    def test_unresolvable_dependencies(self, registered):
        """Test a dependency cycle fails before any step runs."""
        workflow = Workflow("cycle")
        workflow.add_step("a", "test.add", depends_on=["b"]).add_step("b", "test.add", depends_on=["a"])
        result = workflow.execute()
        assert result.status == StepStatus.FAILED
        assert "Unable to resolve" in result.error
        assert result.steps == {}

    def test_unknown_dependency(self, registered):
        """Test a dependency on a missing step names it."""
        workflow = Workflow("dangling").add_step("a", "test.add", depends_on=["ghost"])
        result = workflow.execute()
        assert result.status == StepStatus.FAILED
        assert "['ghost']" in result.error

    def test_duplicate_step_name(self):
        """Test a step name can only be used once."""
        workflow = Workflow("twice").add_step("a", "test.add")
        with pytest.raises(WorkflowError):
            workflow.add_step("a", "test.add")

    def test_unregistered_experiment(self):
        """Test an unknown experiment fails its step."""
        workflow = Workflow("unknown")
        workflow.add_step("missing", "test.nothing")
        result = workflow.execute()
        assert result.steps["missing"]["status"] == "failed"
        assert "not registered" in result.steps["missing"]["error"]

    def test_condition(self, registered):
        """Test a $step condition runs only after that step produced a result."""
        workflow = Workflow("conditional")
        workflow.add_step("broken", "test.fail").add_step(
            "guarded", "test.add", inputs={"a": 1, "b": 1}, condition="$broken"
        ).add_step("open", "test.add", inputs={"a": 1, "b": 1}, condition="$guarded")

        result = workflow.execute()

        assert result.steps["guarded"]["status"] == "skipped"
        assert result.steps["open"]["status"] == "skipped"


@pytest.mark.integration
class TestAcceptanceWorkflow:
    """Tests for the acceptance workflow layout and aggregation."""

    def test_steps(self):
        """Test the pilot, the shared ensemble and one step per criterion."""
        workflow = AcceptanceWorkflow()
        names = [step.name for step in workflow.steps]
        assert names[:2] == ["pilot", "ensemble"]
        assert names[2:] == [check.criterion for check in ACCEPTANCE_CHECKS]
        assert len(names) == 16

    def test_statistical_checks_share_the_ensemble(self):
        """Test ensemble consumers depend on the ensemble step."""
        steps = {step.name: step for step in AcceptanceWorkflow().steps}
        for name in ("energy_identity", "quadratic_variation", "supermartingale", "bubbling"):
            assert "ensemble" in steps[name].depends_on
            assert steps[name].inputs["ensemble"] == "$ensemble"
        assert steps["ensemble"].inputs["eps1"] == "$pilot.eps1"

    def test_aggregate_lists_every_criterion(self):
        """Test completed, failed and skipped checks all produce verdicts."""
        workflow = AcceptanceWorkflow()
        workflow.results = {
            "spectral_calculus": ExperimentResult(
                experiment="check.spectral_calculus",
                verdicts=[CheckResult(name="parseval", passed=True)],
            )
        }
        workflow.errors = {"wente": ExperimentError("solver failed")}

        verdicts = {verdict.name: verdict for verdict in workflow._aggregate_results()}

        assert verdicts["parseval"].passed
        assert not verdicts["wente"].passed
        assert verdicts["wente"].statistics == {"error": "ExperimentError"}
        assert verdicts["gronwall"].statistics == {"error": "skipped"}
        assert "pilot" not in verdicts


@pytest.mark.integration
class TestWorkflowResult:
    """Tests for step status helpers on WorkflowResult."""

    def test_statuses(self, registered):
        """Test statuses keep execution order and filter by status."""
        workflow = Workflow("statuses")
        workflow.add_step("broken", "test.fail").add_step(
            "after", "test.add", inputs={"a": 1, "b": 1}, depends_on=["broken"]
        )

        result = workflow.execute()

        assert result.statuses == {"broken": "failed", "after": "skipped"}
        assert result.steps_with(StepStatus.SKIPPED) == ["after"]

    def test_condition_must_be_reference(self):
        """Test a condition that is not a $step reference is rejected."""
        with pytest.raises(ValidationError):
            Workflow("bad").add_step("a", "test.add", condition="always")


@pytest.mark.integration
class TestRegistry:
    """Tests for the experiment registry."""

    def test_acceptance_steps_registered(self):
        """Test every criterion is registered under check.<criterion>."""
        from src.experiments import register_experiments

        register_experiments()
        expected = sorted(f"check.{check.criterion}" for check in ACCEPTANCE_CHECKS)
        assert get_registry().names("check.") == expected

    def test_register_missing_keeps_existing(self, registered):
        """Test register_missing leaves taken names alone."""
        added = registered.register_missing({"test.add": FailingExperiment, "test.extra": AddExperiment})
        try:
            assert added == ["test.extra"]
            assert registered.get_class("test.add") is AddExperiment
        finally:
            registered.unregister("test.extra")

    def test_duplicate_registration(self, registered):
        """Test registering a taken name without overwrite fails."""
        with pytest.raises(ExperimentError):
            registered.register("test.add", FailingExperiment)
