"""Unit tests for the experiment lifecycle."""

import pytest

from src.core.exceptions import ConfigurationError, ExperimentError, NormCollapseError
from src.core.experiment import BaseExperiment
from src.core.metrics import MetricsCollector


class Trajectory(BaseExperiment):
    def __init__(self, outcome):
        super().__init__(name="trajectory")
        self.outcome = outcome
        self.metrics = MetricsCollector()
        self.calls = 0

    def validate_input(self, steps: int) -> None:
        if steps < 1:
            raise ConfigurationError(f"steps must be positive, got {steps}")

    def _execute(self, steps: int):
        self.calls += 1
        if isinstance(self.outcome, Exception):
            raise self.outcome
        return self.outcome * steps


@pytest.mark.unit
class TestBaseExperiment:
    """Tests for BaseExperiment.execute."""

    def test_result_and_timing(self):
        """Test the result is returned and timed as a success."""
        experiment = Trajectory(2)
        assert experiment.execute(steps=5) == 10
        assert experiment.metrics.counter("experiment.executions") == 1
        timings = [m for m in experiment.metrics.metrics if m.name == "experiment.duration"]
        assert [m.tags["status"] for m in timings] == ["success"]

    def test_invalid_input_stops_before_running(self):
        """Test validation failures propagate and _execute never runs."""
        experiment = Trajectory(2)
        with pytest.raises(ConfigurationError):
            experiment.execute(steps=0)
        assert experiment.calls == 0
        assert experiment.metrics.counter("experiment.errors") == 1

    def test_numerical_abort_passes_through(self):
        """Test domain errors keep their type for exit-code mapping."""
        with pytest.raises(NormCollapseError):
            Trajectory(NormCollapseError("|u| below 1/2", step=3)).execute(steps=5)

    def test_other_errors_wrapped(self):
        """Test unexpected exceptions become ExperimentError with the cause kept."""
        with pytest.raises(ExperimentError, match="trajectory failed: overflow") as info:
            Trajectory(OverflowError("overflow")).execute(steps=5)
        assert isinstance(info.value.__cause__, OverflowError)
