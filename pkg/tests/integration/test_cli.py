"""Integration tests for the command-line interface."""

import json

import pytest
from click.testing import CliRunner

from src.cli.main import cli
from src.core.logging import setup_logging


@pytest.fixture(autouse=True)
def restore_logging():
    """Rebind the log handler after CliRunner closes its captured stderr."""
    yield
    setup_logging()


@pytest.fixture
def runner():
    return CliRunner()


def set_args(overrides: list[str]) -> list[str]:
    args: list[str] = []
    for override in overrides:
        args.extend(["--set", override])
    return args


@pytest.mark.integration
class TestConfigCommand:
    """Tests for the config command."""

    def test_shows_defaults_and_settings(self, runner):
        """Test the resolved keys and the runtime settings are printed."""
        result = runner.invoke(cli, ["config"])

        assert result.exit_code == 0
        assert "=== SLLG Configuration ===" in result.output
        assert "grid.n = 64" in result.output
        assert "=== Runtime Settings ===" in result.output
        assert "Workers:" in result.output

    def test_override_and_seed(self, runner):
        """Test --set and --seed reach the resolved configuration."""
        result = runner.invoke(cli, ["config", "--set", "grid.n=128", "--seed", "11"])

        assert result.exit_code == 0
        assert "grid.n = 128" in result.output
        assert "ensemble.master_seed = 11" in result.output

    def test_config_file(self, runner, tmp_path):
        """Test a configuration file is read."""
        path = tmp_path / "run.conf"
        path.write_text("noise.sigma = 0.2\n", encoding="utf-8")
        result = runner.invoke(cli, ["config", "--config", str(path)])

        assert result.exit_code == 0
        assert f"noise.sigma = {json.dumps(0.2)}" in result.output

    def test_invalid_value_exits_2(self, runner):
        """Test a grid size that is not a power of two is rejected."""
        result = runner.invoke(cli, ["config", "--set", "grid.n=33"])

        assert result.exit_code == 2
        assert "Configuration error" in result.output

    def test_missing_config_file(self, runner, tmp_path):
        """Test a --config path that does not exist is a usage error."""
        result = runner.invoke(cli, ["config", "--config", str(tmp_path / "absent.conf")])
        assert result.exit_code == 2


@pytest.mark.integration
class TestRunCommands:
    """Tests for subcommands run from the command line."""

    def test_help_lists_subcommands(self, runner):
        """Test every subcommand is registered on the group."""
        result = runner.invoke(cli, ["--help"])

        assert result.exit_code == 0
        for name in ("simulate", "couple", "ensemble", "estimate-constants", "wente-sweep", "verify"):
            assert name in result.output

    def test_simulate(self, runner, small_overrides, tmp_path):
        """Test a small simulation prints its verdicts and the run directory."""
        output = tmp_path / "run"
        result = runner.invoke(
            cli,
            ["--log-level", "WARNING", "simulate", *set_args(small_overrides), "--output", str(output)],
        )

        assert result.exit_code == 0, result.output
        assert f"Artifacts: {output}" in result.output
        assert (output / "manifest.json").exists()
        assert (output / "series.csv").exists()

    def test_wente_sweep_verdicts(self, runner, small_overrides, tmp_path):
        """Test each verdict is printed as a PASS or FAIL line."""
        result = runner.invoke(
            cli, ["wente-sweep", *set_args(small_overrides), "--output", str(tmp_path)]
        )

        assert result.exit_code == 0, result.output
        verdict_lines = [line for line in result.output.splitlines() if line.startswith("PASS  ")]
        assert verdict_lines
        assert not any(line.startswith("FAIL  ") for line in result.output.splitlines())

    def test_initial_data_error_exits_2(self, runner, small_overrides, tmp_path):
        """Test bad initial-data parameters surface as exit code 2."""
        overrides = [*small_overrides, "initial.params.bogus=1"]
        result = runner.invoke(cli, ["simulate", *set_args(overrides), "--output", str(tmp_path)])

        assert result.exit_code == 2
        assert "Error:" in result.output
