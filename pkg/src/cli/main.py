"""Command-line interface for SLLG."""

import json

import click

from src.core.logging import setup_logging


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]),
    default=None,
    help="Logging level (defaults to SLLG_LOG_LEVEL)",
)
def cli(log_level: str | None):
    """SLLG - Stochastic harmonic map flow on the torus."""
    setup_logging(log_level)


def config_options(command):
    """--config, --set and --seed, shared by every command that resolves a SimConfig."""
    command = click.option("--seed", type=int, default=None, help="Override ensemble.master_seed")(
        command
    )
    command = click.option(
        "--set",
        "overrides",
        multiple=True,
        metavar="KEY=VALUE",
        help="Override one configuration key (repeatable)",
    )(command)
    return click.option(
        "--config",
        "config_path",
        type=click.Path(exists=True, dir_okay=False),
        default=None,
        help="Flat key = value configuration file",
    )(command)


def resolve(config_path: str | None, overrides: tuple[str, ...], seed: int | None):
    """Load the SimConfig or exit with status 2."""
    from src.config.loader import load_config
    from src.core.exceptions import ConfigurationError

    try:
        return load_config(config_path, overrides, seed)
    except ConfigurationError as e:
        click.echo(f"Configuration error: {e}", err=True)
        click.get_current_context().exit(2)


def run_subcommand(subcommand: str):
    """Build a click command that runs ``subcommand`` through the RunService."""

    @config_options
    @click.option("--workers", type=int, default=None, help="Ensemble parallelism degree")
    @click.option(
        "--output",
        type=click.Path(file_okay=False),
        default=None,
        help="Run directory (defaults to output.dir, then <output_dir>/<subcommand>)",
    )
    def command(config_path, overrides, seed, workers, output):
        from src.services import RunService

        config = resolve(config_path, overrides, seed)
        outcome = RunService().run(subcommand, config, workers=workers, output=output)

        if outcome.result is not None:
            for verdict in outcome.result.verdicts:
                status = "PASS" if verdict.passed else "FAIL"
                click.echo(f"{status}  {verdict.name}")
        if outcome.output_dir is not None:
            click.echo(f"Artifacts: {outcome.output_dir}")
        if outcome.error is not None:
            click.echo(f"Error: {outcome.error}", err=True)
        click.get_current_context().exit(int(outcome.exit_code))

    return command


_HELP = {
    "simulate": "Run one trajectory with diagnostics.",
    "couple": "Run two initial data on one noise path and check the Grönwall bound.",
    "ensemble": "Run the Monte Carlo ensemble and its statistical verdicts.",
    "estimate-constants": "Estimate the interpolation constants C0, C1 and eps1*.",
    "wente-sweep": "Sweep Wente ratios over random band-limited pairs.",
    "verify": "Run the full acceptance suite and print PASS/FAIL per criterion.",
}

for _name, _help in _HELP.items():
    cli.command(name=_name, help=_help)(run_subcommand(_name))


@cli.command()
@config_options
def config(config_path, overrides, seed):
    """Show the resolved run configuration and runtime settings."""
    from src.config import get_settings

    resolved = resolve(config_path, overrides, seed)
    settings = get_settings()
    click.echo("=== SLLG Configuration ===")
    for key, value in resolved.flat().items():
        click.echo(f"{key} = {json.dumps(value)}")
    click.echo("=== Runtime Settings ===")
    click.echo(f"Log Level: {settings.log_level}")
    click.echo(f"Log Format: {settings.log_format}")
    click.echo(f"Metrics Enabled: {settings.enable_metrics}")
    click.echo(f"Output Directory: {settings.output_dir}")
    click.echo(f"Workers: {settings.workers}")


if __name__ == "__main__":
    cli()
