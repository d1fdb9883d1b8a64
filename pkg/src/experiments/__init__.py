"""Experiments behind the sllg subcommands and the acceptance checks."""

from src.core.registry import get_registry

from .acceptance import ACCEPTANCE_CHECKS, EnsembleRunExperiment, PilotExperiment
from .common import RunSetup, SimExperiment, build_setup, map_trajectories
from .constants import EstimateConstantsExperiment, WenteSweepExperiment
from .couple import CoupleExperiment
from .ensemble import EnsembleExperiment, EnsembleRun, run_ensemble, run_pilot
from .simulate import SimulateExperiment
from .verify import VerifyExperiment

SUBCOMMANDS = {
    "simulate": SimulateExperiment,
    "couple": CoupleExperiment,
    "ensemble": EnsembleExperiment,
    "estimate-constants": EstimateConstantsExperiment,
    "wente-sweep": WenteSweepExperiment,
    "verify": VerifyExperiment,
}


def register_experiments() -> None:
    """Register every subcommand and acceptance step with the global registry."""
    registry = get_registry()
    steps = {
        "pilot": PilotExperiment,
        "ensemble-run": EnsembleRunExperiment,
        **{f"check.{check.criterion}": check for check in ACCEPTANCE_CHECKS},
    }
    registry.register_missing({**SUBCOMMANDS, **steps})


__all__ = [
    "SUBCOMMANDS",
    "register_experiments",
    "RunSetup",
    "SimExperiment",
    "build_setup",
    "map_trajectories",
    "run_pilot",
    "run_ensemble",
    "EnsembleRun",
    "SimulateExperiment",
    "CoupleExperiment",
    "EnsembleExperiment",
    "EstimateConstantsExperiment",
    "WenteSweepExperiment",
    "VerifyExperiment",
    "PilotExperiment",
    "EnsembleRunExperiment",
    "ACCEPTANCE_CHECKS",
]
