"""Two initial data on one noise path and the Grönwall-type stability bound."""

import numpy as np

from src.experiments.common import RunSetup, SimExperiment, build_setup, map_trajectories
from src.flow.integrator import (
    CoupledRecord,
    check_gronwall_bound,
    coupled_evolve,
    fit_gronwall_constant,
)
from src.models.config import SimConfig
from src.models.experiment import CheckResult, ExperimentResult
from src.torus.fields import VectorField3
from src.torus.spectral import project_to_sphere, random_band_limited

PERTURBATION_CUTOFF = 4


def perturb(u: VectorField3, size: float, seed: int, index: int) -> VectorField3:
    """Project u + size·p onto the sphere, p band-limited with max|p| = 1."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index, 1])))
    cutoff = min(PERTURBATION_CUTOFF, u.grid.cutoff)
    p = random_band_limited(u.grid, cutoff, rng, decay=1.0, components=3)
    scale = float(np.max(p.pointwise_norm()))
    return project_to_sphere(VectorField3(u.grid, u.values + size * p.values / scale))


def run_pair(setup: RunSetup, index: int, identical: bool = False) -> CoupledRecord:
    config = setup.config
    seed = config.ensemble.master_seed
    v0 = setup.u0 if identical else perturb(setup.u0, config.couple.perturbation, seed, index)
    return coupled_evolve(
        setup.u0,
        v0,
        setup.model,
        setup.scheme,
        setup.T,
        record_stride=config.sim.record_stride,
        trajectory_id=index,
        master_seed=seed,
    )


def gronwall_checks(setup: RunSetup, workers: int | None = None) -> tuple[list[CheckResult], CoupledRecord, float]:
    """Identical-data and fitted-bound verdicts.

    Pair 0 calibrates C; pairs 1..validation_runs are checked against
    max(safety·C, min_constant).
    """
    couple = setup.config.couple
    identical = run_pair(setup, 0, identical=True)
    zero = max(identical.difference)
    calibration = run_pair(setup, 0)
    fitted = fit_gronwall_constant(calibration)
    constant = max(couple.safety * fitted, couple.min_constant)
    validation = map_trajectories(
        lambda index: run_pair(setup, index), list(range(1, couple.validation_runs + 1)), workers
    )
    held = [check_gronwall_bound(pair, constant) for pair in validation]
    checks = [
        CheckResult(
            name="gronwall_identical",
            passed=zero == 0.0,
            statistics={"max_difference": zero},
        ),
        CheckResult(
            name="gronwall_bound",
            passed=all(held),
            statistics={
                "fitted_constant": fitted,
                "validated_constant": constant,
                "runs": len(held),
                "held": sum(held),
            },
        ),
    ]
    return checks, calibration, constant


class CoupleExperiment(SimExperiment):
    """Coupled pair with identical-data and Grönwall-bound verdicts."""

    def __init__(self):
        super().__init__(name="couple")

    def _execute(self, config: SimConfig, workers: int | None = None, **kwargs) -> ExperimentResult:
        setup = build_setup(config)
        checks, calibration, constant = gronwall_checks(setup, workers)
        second = calibration.second
        second.trajectory_id = 1
        rows = [
            {
                "t": t,
                "difference": d,
                "exponent": exponent,
                "bound": calibration.difference[0] * float(np.exp(constant * exponent)),
            }
            for t, d, exponent in zip(calibration.times, calibration.difference, calibration.exponent)
        ]
        return ExperimentResult(
            experiment=self.name,
            verdicts=checks,
            records=[calibration.first, second],
            tables={"coupling": rows},
            extras={"gronwall_constant": constant},
        )
