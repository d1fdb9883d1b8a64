"""Interpolation-constant sweeps and the Wente sweep."""

import math

import numpy as np

from src.diagnostics.constants import ConstantEstimate, c0_ratio, estimate_C0, estimate_C1
from src.experiments.common import SimExperiment, build_setup
from src.flow.integrator import evolve
from src.flow.observers import SnapshotCollector
from src.helein.wente import wente_solve, wente_sweep
from src.models.config import SimConfig
from src.models.experiment import CheckResult, ExperimentResult
from src.torus.fields import ScalarField
from src.torus.grid import Grid

C0_SIN_RATIO = 3.0 / (8.0 * math.pi**2)
REFINEMENT_RTOL = 0.10
WENTE_RTOL = 0.05


def c1_samples(config: SimConfig, n: int) -> list:
    """Snapshots of the configured trajectory computed on an n×n grid."""
    setup = build_setup(config, n)
    steps = config.steps
    stride = max(1, steps // config.constants.snapshots)
    collector = SnapshotCollector(steps=set(range(0, steps + 1, stride)))
    evolve(
        setup.u0,
        setup.model,
        setup.scheme,
        setup.T,
        collector,
        record_stride=config.sim.record_stride,
        master_seed=config.ensemble.master_seed,
    )
    return collector.fields


def stability_check(estimate: ConstantEstimate, rtol: float) -> CheckResult:
    return CheckResult(
        name=f"{estimate.name}_stability",
        passed=estimate.stability <= rtol,
        statistics=estimate.to_dict(),
    )


def sin_oracle_check() -> CheckResult:
    grid = Grid(64)
    ratio = c0_ratio(ScalarField(grid, np.sin(grid.x[0])))
    error = abs(ratio - C0_SIN_RATIO) if ratio is not None else math.inf
    return CheckResult(
        name="C0_sin_oracle",
        passed=error <= 1e-10,
        statistics={"ratio": ratio, "expected": C0_SIN_RATIO, "error": error},
    )


def constant_checks(config: SimConfig) -> tuple[list[CheckResult], list[dict], dict]:
    """Ĉ₀ over random functions, Ĉ₁ over trajectory snapshots, and ε₁* = 1/Ĉ₁."""
    constants = config.constants
    c0 = estimate_C0(constants.samples, constants.grid_sizes, config.ensemble.master_seed)
    samples = {n: c1_samples(config, n) for n in constants.grid_sizes}
    c1 = estimate_C1(samples, constants.radii, config.bubble.dilation)
    rows = [
        {"constant": estimate.name, "n": n, "sample": index, "running_max": value}
        for estimate in (c0, c1)
        for n, history in sorted(estimate.running_max.items())
        for index, value in enumerate(history)
    ]
    checks = [
        sin_oracle_check(),
        stability_check(c0, REFINEMENT_RTOL),
        stability_check(c1, REFINEMENT_RTOL),
    ]
    return checks, rows, {"C0": c0.value, "C1": c1.value, "eps1_star": c1.eps1_star}


class EstimateConstantsExperiment(SimExperiment):
    """Interpolation constants on every configured grid."""

    def __init__(self):
        super().__init__(name="estimate-constants")

    def _execute(self, config: SimConfig, workers: int | None = None, **kwargs) -> ExperimentResult:
        checks, rows, extras = constant_checks(config)
        return ExperimentResult(
            experiment=self.name,
            verdicts=checks,
            tables={"constants": rows},
            extras=extras,
        )


def wente_checks(config: SimConfig) -> tuple[list[CheckResult], list[dict]]:
    """Bracket antisymmetry, the single-mode solve and sweep refinement stability."""
    wente = config.wente
    grid = Grid(64)
    x1, x2 = grid.x
    a = ScalarField(grid, np.sin(x1))
    b = ScalarField(grid, np.sin(x2))
    same = wente_solve(a, a, "helmholtz")
    single = wente_solve(a, b, "helmholtz")
    single_error = float(np.max(np.abs(single.phi.values - np.cos(x1) * np.cos(x2) / 3.0)))

    rows = []
    maxima = {}
    for n in wente.grid_sizes:
        sweep = wente_sweep(
            wente.count, n, config.ensemble.master_seed, wente.mode, wente.cutoff, wente.sup_grid
        )
        rows.extend({"n": n, **row} for row in sweep)
        maxima[n] = max(row["ratio"] for row in sweep)
    sizes = sorted(maxima)
    spread = abs(maxima[sizes[-1]] / maxima[sizes[0]] - 1.0) if maxima[sizes[0]] > 0 else 0.0
    checks = [
        CheckResult(
            name="wente_antisymmetry",
            passed=bool(np.all(same.phi.values == 0.0)) and same.ratio == 0.0,
            statistics={"ratio": same.ratio},
        ),
        CheckResult(
            name="wente_single_mode",
            passed=single_error <= 1e-12,
            statistics={"max_error": single_error, "sup": single.sup},
        ),
        CheckResult(
            name="wente_stability",
            passed=spread <= WENTE_RTOL and all(math.isfinite(v) for v in maxima.values()),
            statistics={"max_ratio": {str(n): maxima[n] for n in sizes}, "spread": spread},
        ),
    ]
    return checks, rows


class WenteSweepExperiment(SimExperiment):
    """Wente ratios of random band-limited pairs on every configured grid."""

    def __init__(self):
        super().__init__(name="wente-sweep")

    def _execute(self, config: SimConfig, workers: int | None = None, **kwargs) -> ExperimentResult:
        checks, rows = wente_checks(config)
        return ExperimentResult(
            experiment=self.name,
            verdicts=checks,
            tables={"wente": rows},
            extras={"mode": config.wente.mode},
        )
