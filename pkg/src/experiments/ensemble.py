"""Monte Carlo ensembles and their statistical verdicts."""

import math
from collections.abc import Callable
from dataclasses import dataclass, field

from src.bubble.monitor import BlowupEvent, WindowEnergyObserver, bound_check, run_with_restarts
from src.config import get_settings
from src.core.exceptions import DiagnosticsError, InsufficientEnsembleError
from src.core.logging import get_logger
from src.diagnostics.constants import ConstantEstimate, default_eps1, estimate_C1
from src.diagnostics.dissipation import local_dissipation_check, moment_bounds
from src.diagnostics.energy import measure_tol_det
from src.diagnostics.martingale import energy_identity_check, qv_check, supermartingale_test
from src.diagnostics.statistics import ensemble_summary
from src.experiments.common import RunSetup, SimExperiment, build_setup, busiest_window, map_trajectories
from src.flow.integrator import TrajectoryRecord, energy, evolve
from src.flow.observers import SnapshotCollector
from src.helein.decomposition import GainSeries, gain_series
from src.models.config import SimConfig
from src.models.experiment import CheckResult, ExperimentResult

logger = get_logger(__name__)

NEGATIVE_SHIFT = 0.1
SUMMARY_QUANTITIES = ("energy", "gain", "qv", "tension_integral", "sphere_defect")


@dataclass
class Pilot:
    """Noiseless run giving tol_det and, when not configured, ε₁."""

    record: TrajectoryRecord
    tol_det: float
    eps1: float
    c1: ConstantEstimate | None = None

    def to_dict(self) -> dict:
        return {
            "tol_det": self.tol_det,
            "eps1": self.eps1,
            "c1": None if self.c1 is None else self.c1.to_dict(),
        }


def run_pilot(setup: RunSetup) -> Pilot:
    """σ = 0 run from the configured data; its energy defect is tol_det.

    When ``bubble.eps1`` is unset, Ĉ₁ is estimated on the pilot snapshots
    and ε₁ = eps1_factor/Ĉ₁.
    """
    config = setup.config
    pilot_setup = setup.with_noise(0.0)
    steps = config.steps
    stride = max(1, steps // config.constants.snapshots)
    collector = SnapshotCollector(steps=set(range(0, steps + 1, stride)))
    record = evolve(
        pilot_setup.u0,
        pilot_setup.model,
        pilot_setup.scheme,
        pilot_setup.T,
        collector,
        record_stride=config.sim.record_stride,
        master_seed=config.ensemble.master_seed,
    )
    tol_det = measure_tol_det(record, pilot_setup.model)
    c1 = None
    eps1 = config.bubble.eps1
    if eps1 is None:
        try:
            c1 = estimate_C1(
                {setup.grid.n: collector.fields}, [config.bubble.rho], config.bubble.dilation
            )
            eps1 = default_eps1(c1, config.constants.eps1_factor)
        except DiagnosticsError:
            # gradient-free data never concentrates
            eps1 = math.inf
    logger.info(f"Pilot: tol_det={tol_det:.3e}, eps1={eps1:.6g}")
    return Pilot(record=record, tol_det=tol_det, eps1=eps1, c1=c1)


@dataclass
class EnsembleRun:
    setup: RunSetup
    eps1: float
    center: int
    records: list[TrajectoryRecord] = field(default_factory=list)

    @property
    def ledgers(self) -> list[list[BlowupEvent]]:
        return [record.events for record in self.records]


def run_ensemble(
    setup: RunSetup, eps1: float, workers: int | None = None, count: int | None = None
) -> EnsembleRun:
    """M trajectories with restarts and the window energy at the busiest center."""
    config = setup.config
    center = busiest_window(setup)
    total = config.ensemble.count if count is None else count

    def trajectory(index: int) -> TrajectoryRecord:
        return run_with_restarts(
            setup.u0,
            setup.model,
            setup.scheme,
            setup.T,
            setup.cover,
            eps1,
            restart_cutoff=config.bubble.restart_cutoff,
            max_restarts=config.bubble.max_restarts,
            observers=[WindowEnergyObserver(setup.cover, center)],
            record_stride=config.sim.record_stride,
            detection_stride=config.sim.detection_stride,
            trajectory_id=index,
            master_seed=config.ensemble.master_seed,
        )

    records = map_trajectories(trajectory, list(range(total)), workers)
    return EnsembleRun(setup=setup, eps1=eps1, center=center, records=records)


def ledger_rows(records: list[TrajectoryRecord]) -> list[dict]:
    """Blow-up events of every trajectory, tagged with the trajectory id."""
    return [
        {"trajectory_id": record.trajectory_id, **event.to_dict()}
        for record in records
        for event in record.events
    ]


def guarded(name: str, check: Callable[[], CheckResult]) -> CheckResult:
    """Run a statistical check, turning a too-small ensemble into a failed verdict."""
    try:
        return check()
    except InsufficientEnsembleError as e:
        return CheckResult(
            name=name,
            passed=False,
            statistics={"error": type(e).__name__},
            message=str(e),
        )


def negative_control(result: CheckResult, name: str) -> CheckResult:
    """A control passes when the check it wraps fails."""
    return CheckResult(
        name=name,
        passed=not result.passed and "error" not in result.statistics,
        statistics={"control_passed": result.passed, **result.statistics},
    )


def bound_result(ensemble: EnsembleRun, ledgers, name: str = "event_bound") -> CheckResult:
    setup = ensemble.setup
    initial_energy = energy(setup.u0)
    verdict = bound_check(ledgers, initial_energy, setup.model.c_phi, setup.T, ensemble.eps1)
    return CheckResult(
        name=name,
        passed=verdict.passed,
        statistics={"mean_count": verdict.mean_count, "bound": verdict.bound, "eps1": ensemble.eps1},
    )


def synthetic_ledgers(ensemble: EnsembleRun, bound: float) -> list[list[BlowupEvent]]:
    """ceil(bound) + 1 events per trajectory, all before T: a constructed violation."""
    count = math.ceil(bound) + 1
    event = BlowupEvent(
        time=0.0,
        step=0,
        center=None,
        local_energy=None,
        energy_pre=0.0,
        energy_post=0.0,
        drop=0.0,
        quantum=False,
    )
    return [[event] * count for _ in ensemble.records]


def violation_rate(result: CheckResult, base: float = NEGATIVE_SHIFT) -> float:
    """Shift rate r making 𝒢 + r·t exceed the slack by base·(t − s) on every pair."""
    margins = [
        (result.statistics["slack"] - row["upper"]) / (row["t"] - row["s"])
        for row in result.statistics.get("pairs", [])
    ]
    return base + max([0.0, *margins])


def shifted_control(
    gains: list[GainSeries], rate: float, tol_det: float, min_ensemble: int, name: str
) -> CheckResult:
    """Supermartingale test on 𝒢 + rate·t; the control passes when that test fails."""
    shifted = guarded(
        f"{name}_shifted",
        lambda: supermartingale_test(
            [series.shifted(rate) for series in gains],
            slack=tol_det,
            min_ensemble=min_ensemble,
            name=f"{name}_shifted",
        ),
    )
    control = negative_control(shifted, name)
    control.statistics["rate"] = rate
    return control


def supermartingale_controls(
    gains: list[GainSeries], tol_det: float, min_ensemble: int
) -> list[CheckResult]:
    """The 𝒢 test, its fixed-drift control and the adaptive-drift control.

    ``supermartingale_negative_control`` adds the fixed drift NEGATIVE_SHIFT·t
    and measures whether the test can see a drift of that size.
    ``supermartingale_negative_control_adaptive`` adds a drift grown from the
    observed margins until every pair must fail; it only checks the wiring.
    """
    supermartingale = guarded(
        "supermartingale",
        lambda: supermartingale_test(gains, slack=tol_det, min_ensemble=min_ensemble),
    )
    return [
        supermartingale,
        shifted_control(gains, NEGATIVE_SHIFT, tol_det, min_ensemble, "supermartingale_negative_control"),
        shifted_control(
            gains,
            violation_rate(supermartingale),
            tol_det,
            min_ensemble,
            "supermartingale_negative_control_adaptive",
        ),
    ]


def supermartingale_verdicts(
    ensemble: EnsembleRun, tol_det: float, min_ensemble: int
) -> list[CheckResult]:
    gains = [gain_series(record, ensemble.setup.model) for record in ensemble.records]
    return supermartingale_controls(gains, tol_det, min_ensemble)


def event_bound_verdicts(ensemble: EnsembleRun) -> list[CheckResult]:
    """E[N_T] against its bound, and the same check on ledgers built to violate it."""
    bound = bound_result(ensemble, ensemble.ledgers)
    violated = bound_result(
        ensemble, synthetic_ledgers(ensemble, bound.statistics["bound"]), "event_bound_synthetic"
    )
    return [bound, negative_control(violated, "event_bound_negative_control")]


def ensemble_verdicts(ensemble: EnsembleRun, tol_det: float, min_ensemble: int) -> list[CheckResult]:
    """Energy identity, QV, supermartingale, local dissipation, event bound and moments."""
    setup = ensemble.setup
    records = ensemble.records
    model = setup.model
    return [
        guarded(
            "energy_identity",
            lambda: energy_identity_check(records, model, tol_det, min_ensemble),
        ),
        guarded("quadratic_variation", lambda: qv_check(records, model, min_ensemble)),
        *supermartingale_verdicts(ensemble, tol_det, min_ensemble),
        guarded(
            "local_dissipation",
            lambda: local_dissipation_check(
                records, model, setup.cover, ensemble.center, slack=tol_det, min_ensemble=min_ensemble
            ),
        ),
        *event_bound_verdicts(ensemble),
        moment_bounds(records),
    ]


class EnsembleExperiment(SimExperiment):
    """Pilot, ensemble and every statistical verdict."""

    def __init__(self):
        super().__init__(name="ensemble")

    def _execute(self, config: SimConfig, workers: int | None = None, **kwargs) -> ExperimentResult:
        setup = build_setup(config)
        pilot = run_pilot(setup)
        ensemble = run_ensemble(setup, pilot.eps1, workers)
        verdicts = ensemble_verdicts(ensemble, pilot.tol_det, get_settings().min_ensemble)
        summary = ensemble_summary(ensemble.records, SUMMARY_QUANTITIES)
        return ExperimentResult(
            experiment=self.name,
            verdicts=verdicts,
            records=ensemble.records,
            ledger=ledger_rows(ensemble.records),
            extras={
                "pilot": pilot.to_dict(),
                "c_phi": setup.model.c_phi,
                "window_center": ensemble.center,
                "summary": summary.to_dict(),
                "insufficient_ensemble": any(
                    verdict.statistics.get("error") == "InsufficientEnsembleError" for verdict in verdicts
                ),
            },
        )
