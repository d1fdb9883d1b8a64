"""Single trajectory with diagnostics, Helein series and optional snapshots."""

from src.bubble.monitor import run_with_restarts
from src.diagnostics.energy import l4l4_norm
from src.experiments.common import SimExperiment, build_setup
from src.flow.integrator import TrajectoryRecord, evolve
from src.flow.observers import SnapshotCollector
from src.helein.decomposition import HeleinObserver
from src.models.config import SimConfig
from src.models.experiment import ExperimentResult
from src.noise.model import NoiseModel


def helein_rows(record: TrajectoryRecord, model: NoiseModel) -> list[dict[str, float]]:
    """Rows (t, E, 𝒢, ‖Δα‖², ‖τ‖², ‖∇⊥β‖²) of a record observed by a HeleinObserver."""
    series = record.series
    return [
        {
            "t": t,
            "energy": series["energy"][index],
            "gain": series["energy"][index] - model.c_phi * t,
            "laplacian_alpha_sq": series["laplacian_alpha_sq"][index],
            "tension_sq": series["tension_sq"][index],
            "perp_beta_sq": series["perp_beta_sq"][index],
        }
        for index, t in enumerate(record.times)
    ]


def spectrum_rows(model: NoiseModel) -> list[dict]:
    return [
        {"k1": k1, "k2": k2, "basis": kind, "lambda": lam}
        for k1, k2, kind, lam in model.spectrum_table()
    ]


class SimulateExperiment(SimExperiment):
    """One trajectory of the configured run.

    With ``bubble.eps1`` set the trajectory restarts at every stopping time;
    otherwise it runs straight through with the local energy recorded.
    """

    def __init__(self):
        super().__init__(name="simulate")

    def _execute(self, config: SimConfig, workers: int | None = None, **kwargs) -> ExperimentResult:
        setup = build_setup(config)
        seed = config.ensemble.master_seed
        observers: list = [HeleinObserver()]
        collector = None
        if config.output.snapshots:
            collector = SnapshotCollector(every=config.output.snapshot_every)
            observers.append(collector)

        if config.bubble.eps1 is not None:
            record = run_with_restarts(
                setup.u0,
                setup.model,
                setup.scheme,
                setup.T,
                setup.cover,
                config.bubble.eps1,
                restart_cutoff=config.bubble.restart_cutoff,
                max_restarts=config.bubble.max_restarts,
                observers=observers,
                record_stride=config.sim.record_stride,
                detection_stride=config.sim.detection_stride,
                master_seed=seed,
            )
        else:
            record = evolve(
                setup.u0,
                setup.model,
                setup.scheme,
                setup.T,
                *observers,
                record_stride=config.sim.record_stride,
                cover=setup.cover,
                master_seed=seed,
            )

        snapshots = {}
        if collector is not None:
            snapshots = {
                f"traj{record.trajectory_id}_step{step}": field
                for step, field in zip(collector.step_indices, collector.fields)
            }
        return ExperimentResult(
            experiment=self.name,
            records=[record],
            ledger=[event.to_dict() for event in record.events],
            tables={"helein": helein_rows(record, setup.model), "noise_spectrum": spectrum_rows(setup.model)},
            snapshots=snapshots,
            extras={
                "c_phi": setup.model.c_phi,
                "initial_energy": record.series["energy"][0],
                "stop_reason": record.stop_reason,
                "l4l4_norm": l4l4_norm(record),
            },
        )
