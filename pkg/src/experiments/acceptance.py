"""Acceptance checks: one registered experiment per criterion of the verify suite.

Each check returns an ExperimentResult whose verdicts carry the raw numbers
behind PASS/FAIL. Checks that need the Monte Carlo ensemble or the pilot's
tol_det and ε₁ receive them from earlier workflow steps.
"""

import hashlib
import math
from typing import Any, ClassVar

import numpy as np

from src.bubble.cover import build_cover
from src.bubble.monitor import BubbleObserver, detect_stop
from src.config import get_settings
from src.diagnostics.energy import energy_increase, measured_order
from src.diagnostics.martingale import energy_identity_check, qv_check
from src.experiments.common import SimExperiment, build_setup
from src.experiments.constants import constant_checks, wente_checks
from src.experiments.couple import gronwall_checks
from src.experiments.ensemble import (
    EnsembleRun,
    event_bound_verdicts,
    guarded,
    ledger_rows,
    negative_control,
    run_ensemble,
    run_pilot,
    supermartingale_verdicts,
)
from src.flow.initial import InitialKind, make_initial
from src.flow.integrator import evolve, step_count
from src.flow.scheme import harmonic_nonlinearity
from src.helein.decomposition import (
    AlphaTensionBound,
    HeleinObserver,
    contraction,
    helein_tensor,
    helmholtz_split,
    nonlinearity_split,
)
from src.models.config import SimConfig
from src.models.experiment import CheckResult, ExperimentResult
from src.torus.fields import ScalarField, VectorField3
from src.torus.grid import Grid
from src.torus.spectral import (
    gradient,
    l4_gradient_norm,
    laplacian,
    lp_norm,
    perp_gradient,
    poisson_solve,
    spectral_energy,
)
from src.utils.artifacts import ledger_text, series_text

SPECTRAL_N = 64
SPECTRAL_RTOL = 1e-6
PARSEVAL_RTOL = 1e-12
FIXED_POINT_TOL = 1e-8
MONOTONE_TOL = 1e-10
SPHERE_TOL = 1e-10
MIN_ORDER = 0.9
HELEIN_RESIDUAL_TOL = 1e-10
CONTRACTION_TOL = 1e-5
EQUATOR_TOL = 1e-12
DIV_IDENTITY_TOL = 1e-6
RATIO_RTOL = 0.10
HELEIN_SAMPLES = 20
COVER_N = 64
COVER_RADIUS = math.pi / 8
REPRODUCIBILITY_WORKERS = (1, 1, 8)


def smooth_initial(config: SimConfig, grid: Grid) -> VectorField3:
    """random_smooth data, with the configured parameters when that is the configured kind."""
    params = config.initial.params if config.initial.kind is InitialKind.RANDOM_SMOOTH else {}
    return make_initial(InitialKind.RANDOM_SMOOTH, params, grid)


def relative_error(actual: np.ndarray, expected: np.ndarray) -> float:
    return float(np.max(np.abs(actual - expected)) / np.max(np.abs(expected)))


class AcceptanceCheck(SimExperiment):
    """One acceptance criterion.

    Attributes:
        criterion: Step name in the acceptance workflow
        depends_on: Workflow steps whose results this check consumes
        inputs: Extra step inputs, as workflow references
    """

    criterion: ClassVar[str]
    depends_on: ClassVar[tuple[str, ...]] = ()
    inputs: ClassVar[dict[str, str]] = {}

    def __init__(self):
        super().__init__(name=f"check.{self.criterion}")

    def result(self, verdicts: list[CheckResult], **fields: Any) -> ExperimentResult:
        return ExperimentResult(experiment=self.name, verdicts=verdicts, **fields)


class SpectralCalculusCheck(AcceptanceCheck):
    """Derivatives, Poisson solve and Parseval against a trigonometric oracle."""

    criterion = "spectral_calculus"

    def _execute(self, config: SimConfig, workers: int | None = None, **kwargs) -> ExperimentResult:
        grid = Grid(SPECTRAL_N)
        x1, x2 = grid.x
        f = np.sin(x1) * np.cos(2 * x2) + 0.5 * np.cos(3 * x1 + x2)
        d1 = np.cos(x1) * np.cos(2 * x2) - 1.5 * np.sin(3 * x1 + x2)
        d2 = -2.0 * np.sin(x1) * np.sin(2 * x2) - 0.5 * np.sin(3 * x1 + x2)
        lap = -5.0 * np.sin(x1) * np.cos(2 * x2) - 5.0 * np.cos(3 * x1 + x2)
        field = ScalarField(grid, f)

        errors = {
            "gradient": relative_error(gradient(field).values, np.stack([d1, d2])),
            "laplacian": relative_error(laplacian(field).values, lap),
            "perp_gradient": relative_error(perp_gradient(field).values, np.stack([-d2, d1])),
            "poisson_solve": relative_error(poisson_solve(ScalarField(grid, lap)).values, f),
        }
        quadrature = lp_norm(field, 2) ** 2
        parseval = abs(spectral_energy(field) - quadrature) / quadrature
        return self.result(
            [
                CheckResult(
                    name="spectral_derivatives",
                    passed=max(errors.values()) <= SPECTRAL_RTOL,
                    statistics=errors,
                ),
                CheckResult(
                    name="parseval",
                    passed=parseval <= PARSEVAL_RTOL,
                    statistics={"relative_error": parseval},
                ),
            ]
        )


class HarmonicFixedPointsCheck(AcceptanceCheck):
    """Constant and equator maps do not move under the noiseless flow."""

    criterion = "harmonic_fixed_points"

    def _execute(self, config: SimConfig, workers: int | None = None, **kwargs) -> ExperimentResult:
        setup = build_setup(config).with_noise(0.0)
        T = config.verify.fixed_point_T
        steps = step_count(T, setup.scheme.dt)
        drift = {}
        for kind in (InitialKind.CONSTANT, InitialKind.EQUATOR):
            u0 = make_initial(kind, {}, setup.grid)
            record = evolve(u0, setup.model, setup.scheme, T, record_stride=steps)
            drift[kind.value] = lp_norm(record.final_state.u - u0, 2)
        return self.result(
            [
                CheckResult(
                    name="harmonic_fixed_points",
                    passed=max(drift.values()) <= FIXED_POINT_TOL,
                    statistics={"T": T, "l2_drift": drift},
                )
            ]
        )


class EnergyDecayCheck(AcceptanceCheck):
    """Without noise the energy never increases between samples."""

    criterion = "energy_decay"

    def _execute(self, config: SimConfig, workers: int | None = None, **kwargs) -> ExperimentResult:
        setup = build_setup(config).with_noise(0.0)
        record = evolve(
            smooth_initial(config, setup.grid),
            setup.model,
            setup.scheme,
            setup.T,
            record_stride=config.sim.record_stride,
        )
        increase = energy_increase(record)
        energies = record.values("energy")
        return self.result(
            [
                CheckResult(
                    name="energy_decay",
                    passed=increase <= MONOTONE_TOL,
                    statistics={
                        "max_increase": increase,
                        "initial_energy": float(energies[0]),
                        "final_energy": float(energies[-1]),
                    },
                )
            ]
        )


class EnergyIdentityCheck(AcceptanceCheck):
    """Mean martingale residual within its band; fails once F_φ is dropped.

    The control ensemble runs without projection and without the Itô
    correction, with σ amplified by ``verify.negative_sigma_factor``.
    """

    criterion = "energy_identity"
    depends_on = ("pilot", "ensemble")
    inputs = {"ensemble": "$ensemble", "tol_det": "$pilot.tol_det"}

    def _execute(
        self,
        config: SimConfig,
        workers: int | None = None,
        ensemble: EnsembleRun | None = None,
        tol_det: float = 0.0,
        **kwargs,
    ) -> ExperimentResult:
        min_ensemble = get_settings().min_ensemble
        setup = ensemble.setup
        identity = guarded(
            "energy_identity",
            lambda: energy_identity_check(ensemble.records, setup.model, tol_det, min_ensemble),
        )
        sigma = config.noise.sigma * config.verify.negative_sigma_factor
        control_setup = setup.with_noise(sigma).with_scheme(projection=False, ito_correction=False)
        control = run_ensemble(control_setup, ensemble.eps1, workers)
        uncorrected = guarded(
            "energy_identity_uncorrected",
            lambda: energy_identity_check(
                control.records,
                control_setup.model,
                tol_det,
                min_ensemble,
                name="energy_identity_uncorrected",
            ),
        )
        return self.result(
            [identity, negative_control(uncorrected, "energy_identity_negative_control")]
        )


class QuadraticVariationCheck(AcceptanceCheck):
    criterion = "quadratic_variation"
    depends_on = ("ensemble",)
    inputs = {"ensemble": "$ensemble"}

    def _execute(
        self, config: SimConfig, workers: int | None = None, ensemble: EnsembleRun | None = None, **kwargs
    ) -> ExperimentResult:
        min_ensemble = get_settings().min_ensemble
        check = guarded(
            "quadratic_variation",
            lambda: qv_check(
                ensemble.records, ensemble.setup.model, min_ensemble, config.ensemble.master_seed
            ),
        )
        return self.result([check])


class SupermartingaleCheck(AcceptanceCheck):
    criterion = "supermartingale"
    depends_on = ("pilot", "ensemble")
    inputs = {"ensemble": "$ensemble", "tol_det": "$pilot.tol_det"}

    def _execute(
        self,
        config: SimConfig,
        workers: int | None = None,
        ensemble: EnsembleRun | None = None,
        tol_det: float = 0.0,
        **kwargs,
    ) -> ExperimentResult:
        return self.result(supermartingale_verdicts(ensemble, tol_det, get_settings().min_ensemble))


class SphereConstraintCheck(AcceptanceCheck):
    """|u| = 1 with projection; first-order constraint drift without it."""

    criterion = "sphere_constraint"
    depends_on = ("ensemble",)
    inputs = {"ensemble": "$ensemble"}

    def _execute(
        self, config: SimConfig, workers: int | None = None, ensemble: EnsembleRun | None = None, **kwargs
    ) -> ExperimentResult:
        records = ensemble.records
        if not ensemble.setup.scheme.projection:
            projected = ensemble.setup.with_scheme(projection=True)
            records = [
                evolve(
                    projected.u0,
                    projected.model,
                    projected.scheme,
                    projected.T,
                    master_seed=config.ensemble.master_seed,
                )
            ]
        projected_defect = max(float(np.max(record.values("sphere_defect"))) for record in records)

        base = build_setup(config).with_noise(0.0).with_scheme(projection=False)
        u0 = smooth_initial(config, base.grid)
        drift = []
        for refinement in (1, 2):
            setup = base.with_scheme(dt=base.scheme.dt / refinement)
            record = evolve(
                u0,
                setup.model,
                setup.scheme,
                setup.T,
                record_stride=config.sim.record_stride * refinement,
            )
            drift.append(float(np.max(record.values("sphere_defect"))))
        order = measured_order(drift[0], drift[1])
        return self.result(
            [
                CheckResult(
                    name="sphere_projection",
                    passed=projected_defect <= SPHERE_TOL,
                    statistics={"max_defect": projected_defect, "trajectories": len(records)},
                ),
                CheckResult(
                    name="sphere_drift_order",
                    passed=order >= MIN_ORDER,
                    statistics={"drift": drift, "order": order},
                ),
            ]
        )


class HeleinCheck(AcceptanceCheck):
    """Helmholtz reconstruction, the contraction identity and the equator split."""

    criterion = "helein"

    def _execute(self, config: SimConfig, workers: int | None = None, **kwargs) -> ExperimentResult:
        grid = Grid(config.grid.n)
        u = smooth_initial(config, grid)
        A = helein_tensor(u)
        split = helmholtz_split(A)

        direct = harmonic_nonlinearity(u)
        grad_u = gradient(u)
        contracted = contraction(A, grad_u)
        scale = l4_gradient_norm(u) ** 2
        density_gap = ScalarField(
            grid, A.pointwise_norm() ** 2 - 2.0 * grad_u.pointwise_norm() ** 2
        )
        norm_defect = lp_norm(density_gap, 1) / lp_norm(grad_u, 2) ** 2
        parts = nonlinearity_split(u, split)
        recombined = parts["mean"] + parts["gradient"] + parts["rotated"]
        cross = split.cross_products()
        orthogonality = max(abs(v) for v in cross.values()) / (1.0 + lp_norm(A, 2) ** 2)

        equator = helmholtz_split(helein_tensor(make_initial(InitialKind.EQUATOR, {}, grid)))
        alpha_max = float(np.max(np.abs(equator.alpha.values)))
        beta_max = float(np.max(np.abs(equator.beta.values)))

        contraction_defect = lp_norm(contracted - direct, 2) / scale
        split_defect = lp_norm(recombined - contracted, 2) / scale
        return self.result(
            [
                CheckResult(
                    name="helmholtz_reconstruction",
                    passed=max(split.residual, equator.residual) <= HELEIN_RESIDUAL_TOL
                    and orthogonality <= HELEIN_RESIDUAL_TOL,
                    statistics={
                        "residual": split.residual,
                        "equator_residual": equator.residual,
                        "orthogonality": orthogonality,
                    },
                ),
                CheckResult(
                    name="helein_contraction",
                    passed=max(contraction_defect, split_defect, norm_defect) <= CONTRACTION_TOL,
                    statistics={
                        "defect": contraction_defect,
                        "split_defect": split_defect,
                        "norm_defect": norm_defect,
                        "scale": scale,
                    },
                ),
                CheckResult(
                    name="helein_equator_mean",
                    passed=max(alpha_max, beta_max) <= EQUATOR_TOL,
                    statistics={"alpha_max": alpha_max, "beta_max": beta_max},
                ),
            ]
        )


class DivIdentityCheck(AcceptanceCheck):
    """div A = u∧Δu along a trajectory and a refinement-stable ∫‖Δα‖²/∫‖τ‖²."""

    criterion = "div_identity"

    def _execute(self, config: SimConfig, workers: int | None = None, **kwargs) -> ExperimentResult:
        stride = max(1, config.steps // HELEIN_SAMPLES)
        bounds = {}
        for n in (config.grid.n, 2 * config.grid.n):
            setup = build_setup(config, n)
            record = evolve(
                smooth_initial(config, setup.grid),
                setup.model,
                setup.scheme,
                setup.T,
                HeleinObserver(),
                record_stride=stride,
                master_seed=config.ensemble.master_seed,
            )
            bounds[n] = AlphaTensionBound.from_record(record)
        coarse, fine = (bounds[n] for n in sorted(bounds))
        spread = abs(fine.ratio / coarse.ratio - 1.0) if coarse.ratio > 0.0 else 0.0
        defect = max(bound.max_div_defect for bound in bounds.values())
        return self.result(
            [
                CheckResult(
                    name="div_identity",
                    passed=defect <= DIV_IDENTITY_TOL,
                    statistics={"max_defect": defect},
                ),
                CheckResult(
                    name="alpha_tension_ratio",
                    passed=spread <= RATIO_RTOL,
                    statistics={
                        "ratio": {str(n): bound.ratio for n, bound in sorted(bounds.items())},
                        "spread": spread,
                    },
                ),
            ]
        )


class WenteCheck(AcceptanceCheck):
    criterion = "wente"

    def _execute(self, config: SimConfig, workers: int | None = None, **kwargs) -> ExperimentResult:
        checks, rows = wente_checks(config)
        return self.result(checks, tables={"wente": rows})


class ConstantsCheck(AcceptanceCheck):
    criterion = "constants"

    def _execute(self, config: SimConfig, workers: int | None = None, **kwargs) -> ExperimentResult:
        checks, rows, extras = constant_checks(config)
        return self.result(checks, tables={"constants": rows}, extras=extras)


class BubblingCheck(AcceptanceCheck):
    """Cover property, equator threshold, constant map and the E[N_T] bound."""

    criterion = "bubbling"
    depends_on = ("ensemble",)
    inputs = {"ensemble": "$ensemble"}

    def _execute(
        self, config: SimConfig, workers: int | None = None, ensemble: EnsembleRun | None = None, **kwargs
    ) -> ExperimentResult:
        grid = Grid(COVER_N)
        cover = build_cover(grid, COVER_RADIUS, config.bubble.dilation)
        equator = make_initial(InitialKind.EQUATOR, {}, grid)
        window = cover.local_energy_sup(equator)[0]
        below = detect_stop([equator], cover, 0.9 * window)
        above = detect_stop([equator], cover, 1.1 * window)

        setup = ensemble.setup
        constant = evolve(
            make_initial(InitialKind.CONSTANT, {}, setup.grid),
            setup.model,
            setup.scheme,
            setup.T,
            BubbleObserver(setup.cover, ensemble.eps1),
            record_stride=config.sim.record_stride,
            cover=setup.cover,
            master_seed=config.ensemble.master_seed,
        )
        return self.result(
            [
                CheckResult(
                    name="cover_property",
                    passed=cover.verify(),
                    statistics={"n": COVER_N, "radius": COVER_RADIUS, "centers": cover.count},
                ),
                CheckResult(
                    name="equator_threshold",
                    passed=below == 0 and above is None,
                    statistics={"window_energy": window, "below": below, "above": above},
                ),
                CheckResult(
                    name="constant_map_quiet",
                    passed=constant.stop_reason is None,
                    statistics={
                        "eps1": ensemble.eps1,
                        "max_local_energy": max(constant.series["local_energy_sup"]),
                    },
                ),
                *event_bound_verdicts(ensemble),
            ]
        )


class GronwallCheck(AcceptanceCheck):
    criterion = "gronwall"

    def _execute(self, config: SimConfig, workers: int | None = None, **kwargs) -> ExperimentResult:
        checks, _, constant = gronwall_checks(build_setup(config), workers)
        return self.result(checks, extras={"gronwall_constant": constant})


class ReproducibilityCheck(AcceptanceCheck):
    """Series and ledger text of a small ensemble, run twice serially and once on 8 workers."""

    criterion = "reproducibility"
    depends_on = ("pilot",)
    inputs = {"eps1": "$pilot.eps1"}

    def _execute(
        self, config: SimConfig, workers: int | None = None, eps1: float = math.inf, **kwargs
    ) -> ExperimentResult:
        setup = build_setup(config)
        count = config.verify.reproducibility_count
        digests = []
        for degree in REPRODUCIBILITY_WORKERS:
            run = run_ensemble(setup, eps1, workers=degree, count=count)
            text = series_text(run.records) + ledger_text(ledger_rows(run.records))
            digests.append(hashlib.sha256(text.encode("utf-8")).hexdigest())
        return self.result(
            [
                CheckResult(
                    name="reproducibility",
                    passed=len(set(digests)) == 1,
                    statistics={
                        "workers": list(REPRODUCIBILITY_WORKERS),
                        "trajectories": count,
                        "sha256": digests,
                    },
                )
            ]
        )


class PilotExperiment(SimExperiment):
    """Noiseless pilot: tol_det and the ε₁ the ensemble runs with."""

    def __init__(self):
        super().__init__(name="pilot")

    def _execute(self, config: SimConfig, workers: int | None = None, **kwargs) -> dict[str, Any]:
        pilot = run_pilot(build_setup(config))
        return {"tol_det": pilot.tol_det, "eps1": pilot.eps1, "pilot": pilot}


class EnsembleRunExperiment(SimExperiment):
    """The Monte Carlo ensemble shared by the statistical checks."""

    def __init__(self):
        super().__init__(name="ensemble-run")

    def _execute(
        self, config: SimConfig, workers: int | None = None, eps1: float = math.inf, **kwargs
    ) -> EnsembleRun:
        return run_ensemble(build_setup(config), eps1, workers)


ACCEPTANCE_CHECKS: tuple[type[AcceptanceCheck], ...] = (
    SpectralCalculusCheck,
    HarmonicFixedPointsCheck,
    EnergyDecayCheck,
    EnergyIdentityCheck,
    QuadraticVariationCheck,
    SupermartingaleCheck,
    SphereConstraintCheck,
    HeleinCheck,
    DivIdentityCheck,
    WenteCheck,
    ConstantsCheck,
    BubblingCheck,
    GronwallCheck,
    ReproducibilityCheck,
)
