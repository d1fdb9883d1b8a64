"""Unit tests for energy balances, ensemble checks and interpolation constants."""

import math

import numpy as np
import pytest

from src.bubble import BlowupEvent, WindowEnergyObserver, build_cover
from src.core.exceptions import DiagnosticsError, InsufficientEnsembleError
from src.diagnostics import (
    Z_SCORE,
    bootstrap_variance_se,
    c0_ratio,
    c1_ratio,
    default_eps1,
    energy_identity_check,
    energy_increase,
    ensemble_summary,
    estimate_C0,
    estimate_C1,
    l4l4_norm,
    local_dissipation_check,
    local_dissipation_defect,
    martingale_residual,
    measure_tol_det,
    measured_order,
    moment_bounds,
    qv_check,
    require_ensemble,
    select_time_indices,
    stack_series,
    standard_error,
    supermartingale_test,
)
from src.diagnostics.constants import ConstantEstimate
from src.flow import StepScheme, evolve, make_initial
from src.helein import GainSeries
from src.torus import ScalarField


def balanced_records(make_record, count: int = 3):
    """Records whose energy loss equals their dissipation."""
    return [
        make_record(i, [0.0, 0.1], energy=[1.0, 0.5], tension_integral=[0.0, 0.5])
        for i in range(count)
    ]


@pytest.mark.unit
class TestStatistics:
    """Tests for ensemble estimators."""

    def test_z_score(self):
        """Test the two-sided 99% normal quantile."""
        assert Z_SCORE == pytest.approx(2.5758, abs=1e-4)

    def test_standard_error(self):
        """Test s/√M with ddof = 1, and zero for one sample."""
        assert standard_error(np.array([1.0, 2.0, 3.0])) == pytest.approx(1.0 / math.sqrt(3.0))
        assert standard_error(np.array([4.0])) == 0.0

    def test_require_ensemble(self):
        """Test small ensembles are refused."""
        require_ensemble(100)
        with pytest.raises(InsufficientEnsembleError):
            require_ensemble(99)

    def test_bootstrap_variance_se(self, rng):
        """Test the bootstrap error is positive and vanishes for tiny samples."""
        assert bootstrap_variance_se(rng.standard_normal(50)) > 0.0
        assert bootstrap_variance_se(np.array([1.0, 2.0])) == 0.0

    def test_stack_series_orders_by_id(self, make_record):
        """Test rows follow trajectory ids, not input order."""
        records = [make_record(1, [0.0], energy=[2.0]), make_record(0, [0.0], energy=[1.0])]
        assert stack_series(records, "energy").tolist() == [[1.0], [2.0]]

    def test_stack_series_errors(self, make_record):
        """Test missing series and mismatched times are rejected."""
        records = [make_record(0, [0.0, 0.1], energy=[1.0, 1.0])]
        with pytest.raises(DiagnosticsError):
            stack_series(records, "qv")
        records.append(make_record(1, [0.0, 0.2], energy=[1.0, 1.0]))
        with pytest.raises(DiagnosticsError):
            stack_series(records, "energy")
        with pytest.raises(DiagnosticsError):
            stack_series([], "energy")

    def test_ensemble_summary(self, make_record):
        """Test means and 99% half-widths per sample time."""
        records = [make_record(i, [0.0, 0.1], energy=[1.0, float(i)]) for i in range(3)]
        summary = ensemble_summary(records, "energy")
        energy = summary.quantities["energy"]
        assert summary.count == 3
        assert energy.mean.tolist() == pytest.approx([1.0, 1.0])
        assert energy.half_width[1] == pytest.approx(Z_SCORE / math.sqrt(3.0))
        assert summary.to_dict()["confidence"] == 0.99


@pytest.mark.unit
class TestEnergyBalance:
    """Tests for single-trajectory energy quantities."""

    def test_martingale_residual(self, make_record, quiet_model):
        """Test M̂ vanishes when the loss equals the dissipation."""
        record = balanced_records(make_record, 1)[0]
        assert martingale_residual(record, quiet_model).tolist() == [0.0, 0.0]

    def test_residual_adds_back_restart_drops(self, make_record, quiet_model):
        """Test energy removed by restarts does not enter M̂."""
        record = make_record(0, [0.0, 0.1, 0.2], energy=[1.0, 1.0, 0.4], tension_integral=[0.0] * 3)
        record.events.append(
            BlowupEvent(
                time=0.15,
                step=15,
                center=None,
                local_energy=None,
                energy_pre=1.0,
                energy_post=0.4,
                drop=0.6,
                quantum=True,
            )
        )
        assert martingale_residual(record, quiet_model) == pytest.approx([0.0, 0.0, 0.0])

    def test_restart_at_time_zero(self, make_record, quiet_model):
        """Test a restart before the first step is already in E₀."""
        record = make_record(0, [0.0, 0.1], energy=[0.4, 0.4], tension_integral=[0.0] * 2)
        record.events.append(
            BlowupEvent(
                time=0.0,
                step=0,
                center=None,
                local_energy=None,
                energy_pre=1.0,
                energy_post=0.4,
                drop=0.6,
                quantum=True,
            )
        )
        assert martingale_residual(record, quiet_model) == pytest.approx([0.0, 0.0])

    def test_residual_subtracts_injection(self, make_record, noise_model):
        """Test the c_φ·t term."""
        record = make_record(0, [0.0, 1.0], energy=[1.0, 1.0], tension_integral=[0.0, 0.0])
        assert martingale_residual(record, noise_model)[1] == pytest.approx(-noise_model.c_phi)

    def test_measure_tol_det(self, make_record, quiet_model, noise_model):
        """Test the allowance is the largest residual of a noiseless pilot."""
        record = make_record(0, [0.0, 0.1], energy=[1.0, 0.5], tension_integral=[0.0, 0.4])
        assert measure_tol_det(record, quiet_model) == pytest.approx(0.1)
        assert measure_tol_det(balanced_records(make_record, 1)[0], quiet_model) == 1e-12
        with pytest.raises(DiagnosticsError):
            measure_tol_det(record, noise_model)

    def test_energy_increase(self, make_record):
        """Test the largest upward jump between samples."""
        record = make_record(0, [0.0, 0.1, 0.2], energy=[1.0, 0.5, 0.7])
        assert energy_increase(record) == pytest.approx(0.2)
        assert energy_increase(make_record(0, [0.0], energy=[1.0])) == 0.0

    def test_measured_order(self):
        """Test log₂ of the error ratio."""
        assert measured_order(0.4, 0.1) == pytest.approx(2.0)
        with pytest.raises(DiagnosticsError):
            measured_order(0.0, 0.1)

    def test_l4l4_norm(self, make_record):
        """Test (∫‖∇u‖⁴_{L⁴})^{1/4} of a constant integrand."""
        record = make_record(0, [0.0, 0.5, 1.0], grad_l4_4=[16.0, 16.0, 16.0])
        assert l4l4_norm(record) == pytest.approx(2.0)


@pytest.mark.unit
class TestEnsembleChecks:
    """Tests for the energy identity, quadratic variation and gain checks."""

    def test_energy_identity_passes(self, make_record, quiet_model):
        """Test a balanced ensemble passes."""
        result = energy_identity_check(balanced_records(make_record), quiet_model, 1e-12, min_ensemble=3)
        assert result.passed
        assert result.statistics["count"] == 3

    def test_energy_identity_fails(self, make_record, quiet_model):
        """Test a systematic residual fails with a message."""
        records = [
            make_record(i, [0.0, 0.1], energy=[1.0, 2.0], tension_integral=[0.0, 0.0])
            for i in range(3)
        ]
        result = energy_identity_check(records, quiet_model, 1e-12, min_ensemble=3)
        assert not result.passed
        assert "t=0.1" in result.message

    def test_energy_identity_needs_ensemble(self, make_record, quiet_model):
        """Test the default floor refuses three trajectories."""
        with pytest.raises(InsufficientEnsembleError):
            energy_identity_check(balanced_records(make_record), quiet_model, 1e-12)

    def test_qv_check(self, make_record, quiet_model):
        """Test Var M̂(T) against the mean of Q̂(T)."""
        finals = [0.0, 1.0, 2.0, 3.0, 4.0]

        def records(qv):
            return [
                make_record(i, [0.0, 0.1], energy=[0.0, x], tension_integral=[0.0, 0.0], qv=[0.0, qv])
                for i, x in enumerate(finals)
            ]

        matched = qv_check(records(2.5), quiet_model, min_ensemble=5)
        assert matched.passed
        assert matched.statistics["variance"] == pytest.approx(2.5)
        assert not qv_check(records(100.0), quiet_model, min_ensemble=5).passed

    def test_select_time_indices(self):
        """Test evenly spread indices including both ends."""
        assert select_time_indices(3) == [0, 1, 2]
        indices = select_time_indices(20)
        assert len(indices) == 6
        assert indices[0] == 0
        assert indices[-1] == 19

    def test_supermartingale_passes(self):
        """Test decreasing gains pass."""
        times = np.array([0.0, 0.1, 0.2])
        gains = [GainSeries(times, np.array([1.0, 0.8, 0.5]) - 0.01 * i, i) for i in range(10)]
        result = supermartingale_test(gains, slack=0.0, min_ensemble=10)
        assert result.passed
        assert len(result.statistics["pairs"]) == 3

    def test_supermartingale_fails(self):
        """Test increasing gains fail."""
        times = np.array([0.0, 0.1, 0.2])
        gains = [GainSeries(times, np.array([0.0, 1.0, 2.0]) + 0.01 * i, i) for i in range(10)]
        assert not supermartingale_test(gains, slack=0.0, min_ensemble=10).passed

    @staticmethod
    def drifting_gains(rate: float, count: int = 50) -> list[GainSeries]:
        rng = np.random.default_rng(3)
        times = np.linspace(0.0, 1.0, 6)
        return [
            GainSeries(times, rate * times + 1e-3 * rng.standard_normal(times.size), i)
            for i in range(count)
        ]

    def test_fixed_drift_control_rejected(self):
        """Test 𝒢 + 0.1·t is rejected when 𝒢 decreases slower than 0.1."""
        from src.experiments.ensemble import supermartingale_controls

        test, fixed, adaptive = supermartingale_controls(
            self.drifting_gains(-0.05), tol_det=0.0, min_ensemble=50
        )

        assert test.passed
        assert fixed.name == "supermartingale_negative_control"
        assert fixed.statistics["rate"] == 0.1
        assert fixed.passed
        assert not fixed.statistics["control_passed"]
        assert adaptive.passed

    def test_fixed_drift_hidden_by_strong_decay(self):
        """Test the fixed drift control reports a miss the adaptive one cannot."""
        from src.experiments.ensemble import supermartingale_controls

        test, fixed, adaptive = supermartingale_controls(
            self.drifting_gains(-0.5), tol_det=0.0, min_ensemble=50
        )

        assert test.passed
        assert not fixed.passed
        assert adaptive.passed
        assert adaptive.statistics["rate"] > 0.5


@pytest.mark.unit
class TestLocalDissipation:
    """Tests for the local energy inequality and moment bounds."""

    def test_defect_of_constant_window(self, make_record, noise_model, grid):
        """Test a frozen window energy leaves only the injection term."""
        cover = build_cover(grid, 0.7)
        record = make_record(0, [0.0, 1.0], window_energy=[1.0, 1.0], grad_sq_integral=[0.0, 0.0])
        defect = local_dissipation_defect(record, noise_model, cover)
        assert defect[0] == 0.0
        assert defect[1] < 0.0

    def test_deterministic_inequality(self, grid, smooth_u, quiet_model):
        """Test the noiseless flow satisfies the local energy inequality."""
        cover = build_cover(grid, 0.7)
        record = evolve(smooth_u, quiet_model, StepScheme(dt=1e-3), 0.01, WindowEnergyObserver(cover))
        assert np.all(local_dissipation_defect(record, quiet_model, cover) <= 1e-10)
        assert local_dissipation_check([record], quiet_model, cover, min_ensemble=1).passed

    def test_moment_bounds(self, make_record):
        """Test the moments are ensemble means of powers."""
        records = [
            make_record(
                i,
                [0.0, 0.1],
                energy=[1.0 + i, 0.5],
                tension_integral=[0.0, 1.0],
                laplacian_integral=[0.0, 2.0],
            )
            for i in range(2)
        ]
        result = moment_bounds(records, exponents=(2.0,))
        row = result.statistics["rows"][0]
        assert result.passed
        assert row["sup_energy"] == pytest.approx(2.5)
        assert row["laplacian_integral"] == pytest.approx(4.0)


@pytest.mark.unit
class TestConstants:
    """Tests for the interpolation constant estimators."""

    def test_c0_ratio_of_sine(self, grid):
        """Test the ratio of sin x₁ is 3/(8π²)."""
        f = ScalarField(grid, np.sin(grid.x[0]))
        assert c0_ratio(f) == pytest.approx(3.0 / (8.0 * math.pi**2))

    def test_c0_ratio_of_constant(self, grid):
        """Test constants have no ratio."""
        assert c0_ratio(ScalarField.constant(grid, 2.0)) is None

    def test_estimate_C0_is_grid_independent(self):
        """Test the same functions give the same estimate on every grid."""
        estimate = estimate_C0(5, [32, 64])
        assert estimate.grid_sizes == [32, 64]
        assert estimate.stability < 1e-12
        assert estimate.value > 0.0
        history = estimate.running_max[32]
        assert history == sorted(history)
        with pytest.raises(DiagnosticsError):
            estimate_C0(0, [32])

    def test_running_max(self):
        """Test add keeps the running maximum."""
        estimate = ConstantEstimate("C0")
        for ratio in (0.2, 0.1, 0.4):
            estimate.add(32, ratio)
        assert estimate.running_max[32] == [0.2, 0.2, 0.4]
        assert estimate.eps1_star == pytest.approx(2.5)
        assert estimate.to_dict()["per_grid"] == {"32": 0.4}

    def test_c1_ratio(self, smooth_u, grid):
        """Test the C₁ ratio is positive for smooth data and absent for constants."""
        cover = build_cover(grid, 0.7)
        local = cover.local_energy_sup(smooth_u)[0]
        assert c1_ratio(smooth_u, 0.7, local) > 0.0
        constant = make_initial("constant", {}, grid)
        assert c1_ratio(constant, 0.7, 0.0) is None

    def test_estimate_C1(self, smooth_u):
        """Test the estimate and the derived ε₁."""
        estimate = estimate_C1({32: [smooth_u]}, [0.7])
        assert estimate.value > 0.0
        assert default_eps1(estimate) == pytest.approx(0.5 / estimate.value)

    def test_estimate_C1_without_gradient(self, grid):
        """Test a grid with only constant fields is an error."""
        constant = make_initial("constant", {}, grid)
        with pytest.raises(DiagnosticsError):
            estimate_C1({32: [constant]}, [0.7])
