"""Unit tests for ball covers, stopping times and restarts."""

import math

import numpy as np
import pytest

from src.bubble import (
    BlowupEvent,
    BubbleObserver,
    WindowEnergyObserver,
    bound_check,
    build_cover,
    count_events,
    detect_stop,
    restart,
    run_with_restarts,
)
from src.core.exceptions import BubbleError, RadiusOutOfRangeError
from src.flow import StepScheme, evolve, make_initial
from src.flow.integrator import FlowState
from src.torus.grid import Grid


def event(time: float, drop: float = 1.0) -> BlowupEvent:
    return BlowupEvent(
        time=time,
        step=0,
        center=None,
        local_energy=None,
        energy_pre=drop,
        energy_post=0.0,
        drop=drop,
        quantum=True,
    )


@pytest.fixture
def cover64():
    return build_cover(Grid(64), math.pi / 8)


@pytest.mark.unit
class TestBallCover:
    """Tests for build_cover and BallCover."""

    def test_cover_property(self, cover64):
        """Test every ball B(x, ϱ) lies in some dilated ball."""
        assert cover64.count == 256
        assert cover64.verify()

    def test_radius_below_three_spacings(self, grid):
        """Test ϱ < 3h is rejected."""
        with pytest.raises(RadiusOutOfRangeError):
            build_cover(grid, 0.3)

    def test_radius_above_diameter(self, grid):
        """Test ϱ ≥ π√2/λ is rejected."""
        with pytest.raises(RadiusOutOfRangeError):
            build_cover(grid, 2.5)

    def test_dilation_must_exceed_one(self, grid):
        """Test λ ≤ 1 is rejected."""
        with pytest.raises(RadiusOutOfRangeError):
            build_cover(grid, 0.7, dilation=1.0)

    def test_window_gradient_bound(self, cover64):
        """Test max|∇η| ≤ C_η/ϱ with C_η = 15/(8λ)."""
        window = cover64.window
        assert window.gradient_constant == pytest.approx(15.0 / 16.0)
        assert window.max_gradient() <= 1.05 * window.gradient_constant / window.radius
        assert window.values[0, 0] == 1.0

    def test_constant_map_has_no_local_energy(self, cover64):
        """Test a constant map carries no local energy."""
        u = make_initial("constant", {}, cover64.grid)
        value, _ = cover64.local_energy_sup(u)
        assert value == pytest.approx(0.0, abs=1e-14)

    def test_equator_tie_goes_to_first_center(self, cover64):
        """Test equal window energies resolve to the lowest index."""
        u = make_initial("equator", {}, cover64.grid)
        energies = cover64.window_energies(u)
        value, center = cover64.local_energy_sup(u)
        assert np.allclose(energies, energies[0], rtol=1e-12)
        assert value == pytest.approx(float(np.sum(cover64.window.values**2)) * cover64.grid.area)
        assert center == (0.0, 0.0)

    def test_sharp_mode(self, cover64):
        """Test the sharp indicator gives |B(ϱ)|·|∇u|² for the equator."""
        u = make_initial("equator", {}, cover64.grid)
        value, _ = cover64.local_energy_sup(u, "sharp")
        assert value == pytest.approx(math.pi * (math.pi / 8) ** 2, rel=0.05)

    def test_unknown_mode(self, cover64):
        """Test an unknown local energy mode is rejected."""
        u = make_initial("equator", {}, cover64.grid)
        with pytest.raises(BubbleError):
            cover64.local_energy_sup(u, "fuzzy")


@pytest.mark.unit
class TestDetectStop:
    """Tests for detect_stop."""

    def test_equator_threshold(self, cover64):
        """Test the equator triggers just below its window energy and not above."""
        u = make_initial("equator", {}, cover64.grid)
        window = cover64.local_energy_sup(u)[0]
        assert detect_stop([u], cover64, 0.9 * window) == 0
        assert detect_stop([u], cover64, 1.1 * window) is None

    def test_first_triggering_index(self, cover64):
        """Test the index of the first field above ε₁ is returned."""
        grid = cover64.grid
        fields = [make_initial(kind, {}, grid) for kind in ("constant", "constant", "concentrated")]
        assert detect_stop(fields, cover64, 0.5) == 2

    def test_non_positive_threshold(self, cover64):
        """Test ε₁ ≤ 0 is rejected."""
        with pytest.raises(BubbleError):
            detect_stop([], cover64, 0.0)


@pytest.mark.unit
class TestRestart:
    """Tests for restart and run_with_restarts."""

    def test_restart_is_idempotent(self):
        """Test a second restart at the same step changes nothing."""
        u = make_initial("concentrated", {"epsilon": 0.2}, Grid(64))
        ledger: list = []
        state = FlowState(u=u, dt=1e-3, step=7)
        once = restart(state, 2.0, ledger, eps1=0.1)
        twice = restart(once, 2.0, ledger, eps1=0.1)
        assert twice is once
        assert len(ledger) == 1
        assert once.step == 7
        assert once.u.sphere_defect() < 1e-14

    def test_restart_drops_energy(self):
        """Test the low-pass surrogate removes the concentrated energy."""
        u = make_initial("concentrated", {"epsilon": 0.2}, Grid(64))
        ledger: list = []
        restart(FlowState(u=u, dt=1e-3), 2.0, ledger, eps1=0.1)
        recorded = ledger[0]
        assert recorded.drop > 0.1
        assert recorded.quantum
        assert recorded.drop == pytest.approx(recorded.energy_pre - recorded.energy_post)
        assert recorded.to_dict()["surrogate"] == "low_pass_projection"

    def test_restart_keeps_band_limited_data(self, equator):
        """Test the equator survives a restart unchanged."""
        ledger: list = []
        restarted = restart(FlowState(u=equator, dt=1e-3), 8.0, ledger, eps1=1.0)
        assert np.allclose(restarted.u.values, equator.values, atol=1e-12)
        assert not ledger[0].quantum

    def test_run_without_events(self, grid, quiet_model):
        """Test a constant map never restarts."""
        cover = build_cover(grid, 0.7)
        u0 = make_initial("constant", {}, grid)
        record = run_with_restarts(u0, quiet_model, StepScheme(dt=1e-3), 0.01, cover, eps1=0.1)
        assert record.events == []
        assert record.stop_reason is None
        assert "local_energy_sup" in record.series

    def test_detector_disarms_after_restart(self, grid, smooth_u, noise_model):
        """Test one restart per excursion above ε₁."""
        cover = build_cover(grid, 0.7)
        record = run_with_restarts(
            smooth_u, noise_model, StepScheme(dt=1e-3), 0.01, cover, eps1=1e-8, max_restarts=3
        )
        assert len(record.events) == 1
        assert record.events[0].step == 0
        assert record.stop_reason is None

    def test_max_restarts_stops_run(self, grid, smooth_u, noise_model):
        """Test reaching ε₁ with no restarts left stops the trajectory."""
        cover = build_cover(grid, 0.7)
        record = run_with_restarts(
            smooth_u, noise_model, StepScheme(dt=1e-3), 0.01, cover, eps1=1e-8, max_restarts=0
        )
        assert record.events == []
        assert record.stop_reason == "max_restarts=0 reached"
        assert record.stop_time == 0.0
        assert list(record.times) == [0.0]

    def test_concentrated_data_restart_at_zero(self, grid, noise_model):
        """Test data above ε₁ at t = 0 restart before the first step."""
        cover = build_cover(grid, 0.7)
        u0 = make_initial("concentrated", {"epsilon": 0.3}, grid)
        assert cover.local_energy_sup(u0)[0] >= 0.5

        record = run_with_restarts(
            u0, noise_model, StepScheme(dt=1e-3), 0.005, cover, eps1=0.5, restart_cutoff=2.0
        )

        first = record.events[0]
        assert first.time == 0.0
        assert first.step == 0
        assert first.local_energy >= 0.5
        assert record.values("energy")[0] == pytest.approx(first.energy_post)


@pytest.mark.unit
class TestObservers:
    """Tests for bubbling observers."""

    def test_bubble_observer_stops(self, grid, noise_model):
        """Test concentrated data stop at the first sample."""
        cover = build_cover(grid, 0.7)
        u0 = make_initial("concentrated", {"epsilon": 0.3}, grid)
        record = evolve(
            u0, noise_model, StepScheme(dt=1e-3), 0.01, BubbleObserver(cover, 0.5), cover=cover
        )
        assert record.stop_time == 0.0
        assert "eps1" in record.stop_reason

    def test_window_energy_observer(self, grid, smooth_u, noise_model):
        """Test the window energy series is recorded and bounded by the energy."""
        cover = build_cover(grid, 0.7)
        record = evolve(
            smooth_u, noise_model, StepScheme(dt=1e-3), 0.005, WindowEnergyObserver(cover)
        )
        window = record.values("window_energy")
        assert len(window) == len(record.times)
        assert np.all(window <= record.values("energy") + 1e-12)


@pytest.mark.unit
class TestEventBound:
    """Tests for event counts and the E[N_T] bound."""

    def test_count_events_is_strict(self):
        """Test N_t counts events strictly before t."""
        ledger = [event(0.1), event(0.2), event(0.3)]
        assert count_events(ledger, 0.2) == 1
        assert count_events(ledger, 1.0) == 3

    def test_bound_check(self):
        """Test the mean count against (2E₀ + c_φT)/ε₁."""
        ledgers = [[event(0.1)], [], [event(0.1), event(0.2)]]
        verdict = bound_check(ledgers, initial_energy=1.0, c_phi=0.0, T=1.0, eps1=1.0)
        assert verdict.mean_count == pytest.approx(1.0)
        assert verdict.bound == pytest.approx(2.0)
        assert verdict.passed
        assert not bound_check(ledgers, 0.25, 0.0, 1.0, 1.0).passed
