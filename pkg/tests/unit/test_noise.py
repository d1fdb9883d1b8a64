"""Unit tests for the trace-class noise model."""

import numpy as np
import pytest

from src.core.exceptions import CutoffTooLargeError, NoiseError
from src.noise import build_noise_model, trajectory_rng
from src.torus.fields import VectorField3


@pytest.mark.unit
class TestBuildNoiseModel:
    """Tests for build_noise_model."""

    def test_mode_count(self, noise_model):
        """Test one constant mode plus a cos/sin pair per half-plane wavevector."""
        assert noise_model.mode_count == 13
        assert noise_model.kinds[0] == "const"
        assert noise_model.kinds[1:3] == ("cos", "sin")

    def test_power_law_spectrum(self, noise_model):
        """Test λ = σ(1+|k|²)^(−s/2)."""
        ksq = np.sum(noise_model.wavevectors**2, axis=1)
        assert np.allclose(noise_model.lambdas, 0.1 / (1.0 + ksq))
        assert noise_model.lambdas[0] == pytest.approx(0.1)

    def test_cutoff_above_band(self, grid):
        """Test K > n/3 is rejected."""
        with pytest.raises(CutoffTooLargeError):
            build_noise_model(grid, 0.1, 2.0, 11)

    def test_negative_parameters(self, grid):
        """Test negative σ and K are rejected."""
        with pytest.raises(NoiseError):
            build_noise_model(grid, -0.1, 2.0, 2)
        with pytest.raises(NoiseError):
            build_noise_model(grid, 0.1, 2.0, -1)

    def test_spectrum_table(self, noise_model):
        """Test the table lists every mode in order."""
        table = noise_model.spectrum_table()
        assert len(table) == 13
        assert table[0] == (0, 0, "const", pytest.approx(0.1))


@pytest.mark.unit
class TestNoiseModel:
    """Tests for NoiseModel quantities."""

    def test_basis_is_orthonormal(self, noise_model):
        """Test ⟨e_ℓ, e_m⟩ = δ_ℓm on the grid."""
        basis = noise_model.basis.reshape(noise_model.mode_count, -1)
        gram = basis @ basis.T * noise_model.grid.area
        assert np.allclose(gram, np.eye(noise_model.mode_count), atol=1e-12)

    def test_c_phi_matches_gradient_density(self, noise_model):
        """Test ∫Σλ²|∇e_ℓ|² = Σλ²|k|²."""
        injected = float(noise_model.gradient_density().integral())
        assert injected == pytest.approx(noise_model.c_phi, rel=1e-12)

    def test_ito_correction_integrates_to_trace(self, noise_model):
        """Test ∫F_φ = −Σλ²."""
        total = float(noise_model.ito_correction_field().integral())
        assert total == pytest.approx(-noise_model.hs_norm(0.0), rel=1e-12)

    def test_hs_norm(self, noise_model):
        """Test the Sobolev norms grow with the index and reject negatives."""
        assert noise_model.hs_norm(1.0) > noise_model.hs_norm(0.0)
        with pytest.raises(NoiseError):
            noise_model.hs_norm(-1.0)

    def test_qv_rate_of_constant_map(self, noise_model):
        """Test a constant map has no quadratic variation."""
        u = VectorField3.constant(noise_model.grid, (0.0, 0.0, 1.0))
        assert noise_model.qv_rate(u) == 0.0


@pytest.mark.unit
class TestIncrements:
    """Tests for Brownian increments."""

    def test_increment_is_expanded_in_the_basis(self, noise_model):
        """Test dW^i = Σ_ℓ c_{i,ℓ} e_ℓ."""
        increment = noise_model.sample_increment(1e-3, trajectory_rng(0, 0))
        assert increment.coefficients.shape == (3, 13)
        assert np.allclose(noise_model.project(increment.dW.values), increment.coefficients)

    def test_increment_variance(self, noise_model):
        """Test Var c_{i,ℓ} = dt·λ_ℓ²."""
        dt = 1e-2
        rng = trajectory_rng(3, 0)
        coefficients = np.array(
            [noise_model.sample_increment(dt, rng).coefficients for _ in range(4000)]
        )
        variance = np.var(coefficients, axis=(0, 1))
        assert np.allclose(variance / (dt * noise_model.lambdas**2), 1.0, atol=0.1)

    def test_zero_sigma_consumes_the_stream(self, noise_model, quiet_model):
        """Test σ = 0 advances the generator exactly like σ > 0."""
        first = trajectory_rng(5, 2)
        second = trajectory_rng(5, 2)
        quiet = quiet_model.sample_increment(1e-3, first)
        noise_model.sample_increment(1e-3, second)
        assert np.all(quiet.dW.values == 0.0)
        assert first.standard_normal() == second.standard_normal()

    def test_rejects_non_positive_dt(self, noise_model):
        """Test dt ≤ 0 is rejected."""
        with pytest.raises(NoiseError):
            noise_model.sample_increment(0.0, trajectory_rng(0, 0))


@pytest.mark.unit
class TestTrajectoryRng:
    """Tests for per-trajectory random streams."""

    def test_same_key_same_stream(self):
        """Test streams depend only on (master seed, trajectory id)."""
        assert np.array_equal(
            trajectory_rng(11, 4).standard_normal(8), trajectory_rng(11, 4).standard_normal(8)
        )

    def test_different_ids_differ(self):
        """Test distinct trajectory ids give distinct streams."""
        assert not np.array_equal(
            trajectory_rng(11, 4).standard_normal(8), trajectory_rng(11, 5).standard_normal(8)
        )
