"""Unit tests for the Helein decomposition and the Wente solves."""

import math

import numpy as np
import pytest

from src.core.exceptions import SingularModeError, WenteError
from src.flow import StepScheme, evolve
from src.helein import (
    HELEIN_SERIES,
    WENTE_COLUMNS,
    AlphaTensionBound,
    HeleinObserver,
    alpha_tension_bound,
    contraction,
    gain_series,
    helein_sample,
    helein_tensor,
    helmholtz_increments,
    helmholtz_split,
    nonlinearity_split,
    poisson_bracket,
    wente_solve,
    wente_sweep,
)
from src.torus import ScalarField, gradient


@pytest.fixture
def sines(grid):
    x1, x2 = grid.x
    return ScalarField(grid, np.sin(x1)), ScalarField(grid, np.sin(x2))


@pytest.mark.unit
class TestHeleinTensor:
    """Tests for the antisymmetric tensor A(u)."""

    def test_antisymmetric(self, smooth_u):
        """Test A^{i,j} = −A^{j,i}."""
        assert helein_tensor(smooth_u).antisymmetry_defect() == 0.0

    def test_equator_tensor_is_constant(self, equator):
        """Test A^{1,2}_1 ≡ 1 and nothing else for the equator."""
        A = helein_tensor(equator).values
        assert np.allclose(A[0, 1, 0], 1.0, atol=1e-13)
        assert np.allclose(A[1, 0, 0], -1.0, atol=1e-13)
        assert np.max(np.abs(A[:, :, 1])) < 1e-13

    def test_contraction_gives_nonlinearity(self, equator):
        """Test A⋮∇u = u|∇u|² for the equator, where |∇u| ≡ 1."""
        result = contraction(helein_tensor(equator), gradient(equator))
        assert np.allclose(result.values, equator.values, atol=1e-12)


@pytest.mark.unit
class TestHelmholtzSplit:
    """Tests for the mean + ∇α + ∇⊥β splitting."""

    def test_reconstruction_and_orthogonality(self, smooth_u):
        """Test the parts rebuild A and are L²-orthogonal."""
        split = helmholtz_split(helein_tensor(smooth_u))
        assert split.residual < 1e-10
        for value in split.cross_products().values():
            assert abs(value) < 1e-10

    def test_constant_tensor_lands_in_mean(self, equator):
        """Test a constant tensor has vanishing potentials."""
        split = helmholtz_split(helein_tensor(equator))
        assert split.mean[0, 1, 0] == pytest.approx(1.0)
        assert np.max(np.abs(split.alpha.values)) < 1e-12
        assert np.max(np.abs(split.beta.values)) < 1e-12

    def test_nonlinearity_parts_sum(self, smooth_u):
        """Test mean⋮∇u + ∇α⋮∇u + ∇⊥β⋮∇u = A⋮∇u."""
        A = helein_tensor(smooth_u)
        parts = nonlinearity_split(smooth_u, helmholtz_split(A))
        total = sum(part.values for part in parts.values())
        assert np.allclose(total, contraction(A, gradient(smooth_u)).values, atol=1e-9)


@pytest.mark.unit
class TestHeleinSeries:
    """Tests for helein_sample and the time-integrated bound."""

    def test_equator_sample(self, equator):
        """Test a harmonic map has no tension and no potential α."""
        _, sample = helein_sample(equator)
        assert set(sample) == set(HELEIN_SERIES)
        assert sample["tension_sq"] < 1e-20
        assert sample["laplacian_alpha_sq"] < 1e-20
        assert sample["div_identity_defect"] < 1e-12

    def test_divergence_identity(self, smooth_u):
        """Test div A = u∧Δu on smooth data."""
        _, sample = helein_sample(smooth_u)
        assert sample["div_identity_defect"] < 1e-8

    def test_alpha_tension_ratio(self, smooth_u):
        """Test ∫‖Δα‖² ≈ 2∫‖τ‖² for sphere-valued data."""
        bound = alpha_tension_bound([smooth_u, smooth_u], [0.0, 1.0])
        assert bound.ratio == pytest.approx(2.0, rel=0.05)
        assert bound.max_div_defect < 1e-8

    def test_single_sample_bound(self):
        """Test fewer than two samples give an empty integral."""
        bound = AlphaTensionBound.from_series([0.0], [1.0], [1.0], [0.0])
        assert bound.lhs == 0.0
        assert bound.ratio == 0.0

    def test_observer_along_trajectory(self, smooth_u, noise_model):
        """Test the observer adds every Helein series and keeps the splits."""
        observer = HeleinObserver(keep_splits=True)
        record = evolve(smooth_u, noise_model, StepScheme(dt=1e-3), 0.004, observer)
        for name in HELEIN_SERIES:
            assert len(record.series[name]) == len(record.times)
        assert len(observer.splits) == len(record.times)
        bound = AlphaTensionBound.from_record(record)
        assert bound.ratio == pytest.approx(2.0, rel=0.05)

        rows = helmholtz_increments(observer.splits, gain_series(record, noise_model), noise_model.c_phi)
        assert len(rows) == len(record.times) - 1
        energies = record.values("energy")
        assert rows[0]["energy_change"] == pytest.approx(energies[1] - energies[0])


@pytest.mark.unit
class TestGainSeries:
    """Tests for 𝒢 = E − c_φt."""

    def test_increments_and_shift(self, make_record, quiet_model):
        """Test increments over index pairs and a linear shift."""
        record = make_record(0, [0.0, 1.0, 2.0], energy=[1.0, 2.0, 4.0])
        gains = gain_series(record, quiet_model)
        assert gains.increments([(0, 2), (1, 2)]).tolist() == [3.0, 2.0]
        assert gains.shifted(1.0).g.tolist() == [1.0, 3.0, 6.0]
        assert gains.subsample([0, 2]).times.tolist() == [0.0, 2.0]

    def test_gain_subtracts_injection(self, make_record, noise_model):
        """Test 𝒢(t) = E_t − c_φt."""
        record = make_record(0, [0.0, 1.0], energy=[1.0, 1.0])
        gains = gain_series(record, noise_model)
        assert gains.g[1] == pytest.approx(1.0 - noise_model.c_phi)


@pytest.mark.unit
class TestWente:
    """Tests for the bracket-sourced solves."""

    def test_poisson_bracket(self, sines):
        """Test {sin x₁, sin x₂} = cos x₁ cos x₂."""
        a, b = sines
        x1, x2 = a.grid.x
        bracket = poisson_bracket(a, b)
        assert np.max(np.abs(bracket.values - np.cos(x1) * np.cos(x2))) < 1e-13

    def test_helmholtz_solution(self, sines):
        """Test (I − Δ)φ = cos x₁ cos x₂ gives φ = cos x₁ cos x₂/3."""
        a, b = sines
        x1, x2 = a.grid.x
        solution = wente_solve(a, b)
        assert np.max(np.abs(solution.phi.values - np.cos(x1) * np.cos(x2) / 3)) < 1e-13
        assert solution.sup == pytest.approx(1.0 / 3.0)
        assert solution.grad_a == pytest.approx(math.pi * math.sqrt(2.0))
        assert solution.ratio > 0.0

    def test_laplace_solution(self, sines):
        """Test Δφ = cos x₁ cos x₂ gives φ = −cos x₁ cos x₂/2."""
        a, b = sines
        x1, x2 = a.grid.x
        solution = wente_solve(a, b, mode="laplace")
        assert np.max(np.abs(solution.phi.values + np.cos(x1) * np.cos(x2) / 2)) < 1e-13

    def test_literal_mode_kernel(self, grid):
        """Test |k|² = 1 content raises unless projected out."""
        x1, x2 = grid.x
        a = ScalarField(grid, np.sin(x1))
        b = ScalarField(grid, np.sin(x1 + x2))
        with pytest.raises(SingularModeError):
            wente_solve(a, b, mode="literal")
        solution = wente_solve(a, b, mode="literal", project_kernel=True)
        expected = -np.cos(2 * x1 + x2) / 8
        assert np.max(np.abs(solution.phi.values - expected)) < 1e-13

    def test_literal_mode_away_from_kernel(self, sines):
        """Test (I + Δ)φ = cos x₁ cos x₂ gives φ = −cos x₁ cos x₂."""
        a, b = sines
        x1, x2 = a.grid.x
        solution = wente_solve(a, b, mode="literal")
        assert np.max(np.abs(solution.phi.values + np.cos(x1) * np.cos(x2))) < 1e-13

    def test_unknown_mode(self, sines):
        """Test an unknown mode is rejected."""
        with pytest.raises(WenteError):
            wente_solve(*sines, mode="biharmonic")

    def test_sup_on_finer_grid(self, sines):
        """Test the interpolated sup matches the exact one for band-limited φ."""
        solution = wente_solve(*sines, sup_grid=128)
        assert solution.sup == pytest.approx(1.0 / 3.0, rel=1e-12)


@pytest.mark.unit
class TestWenteSweep:
    """Tests for wente_sweep."""

    def test_rows(self):
        """Test one row per pair with every column."""
        rows = wente_sweep(3, 32, sup_grid=64)
        assert len(rows) == 3
        assert [row["seed"] for row in rows] == [0, 1, 2]
        for row in rows:
            assert set(row) == set(WENTE_COLUMNS)
            assert row["ratio"] > 0.0

    def test_ratios_agree_across_grids(self):
        """Test the same pairs give the same ratios on every grid."""
        coarse = wente_sweep(2, 32, sup_grid=128)
        fine = wente_sweep(2, 64, sup_grid=128)
        for left, right in zip(coarse, fine):
            assert left["ratio"] == pytest.approx(right["ratio"], rel=1e-9)

    def test_empty_sweep(self):
        """Test count < 1 is rejected."""
        with pytest.raises(WenteError):
            wente_sweep(0, 32)
