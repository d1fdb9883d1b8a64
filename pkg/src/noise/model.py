"""Isotropic trace-class Wiener noise on the torus.

The noise is W = Σ_ℓ B_ℓ λ_ℓ e_ℓ with the real orthonormal basis

    e₀ = 1/(2π),  cos(k·x)/(π√2),  sin(k·x)/(π√2)

over one representative k of every ±k pair with |k| ≤ K, and the power-law
spectrum λ = σ(1+|k|²)^(−s/2). Each of the three target components draws
its own independent Brownian coefficients.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from src.core.exceptions import CutoffTooLargeError, NoiseError
from src.torus.fields import Field, ScalarField, VectorField3
from src.torus.grid import Grid
from src.torus.spectral import gradient, half_plane_modes, laplacian, lift, restrict

CONSTANT_NORM = 1.0 / (2.0 * math.pi)
WAVE_NORM = 1.0 / (math.pi * math.sqrt(2.0))


def trajectory_rng(master_seed: int, trajectory_id: int) -> np.random.Generator:
    """Counter-based stream keyed by (master seed, trajectory id)."""
    sequence = np.random.SeedSequence([int(master_seed), int(trajectory_id)])
    return np.random.Generator(np.random.Philox(sequence))


@dataclass(frozen=True)
class NoiseIncrement:
    """One Brownian increment dW over a step of length dt.

    Attributes:
        dW: Increment field, one independent draw per target component
        dt: Step length
        coefficients: √dt·g_{i,ℓ}·λ_ℓ of shape (3, L), so dW^i = Σ_ℓ c_{i,ℓ} e_ℓ
    """

    dW: VectorField3
    dt: float
    coefficients: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class NoiseModel:
    """Spectral description of the covariance φ.

    Use :func:`build_noise_model` rather than constructing directly.
    """

    grid: Grid
    sigma: float
    s: float
    cutoff: float
    wavevectors: np.ndarray = field(repr=False)
    kinds: tuple[str, ...] = field(repr=False)
    lambdas: np.ndarray = field(repr=False)

    @property
    def mode_count(self) -> int:
        return len(self.kinds)

    @cached_property
    def basis(self) -> np.ndarray:
        """Basis functions e_ℓ(x) of shape (L, n, n)."""
        phase = np.einsum("ld,dxy->lxy", self.wavevectors, self.grid.x)
        functions = np.empty((self.mode_count, self.grid.n, self.grid.n))
        for index, kind in enumerate(self.kinds):
            if kind == "const":
                functions[index] = CONSTANT_NORM
            elif kind == "cos":
                functions[index] = WAVE_NORM * np.cos(phase[index])
            else:
                functions[index] = WAVE_NORM * np.sin(phase[index])
        functions.setflags(write=False)
        return functions

    @cached_property
    def scaled_basis(self) -> np.ndarray:
        """λ_ℓ e_ℓ(x), the columns of the covariance operator."""
        scaled = self.lambdas[:, None, None] * self.basis
        scaled.setflags(write=False)
        return scaled

    @cached_property
    def _ksq(self) -> np.ndarray:
        return np.sum(self.wavevectors**2, axis=1)

    def hs_norm(self, s: float) -> float:
        """|φ|²_{𝕃₂^s} = Σ λ_ℓ²(1+|k_ℓ|²)^s."""
        if s < 0:
            raise NoiseError(f"Sobolev index must be non-negative, got {s}")
        return float(np.sum(self.lambdas**2 * (1.0 + self._ksq) ** s))

    @property
    def c_phi(self) -> float:
        """Energy injection rate |∇φ|²_{𝕃₂} = Σ λ_ℓ²|k_ℓ|²."""
        return float(np.sum(self.lambdas**2 * self._ksq))

    def ito_correction_field(self) -> ScalarField:
        """F_φ(x) = −Σ_ℓ (λ_ℓ e_ℓ(x))²."""
        return ScalarField(self.grid, -np.sum(self.scaled_basis**2, axis=0))

    def gradient_density(self) -> ScalarField:
        """Σ_ℓ λ_ℓ²|∇e_ℓ(x)|², the local energy injection density."""
        partials = gradient(Field(self.grid, self.scaled_basis)).values
        return ScalarField(self.grid, np.sum(partials**2, axis=(0, 1)))

    def sample_increment(self, dt: float, rng: np.random.Generator) -> NoiseIncrement:
        """Draw dW^i = √dt Σ_ℓ g_{i,ℓ} λ_ℓ e_ℓ with g i.i.d. standard normal.

        Three rows of L normals are consumed from ``rng`` on every call, also
        when σ = 0, so the stream position depends only on the step count.
        """
        if dt <= 0:
            raise NoiseError(f"Time step must be positive, got {dt}")
        draws = rng.standard_normal((3, self.mode_count))
        coefficients = math.sqrt(dt) * draws * self.lambdas[None, :]
        values = np.einsum("il,lxy->ixy", coefficients, self.basis)
        return NoiseIncrement(dW=VectorField3(self.grid, values), dt=dt, coefficients=coefficients)

    def project(self, values: np.ndarray) -> np.ndarray:
        """Coefficients ⟨f, e_ℓ⟩ for every leading component of ``values``."""
        return np.einsum("...xy,lxy->...l", values, self.basis) * self.grid.area

    def qv_rate(self, u: VectorField3) -> float:
        """Σ_{i,ℓ} λ_ℓ²⟨(u×Δu)^i, e_ℓ⟩², using div(u×∇u) = u×Δu."""
        grid = self.grid
        torque = restrict(
            grid,
            np.cross(lift(grid, u.values), lift(grid, laplacian(u).values), axis=0),
        )
        projections = self.project(torque)
        return float(np.sum(self.lambdas[None, :] ** 2 * projections**2))

    def spectrum_table(self) -> list[tuple[int, int, str, float]]:
        """Rows (k1, k2, basis, λ) in mode order."""
        return [
            (int(k[0]), int(k[1]), kind, float(lam))
            for k, kind, lam in zip(self.wavevectors, self.kinds, self.lambdas)
        ]


def build_noise_model(grid: Grid, sigma: float, s: float, cutoff: float) -> NoiseModel:
    """Build the noise model for amplitude σ, regularity s and mode cutoff K.

    Args:
        grid: Simulation grid
        sigma: Amplitude σ ≥ 0; σ = 0 gives the deterministic flow
        s: Spectral decay exponent
        cutoff: Euclidean mode cutoff K, at most n/3

    Raises:
        NoiseError: If σ or K is negative
        CutoffTooLargeError: If K > n/3
    """
    if sigma < 0:
        raise NoiseError(f"Noise amplitude must be non-negative, got {sigma}")
    if cutoff < 0:
        raise NoiseError(f"Mode cutoff must be non-negative, got {cutoff}")
    if cutoff > grid.n / 3:
        raise CutoffTooLargeError(
            f"Mode cutoff {cutoff} exceeds the dealiasing band n/3 = {grid.n / 3:.2f}"
        )

    pairs = half_plane_modes(cutoff)
    wavevectors = np.zeros((1 + 2 * len(pairs), 2))
    wavevectors[1::2] = pairs
    wavevectors[2::2] = pairs
    kinds = ("const",) + ("cos", "sin") * len(pairs)
    ksq = np.sum(wavevectors**2, axis=1)
    lambdas = sigma * (1.0 + ksq) ** (-s / 2.0)

    wavevectors.setflags(write=False)
    lambdas.setflags(write=False)
    return NoiseModel(
        grid=grid,
        sigma=float(sigma),
        s=float(s),
        cutoff=float(cutoff),
        wavevectors=wavevectors,
        kinds=kinds,
        lambdas=lambdas,
    )
