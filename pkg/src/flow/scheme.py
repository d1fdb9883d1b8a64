"""Tension field, drift and the per-step update rules."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.core.exceptions import ConfigurationError
from src.noise.model import NoiseModel
from src.torus.fields import VectorField3
from src.torus.grid import Grid
from src.torus.spectral import gradient, laplacian, lift, restrict


class SchemeKind(str, Enum):
    """Time discretisation of the linear part."""

    EXPLICIT_EM = "explicit-EM"
    SEMI_IMPLICIT_EM = "semi-implicit-EM"
    EXPONENTIAL_MILD = "exponential-mild"
    STRATONOVICH_HEUN = "stratonovich-heun"


@dataclass(frozen=True)
class StepScheme:
    """Time stepping parameters.

    Attributes:
        kind: Update rule for the heat part
        dt: Time step
        projection: Renormalise u/|u| after every step
        ito_correction: Include F_φu in the drift (Itô schemes only)
    """

    kind: SchemeKind = SchemeKind.SEMI_IMPLICIT_EM
    dt: float = 1e-4
    projection: bool = True
    ito_correction: bool = True

    def __post_init__(self):
        object.__setattr__(self, "kind", SchemeKind(self.kind))
        if not self.dt > 0:
            raise ConfigurationError(f"Time step must be positive, got {self.dt}")

    def with_dt(self, dt: float) -> "StepScheme":
        return StepScheme(self.kind, dt, self.projection, self.ito_correction)

    def amplification(self, grid: Grid) -> np.ndarray:
        """Per-mode factor applied to u by the linear part of one step."""
        decay = self.dt * grid.ksq
        if self.kind is SchemeKind.EXPLICIT_EM:
            return 1.0 - decay
        if self.kind is SchemeKind.EXPONENTIAL_MILD:
            return np.exp(-decay)
        return 1.0 / (1.0 + decay)

    def forcing_weight(self, grid: Grid) -> np.ndarray:
        """Per-mode factor applied to dt·N̂ by one step."""
        if self.kind is SchemeKind.EXPONENTIAL_MILD:
            ksq = grid.ksq
            safe = np.where(ksq == 0, 1.0, ksq)
            phi = np.where(ksq == 0, self.dt, -np.expm1(-self.dt * ksq) / safe)
            return phi / self.dt
        if self.kind is SchemeKind.EXPLICIT_EM:
            return np.ones(grid.spectral_shape)
        return 1.0 / (1.0 + self.dt * grid.ksq)


def harmonic_nonlinearity(u: VectorField3) -> VectorField3:
    """u|∇u|², dealiased as a cubic product."""
    grid = u.grid
    lifted_gradient = lift(grid, gradient(u).values)
    density = np.sum(lifted_gradient**2, axis=(0, 1))
    return VectorField3(grid, restrict(grid, lift(grid, u.values) * density[None]))


def tension(u: VectorField3, method: str = "direct") -> VectorField3:
    """Tension field τ of a sphere-valued map.

    Args:
        u: Sphere-valued field
        method: ``"direct"`` for Δu + u|∇u|², ``"projected"`` for
            Δu − (u·Δu)u; the two agree exactly iff |u| ≡ 1

    Returns:
        τ with dealiased products
    """
    lap = laplacian(u)
    if method == "direct":
        return VectorField3(u.grid, lap.values + harmonic_nonlinearity(u).values)
    if method == "projected":
        grid = u.grid
        lifted_u = lift(grid, u.values)
        lifted_lap = lift(grid, lap.values)
        radial = np.sum(lifted_u * lifted_lap, axis=0)
        return VectorField3(grid, lap.values - restrict(grid, radial[None] * lifted_u))
    raise ValueError(f"Unknown tension method {method!r}")


def ito_drift(u: VectorField3, model: NoiseModel) -> VectorField3:
    """F_φ·u."""
    return u.scale(model.ito_correction_field())


def drift(u: VectorField3, model: NoiseModel, ito_correction: bool = True) -> VectorField3:
    """Itô drift τ(u) + F_φu."""
    tau = tension(u)
    if not ito_correction:
        return tau
    return VectorField3(u.grid, tau.values + ito_drift(u, model).values)


def _linear_solve(scheme: StepScheme, grid: Grid, base: np.ndarray, forcing: np.ndarray) -> np.ndarray:
    """Apply the linear step to ``base`` with explicit forcing ``forcing``."""
    coefficients = scheme.amplification(grid) * grid.fft(base) + scheme.dt * scheme.forcing_weight(
        grid
    ) * grid.fft(forcing)
    return grid.ifft(coefficients)


def advance(
    u: VectorField3, dW: VectorField3, model: NoiseModel, scheme: StepScheme
) -> np.ndarray:
    """Raw (unprojected, unchecked) values of the next iterate.

    Itô kinds compute L(u, N(u) + F_φu) + u×dW. The Stratonovich Heun kind
    uses a predictor ũ = L(u, N(u)) + u×dW and the corrector
    L(u, ½(N(u) + N(ũ))) + ½(u + ũ)×dW, with no F_φ term.
    """
    grid = u.grid
    nonlinear = harmonic_nonlinearity(u).values
    if scheme.kind is SchemeKind.STRATONOVICH_HEUN:
        implicit = StepScheme(SchemeKind.SEMI_IMPLICIT_EM, scheme.dt)
        predictor = _linear_solve(implicit, grid, u.values, nonlinear) + np.cross(
            u.values, dW.values, axis=0
        )
        predicted = VectorField3(grid, predictor)
        averaged = 0.5 * (nonlinear + harmonic_nonlinearity(predicted).values)
        midpoint = 0.5 * (u.values + predictor)
        return _linear_solve(implicit, grid, u.values, averaged) + np.cross(
            midpoint, dW.values, axis=0
        )

    if scheme.ito_correction:
        nonlinear = nonlinear + ito_drift(u, model).values
    return _linear_solve(scheme, grid, u.values, nonlinear) + np.cross(u.values, dW.values, axis=0)
