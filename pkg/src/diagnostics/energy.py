"""Energy balance along a single trajectory."""

import math

import numpy as np
from scipy.integrate import trapezoid

from src.core.exceptions import DiagnosticsError
from src.flow.integrator import TrajectoryRecord, energy
from src.noise.model import NoiseModel

__all__ = [
    "energy",
    "martingale_residual",
    "restart_drops",
    "qv_estimate",
    "measure_tol_det",
    "energy_increase",
    "measured_order",
    "l4l4_norm",
]


def restart_drops(record: TrajectoryRecord) -> np.ndarray:
    """Energy removed by restarts after the first sample, up to each sample time.

    The first sample already shows the state after a restart at ϑ = 0.
    """
    times = np.asarray(record.times, dtype=float)
    drops = np.zeros_like(times)
    for event in record.events:
        drops[times >= event.time] += event.drop
    return drops - drops[0] if drops.size else drops


def martingale_residual(record: TrajectoryRecord, model: NoiseModel) -> np.ndarray:
    """M̂(t) = E_t − E₀ + ∫₀ᵗ‖τ‖² − t·c_φ at every sample.

    Energy removed by restarts is added back, so the residual of a restarted
    trajectory measures the same balance as one that ran uninterrupted.
    """
    times = np.asarray(record.times, dtype=float)
    energies = record.values("energy")
    return (
        energies
        - energies[0]
        + restart_drops(record)
        + record.values("tension_integral")
        - model.c_phi * times
    )


def qv_estimate(record: TrajectoryRecord) -> np.ndarray:
    """Q̂(t) = Σ dt·Σ_ℓ λ_ℓ²⟨div(u×∇u), e_ℓ⟩² accumulated up to each sample."""
    return record.values("qv")


def measure_tol_det(record: TrajectoryRecord, model: NoiseModel, floor: float = 1e-12) -> float:
    """Deterministic discretisation allowance: max_t |M̂(t)| of a σ = 0 pilot run.

    Raises:
        DiagnosticsError: If the pilot was run with noise
    """
    if model.sigma != 0.0:
        raise DiagnosticsError(f"tol_det needs a noiseless pilot, got sigma={model.sigma}")
    return max(float(np.max(np.abs(martingale_residual(record, model)))), floor)


def energy_increase(record: TrajectoryRecord) -> float:
    """Largest increase of E between consecutive samples, 0 for a monotone series."""
    energies = record.values("energy")
    if len(energies) < 2:
        return 0.0
    return max(0.0, float(np.max(np.diff(energies))))


def measured_order(coarse_error: float, fine_error: float) -> float:
    """log₂(coarse/fine) for a dt-halving study."""
    if coarse_error <= 0.0 or fine_error <= 0.0:
        raise DiagnosticsError(
            f"Convergence order needs positive errors, got {coarse_error} and {fine_error}"
        )
    return math.log2(coarse_error / fine_error)


def l4l4_norm(record: TrajectoryRecord) -> float:
    """(∫₀ᵀ‖∇u‖⁴_{L⁴}dt)^{1/4} by the trapezoid rule."""
    if len(record.times) < 2:
        return 0.0
    return float(trapezoid(record.values("grad_l4_4"), record.times)) ** 0.25
