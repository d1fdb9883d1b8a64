"""Local dissipation estimate and moment bounds."""

from collections.abc import Sequence

import numpy as np

from src.bubble.cover import BallCover
from src.diagnostics.statistics import (
    MIN_ENSEMBLE,
    Z_SCORE,
    common_times,
    require_ensemble,
    standard_error,
)
from src.flow.integrator import TrajectoryRecord
from src.models.experiment import CheckResult
from src.noise.model import NoiseModel


def local_injection(model: NoiseModel, cover: BallCover, center: int = 0) -> float:
    """‖η∇φ‖²_{𝕃₂} = ∫η²Σ_ℓλ_ℓ²|∇e_ℓ|² for the window at cover center ``center``."""
    window = cover.window.at(tuple(int(i) for i in cover.indices[center]))
    return float(np.sum(window.values**2 * model.gradient_density().values) * cover.grid.area)


def local_dissipation_defect(
    record: TrajectoryRecord, model: NoiseModel, cover: BallCover, center: int = 0
) -> np.ndarray:
    """LHS − RHS of the local energy inequality at every sample.

    LHS = ½‖η∇u(t)‖² − ½‖η∇u(0)‖² and RHS = t‖η∇φ‖²_{𝕃₂} + (C_η²/ϱ²)∫₀ᵗ‖∇u‖²,
    using the ``window_energy`` series of a WindowEnergyObserver on the same
    center. Non-positive values satisfy the inequality.
    """
    times = np.asarray(record.times, dtype=float)
    window = record.values("window_energy")
    constant = (cover.window.gradient_constant / cover.radius) ** 2
    rhs = times * local_injection(model, cover, center) + constant * record.values("grad_sq_integral")
    return window - window[0] - rhs


def local_dissipation_check(
    records: Sequence[TrajectoryRecord],
    model: NoiseModel,
    cover: BallCover,
    center: int = 0,
    slack: float = 0.0,
    min_ensemble: int = MIN_ENSEMBLE,
) -> CheckResult:
    """Ensemble mean of the local dissipation defect within its 99% band."""
    require_ensemble(len(records), min_ensemble)
    times = common_times(records)
    length = len(times)
    ordered = sorted(records, key=lambda record: record.trajectory_id)
    defects = np.array(
        [local_dissipation_defect(record, model, cover, center)[:length] for record in ordered]
    )
    mean = np.mean(defects, axis=0)
    lower = mean - Z_SCORE * standard_error(defects, axis=0)
    passed = bool(np.all(lower <= slack))
    return CheckResult(
        name="local_dissipation",
        passed=passed,
        statistics={
            "count": len(records),
            "times": times.tolist(),
            "mean_defect": mean.tolist(),
            "lower": lower.tolist(),
            "constant": (cover.window.gradient_constant / cover.radius) ** 2,
            "injection": local_injection(model, cover, center),
        },
    )


def moment_bounds(
    records: Sequence[TrajectoryRecord], exponents: Sequence[float] = (1.0, 2.0)
) -> CheckResult:
    """Ensemble means of sup_t E_t^r, (∫‖τ‖²)^r and (∫₀^ζ‖Δu‖²)^r.

    ζ is the stopping time of each record (T when it ran to the end). The
    verdict only asserts that every moment is finite.
    """
    require_ensemble(len(records), 1)
    rows = []
    for r in exponents:
        sup_energy = [float(np.max(record.values("energy"))) ** r for record in records]
        tension = [float(record.values("tension_integral")[-1]) ** r for record in records]
        laplacian = [float(record.values("laplacian_integral")[-1]) ** r for record in records]
        rows.append(
            {
                "r": r,
                "sup_energy": float(np.mean(sup_energy)),
                "tension_integral": float(np.mean(tension)),
                "laplacian_integral": float(np.mean(laplacian)),
                "max_sup_energy": float(np.max(sup_energy)),
            }
        )
    passed = all(np.isfinite(value) for row in rows for value in row.values())
    return CheckResult(name="moment_bounds", passed=passed, statistics={"rows": rows})
