"""Ensemble checks of the energy identity, its quadratic variation and the gain process."""

from collections.abc import Sequence

import numpy as np

from src.core.logging import get_logger
from src.diagnostics.energy import martingale_residual, qv_estimate
from src.diagnostics.statistics import (
    MIN_ENSEMBLE,
    Z_SCORE,
    bootstrap_variance_se,
    common_times,
    require_ensemble,
    standard_error,
)
from src.flow.integrator import TrajectoryRecord
from src.helein.decomposition import GainSeries
from src.models.experiment import CheckResult
from src.noise.model import NoiseModel

logger = get_logger(__name__)

MAX_TIME_POINTS = 6
QUANTILE_BINS = 5
QV_TOLERANCE_SE = 3.0


def residual_matrix(records: Sequence[TrajectoryRecord], model: NoiseModel) -> np.ndarray:
    """(M, T) array of M̂ over the common sample times, ordered by trajectory id."""
    length = len(common_times(records))
    ordered = sorted(records, key=lambda record: record.trajectory_id)
    return np.array([martingale_residual(record, model)[:length] for record in ordered])


def energy_identity_check(
    records: Sequence[TrajectoryRecord],
    model: NoiseModel,
    tol_det: float,
    min_ensemble: int = MIN_ENSEMBLE,
    name: str = "energy_identity",
) -> CheckResult:
    """|mean M̂(t)| ≤ z·SE + tol_det at every sampled t."""
    require_ensemble(len(records), min_ensemble)
    times = common_times(records)
    residuals = residual_matrix(records, model)
    mean = np.mean(residuals, axis=0)
    se = standard_error(residuals, axis=0)
    allowance = Z_SCORE * se + tol_det
    excess = np.abs(mean) - allowance
    passed = bool(np.all(excess <= 0.0))
    return CheckResult(
        name=name,
        passed=passed,
        statistics={
            "count": len(records),
            "tol_det": tol_det,
            "times": times.tolist(),
            "mean": mean.tolist(),
            "standard_error": se.tolist(),
            "worst_excess": float(np.max(excess)),
        },
        message=None if passed else f"mean residual exceeds its band at t={times[int(np.argmax(excess))]:.6g}",
    )


def qv_check(
    records: Sequence[TrajectoryRecord],
    model: NoiseModel,
    min_ensemble: int = MIN_ENSEMBLE,
    seed: int = 0,
) -> CheckResult:
    """|Var[M̂(T)] − mean Q̂(T)| ≤ 3 bootstrap standard errors of the variance."""
    require_ensemble(len(records), min_ensemble)
    length = len(common_times(records))
    ordered = sorted(records, key=lambda record: record.trajectory_id)
    final = residual_matrix(ordered, model)[:, -1]
    qv_final = np.array([qv_estimate(record)[length - 1] for record in ordered])
    variance = float(np.var(final, ddof=1))
    mean_qv = float(np.mean(qv_final))
    se = bootstrap_variance_se(final, seed)
    difference = abs(variance - mean_qv)
    passed = difference <= QV_TOLERANCE_SE * se
    return CheckResult(
        name="quadratic_variation",
        passed=passed,
        statistics={
            "count": len(records),
            "variance": variance,
            "mean_qv": mean_qv,
            "bootstrap_se": se,
            "difference": difference,
        },
    )


def select_time_indices(length: int, max_points: int = MAX_TIME_POINTS) -> list[int]:
    """At most ``max_points`` evenly spread sample indices including both ends."""
    if length <= max_points:
        return list(range(length))
    return sorted({int(round(i)) for i in np.linspace(0, length - 1, max_points)})


def _band(diffs: np.ndarray) -> tuple[float, float, float]:
    mean = float(np.mean(diffs))
    se = float(standard_error(diffs))
    return mean, se, mean + Z_SCORE * se


def supermartingale_test(
    gains: Sequence[GainSeries],
    slack: float,
    time_indices: Sequence[int] | None = None,
    bins: int = QUANTILE_BINS,
    min_ensemble: int = MIN_ENSEMBLE,
    name: str = "supermartingale",
) -> CheckResult:
    """Ensemble test that 𝒢 has non-increasing (conditional) means.

    Every pair s < t of the chosen sample indices passes when the upper 99%
    bound of mean(𝒢(t) − 𝒢(s)) is at most ``slack``. Conditional rows bin
    the trajectories on 𝒢(s) quantiles and are reported with their own flag;
    the verdict follows the unconditional rows.

    Raises:
        InsufficientEnsembleError: If fewer than ``min_ensemble`` series are given
    """
    require_ensemble(len(gains), min_ensemble)
    length = min(len(series.g) for series in gains)
    indices = list(time_indices) if time_indices is not None else select_time_indices(length)
    ordered = sorted(gains, key=lambda series: series.trajectory_id)
    g = np.array([series.g[:length] for series in ordered])
    times = ordered[0].times

    rows = []
    conditional = []
    for a, s in enumerate(indices):
        for t in indices[a + 1 :]:
            diffs = g[:, t] - g[:, s]
            mean, se, upper = _band(diffs)
            rows.append(
                {
                    "s": float(times[s]),
                    "t": float(times[t]),
                    "mean": mean,
                    "standard_error": se,
                    "upper": upper,
                    "passed": upper <= slack,
                }
            )
            edges = np.quantile(g[:, s], np.linspace(0.0, 1.0, bins + 1))
            labels = np.clip(np.searchsorted(edges, g[:, s], side="right") - 1, 0, bins - 1)
            for label in range(bins):
                members = diffs[labels == label]
                if len(members) < 2:
                    continue
                mean, se, upper = _band(members)
                conditional.append(
                    {
                        "s": float(times[s]),
                        "t": float(times[t]),
                        "bin": label,
                        "count": int(len(members)),
                        "mean": mean,
                        "upper": upper,
                        "passed": upper <= slack,
                    }
                )

    passed = all(row["passed"] for row in rows)
    logger.info(
        f"Supermartingale test over {len(rows)} pairs: {'PASS' if passed else 'FAIL'}",
        extra={"check": name},
    )
    return CheckResult(
        name=name,
        passed=passed,
        statistics={
            "count": len(gains),
            "slack": slack,
            "bins": bins,
            "pairs": rows,
            "conditional": conditional,
            "conditional_passed": all(row["passed"] for row in conditional),
        },
    )
