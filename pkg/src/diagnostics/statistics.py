"""Monte Carlo estimators over ensembles of trajectories."""

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import bootstrap, norm

from src.core.exceptions import DiagnosticsError, InsufficientEnsembleError
from src.flow.integrator import TrajectoryRecord

CONFIDENCE = 0.99
Z_SCORE = float(norm.ppf(0.5 + CONFIDENCE / 2.0))
MIN_ENSEMBLE = 100
BOOTSTRAP_RESAMPLES = 999


def require_ensemble(count: int, minimum: int = MIN_ENSEMBLE) -> None:
    """Raise InsufficientEnsembleError when fewer than ``minimum`` trajectories are given."""
    if count < minimum:
        raise InsufficientEnsembleError(
            f"Statistical verdicts need at least {minimum} trajectories, got {count}"
        )


def standard_error(x: np.ndarray, axis: int = 0) -> np.ndarray:
    """Sample standard deviation (ddof=1) divided by √M."""
    x = np.asarray(x, dtype=float)
    count = x.shape[axis]
    if count < 2:
        return np.zeros(np.delete(x.shape, axis)) if x.ndim > 1 else np.float64(0.0)
    return np.std(x, axis=axis, ddof=1) / np.sqrt(count)


def bootstrap_variance_se(x: np.ndarray, seed: int = 0) -> float:
    """Bootstrap standard error of the sample variance."""
    x = np.asarray(x, dtype=float)
    if len(x) < 3:
        return 0.0
    result = bootstrap(
        (x,),
        lambda sample, axis: np.var(sample, axis=axis, ddof=1),
        n_resamples=BOOTSTRAP_RESAMPLES,
        vectorized=True,
        method="percentile",
        random_state=np.random.default_rng(seed),
    )
    return float(result.standard_error)


def common_times(records: Sequence[TrajectoryRecord]) -> np.ndarray:
    """Sample times shared by every record (the common prefix).

    Raises:
        DiagnosticsError: If records disagree on their sample times
    """
    if not records:
        raise DiagnosticsError("No trajectories to aggregate")
    length = min(len(record.times) for record in records)
    times = np.asarray(records[0].times[:length], dtype=float)
    for record in records[1:]:
        if not np.array_equal(np.asarray(record.times[:length]), times):
            raise DiagnosticsError(
                f"Trajectory {record.trajectory_id} was sampled at different times"
            )
    return times


def stack_series(records: Sequence[TrajectoryRecord], quantity: str) -> np.ndarray:
    """(M, T) array of ``quantity`` over the common sample times, ordered by trajectory id."""
    ordered = sorted(records, key=lambda record: record.trajectory_id)
    length = len(common_times(ordered))
    try:
        return np.array([record.series[quantity][:length] for record in ordered], dtype=float)
    except KeyError as e:
        raise DiagnosticsError(f"Series {quantity!r} was not recorded") from e


@dataclass
class QuantitySummary:
    """Per-time mean, standard error and 99% half-width of one quantity."""

    mean: np.ndarray
    standard_error: np.ndarray
    half_width: np.ndarray

    @classmethod
    def of(cls, values: np.ndarray) -> "QuantitySummary":
        se = np.atleast_1d(standard_error(values, axis=0))
        return cls(mean=np.mean(values, axis=0), standard_error=se, half_width=Z_SCORE * se)

    def to_dict(self) -> dict[str, list[float]]:
        return {
            "mean": self.mean.tolist(),
            "standard_error": self.standard_error.tolist(),
            "half_width": self.half_width.tolist(),
        }


@dataclass
class EnsembleSummary:
    """Aggregate of M trajectories at their common sample times."""

    count: int
    times: np.ndarray
    quantities: dict[str, QuantitySummary] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "times": self.times.tolist(),
            "confidence": CONFIDENCE,
            "quantities": {name: summary.to_dict() for name, summary in sorted(self.quantities.items())},
        }


def ensemble_summary(
    records: Sequence[TrajectoryRecord], quantities: str | Sequence[str]
) -> EnsembleSummary:
    """Summarise one or more recorded quantities across an ensemble."""
    names = [quantities] if isinstance(quantities, str) else list(quantities)
    times = common_times(records)
    summary = EnsembleSummary(count=len(records), times=times)
    for name in names:
        summary.quantities[name] = QuantitySummary.of(stack_series(records, name))
    return summary
