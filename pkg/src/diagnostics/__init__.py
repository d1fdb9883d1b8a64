"""Statistical verification of energy identities and inequalities."""

from .constants import ConstantEstimate, c0_ratio, c1_ratio, default_eps1, estimate_C0, estimate_C1
from .dissipation import local_dissipation_check, local_dissipation_defect, local_injection, moment_bounds
from .energy import (
    energy,
    energy_increase,
    l4l4_norm,
    martingale_residual,
    measure_tol_det,
    measured_order,
    qv_estimate,
)
from .martingale import (
    energy_identity_check,
    qv_check,
    residual_matrix,
    select_time_indices,
    supermartingale_test,
)
from .statistics import (
    CONFIDENCE,
    Z_SCORE,
    EnsembleSummary,
    QuantitySummary,
    bootstrap_variance_se,
    ensemble_summary,
    require_ensemble,
    stack_series,
    standard_error,
)

__all__ = [
    "ConstantEstimate",
    "c0_ratio",
    "c1_ratio",
    "default_eps1",
    "estimate_C0",
    "estimate_C1",
    "local_dissipation_check",
    "local_dissipation_defect",
    "local_injection",
    "moment_bounds",
    "energy",
    "energy_increase",
    "l4l4_norm",
    "martingale_residual",
    "measure_tol_det",
    "measured_order",
    "qv_estimate",
    "energy_identity_check",
    "qv_check",
    "residual_matrix",
    "select_time_indices",
    "supermartingale_test",
    "CONFIDENCE",
    "Z_SCORE",
    "EnsembleSummary",
    "QuantitySummary",
    "bootstrap_variance_se",
    "ensemble_summary",
    "require_ensemble",
    "stack_series",
    "standard_error",
]
