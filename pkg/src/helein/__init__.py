"""Helein's decomposition of the nonlinearity and Wente's compensated regularity."""

from .decomposition import (
    HELEIN_SERIES,
    AlphaTensionBound,
    GainSeries,
    HeleinObserver,
    HeleinSplit,
    alpha_tension_bound,
    contraction,
    gain_series,
    helein_sample,
    helein_tensor,
    helmholtz_increments,
    helmholtz_split,
    nonlinearity_split,
    wedge_laplacian,
)
from .wente import WENTE_COLUMNS, WenteSolution, poisson_bracket, wente_solve, wente_sweep

__all__ = [
    "HELEIN_SERIES",
    "AlphaTensionBound",
    "GainSeries",
    "HeleinObserver",
    "HeleinSplit",
    "alpha_tension_bound",
    "contraction",
    "gain_series",
    "helein_sample",
    "helein_tensor",
    "helmholtz_increments",
    "helmholtz_split",
    "nonlinearity_split",
    "wedge_laplacian",
    "WENTE_COLUMNS",
    "WenteSolution",
    "poisson_bracket",
    "wente_solve",
    "wente_sweep",
]
