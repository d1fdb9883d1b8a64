"""Periodic grid fields on the torus [0, 2π)² with spectral calculus."""

from .fields import Field, ScalarField, SpatialVector, TensorField32, VectorField3
from .grid import Grid
from .snapshot import read_snapshot, write_field_csv, write_snapshot
from .spectral import (
    curl,
    dealias_product,
    fourier_interpolate,
    divergence,
    gradient,
    half_plane_modes,
    hessian_norm_sq,
    l4_gradient_norm,
    laplacian,
    low_pass,
    lp_norm,
    perp_gradient,
    poisson_solve,
    project_to_sphere,
    random_band_limited,
    sobolev_h1_norm,
    spectral_energy,
)

__all__ = [
    "Grid",
    "Field",
    "ScalarField",
    "SpatialVector",
    "VectorField3",
    "TensorField32",
    "gradient",
    "laplacian",
    "perp_gradient",
    "divergence",
    "curl",
    "poisson_solve",
    "lp_norm",
    "sobolev_h1_norm",
    "l4_gradient_norm",
    "spectral_energy",
    "hessian_norm_sq",
    "dealias_product",
    "fourier_interpolate",
    "low_pass",
    "project_to_sphere",
    "half_plane_modes",
    "random_band_limited",
    "read_snapshot",
    "write_snapshot",
    "write_field_csv",
]
