"""Sphere-valued initial data."""

import math
from enum import Enum
from typing import Any

import numpy as np

from src.core.exceptions import InitialDataError
from src.noise.model import trajectory_rng
from src.torus.fields import VectorField3
from src.torus.grid import Grid
from src.torus.spectral import project_to_sphere, random_band_limited


class InitialKind(str, Enum):
    CONSTANT = "constant"
    EQUATOR = "equator"
    RANDOM_SMOOTH = "random_smooth"
    CONCENTRATED = "concentrated"


_ALLOWED_PARAMS: dict[InitialKind, dict[str, Any]] = {
    InitialKind.CONSTANT: {},
    InitialKind.EQUATOR: {},
    InitialKind.RANDOM_SMOOTH: {"amplitude": 0.5, "cutoff": 4, "decay": 2.0, "seed": 0},
    InitialKind.CONCENTRATED: {"epsilon": 0.2, "center": (math.pi, math.pi), "radius": math.pi / 2},
}


def _smoothstep(s: np.ndarray) -> np.ndarray:
    s = np.clip(s, 0.0, 1.0)
    return s**3 * (10.0 - 15.0 * s + 6.0 * s**2)


def _resolve(kind: InitialKind, params: dict[str, Any] | None) -> dict[str, Any]:
    defaults = _ALLOWED_PARAMS[kind]
    params = dict(params or {})
    unknown = sorted(set(params) - set(defaults))
    if unknown:
        raise InitialDataError(f"Unknown parameters for {kind.value} initial data: {unknown}")
    return {**defaults, **params}


def _random_smooth(grid: Grid, amplitude: float, cutoff: float, decay: float, seed: int) -> VectorField3:
    if not 0.0 < amplitude < 1.0:
        raise InitialDataError(f"amplitude must lie in (0, 1), got {amplitude}")
    if not 1 <= cutoff <= grid.cutoff:
        raise InitialDataError(f"cutoff must lie in [1, {grid.cutoff}], got {cutoff}")
    tangent = random_band_limited(grid, cutoff, trajectory_rng(seed, 0), decay, components=2)
    v = amplitude * tangent.values / float(np.max(tangent.pointwise_norm()))
    r = np.sqrt(np.sum(v**2, axis=0))
    # exp_{e₃}(v): entire in x, so the spectrum decays faster than any exponential
    values = np.empty((3, grid.n, grid.n))
    values[:2] = np.sinc(r / math.pi)[None] * v
    values[2] = np.cos(r)
    return VectorField3(grid, values)


def _concentrated(
    grid: Grid, epsilon: float, center: tuple[float, float], radius: float
) -> VectorField3:
    if epsilon <= 0:
        raise InitialDataError(f"epsilon must be positive, got {epsilon}")
    if not 0 < radius < 0.9 * math.pi:
        raise InitialDataError(f"radius must lie in (0, 0.9π), got {radius}")
    offset = grid.x - np.asarray(center, dtype=float)[:, None, None]
    z = (offset + math.pi) % (2.0 * math.pi) - math.pi
    r = np.sqrt(np.sum(z**2, axis=0))
    # cutoff goes from 1 at r = radius to 0 at r = 0.9π, so u = e₃ across the seams
    chi = 1.0 - _smoothstep((r - radius) / (0.9 * math.pi - radius))
    scaled = epsilon * chi
    denominator = r**2 + scaled**2
    values = np.empty((3, grid.n, grid.n))
    values[:2] = 2.0 * scaled[None] * z / denominator[None]
    values[2] = (r**2 - scaled**2) / denominator
    return project_to_sphere(VectorField3(grid, values))


def make_initial(kind: str | InitialKind, params: dict[str, Any] | None, grid: Grid) -> VectorField3:
    """Build sphere-valued initial data.

    Args:
        kind: constant, equator, random_smooth or concentrated
        params: Kind-specific parameters; missing ones take their defaults
        grid: Target grid

    Returns:
        constant → (0, 0, 1); equator → (cos x₁, sin x₁, 0); random_smooth →
        a band-limited Gaussian tangent field at e₃ of pointwise size
        ``amplitude`` (radians) mapped onto the sphere by the exponential
        map; concentrated → an inverse-stereographic
        bubble of scale ``epsilon`` at ``center``, blended smoothly to e₃

    Raises:
        InitialDataError: For an unknown kind or invalid parameters
    """
    try:
        kind = InitialKind(kind)
    except ValueError as e:
        raise InitialDataError(f"Unknown initial data kind {kind!r}") from e
    resolved = _resolve(kind, params)

    if kind is InitialKind.CONSTANT:
        return VectorField3.constant(grid, (0.0, 0.0, 1.0))
    if kind is InitialKind.EQUATOR:
        x1 = grid.x[0]
        return VectorField3(grid, np.stack([np.cos(x1), np.sin(x1), np.zeros_like(x1)]))
    if kind is InitialKind.RANDOM_SMOOTH:
        return _random_smooth(
            grid,
            float(resolved["amplitude"]),
            float(resolved["cutoff"]),
            float(resolved["decay"]),
            int(resolved["seed"]),
        )
    center = tuple(float(c) for c in resolved["center"])
    if len(center) != 2:
        raise InitialDataError(f"center must have two coordinates, got {resolved['center']}")
    return _concentrated(grid, float(resolved["epsilon"]), center, float(resolved["radius"]))
