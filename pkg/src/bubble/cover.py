"""Ball covers of the torus and smooth window kernels."""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from src.core.exceptions import BubbleError, GridMismatchError, RadiusOutOfRangeError
from src.torus.fields import ScalarField, VectorField3
from src.torus.grid import Grid
from src.torus.spectral import gradient

DEFAULT_DILATION = 2.0
TIE_RTOL = 1e-9


def periodic_distance(grid: Grid, point: tuple[float, float]) -> np.ndarray:
    """Minimum-image distance from ``point`` to every grid point."""
    offset = grid.x - np.asarray(point, dtype=float)[:, None, None]
    wrapped = (offset + math.pi) % (2.0 * math.pi) - math.pi
    return np.sqrt(np.sum(wrapped**2, axis=0))


def _smoothstep(s: np.ndarray) -> np.ndarray:
    s = np.clip(s, 0.0, 1.0)
    return s**3 * (10.0 - 15.0 * s + 6.0 * s**2)


def _circular_convolution(grid: Grid, density: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """h²Σ_y kernel(x − y) density(y) with the kernel centred at index (0, 0)."""
    return grid.ifft(grid.fft(density) * grid.fft(kernel)) * grid.area


def gradient_density(u: VectorField3) -> np.ndarray:
    """|∇u|² at every grid point."""
    return np.sum(gradient(u).values ** 2, axis=(0, 1))


@dataclass(frozen=True, eq=False)
class WindowKernel:
    """Radial bump η: 1 on B(λϱ), 0 outside B(2λϱ), quintic blend between.

    The blend has slope at most 15/8 per unit of s = (r − λϱ)/(λϱ), so
    max|∇η| ≤ C_η/ϱ with C_η = 15/(8λ).
    """

    grid: Grid
    radius: float
    dilation: float = DEFAULT_DILATION

    @property
    def inner_radius(self) -> float:
        return self.dilation * self.radius

    @property
    def support_radius(self) -> float:
        return 2.0 * self.dilation * self.radius

    @property
    def gradient_constant(self) -> float:
        """C_η with max|∇η| ≤ C_η/ϱ."""
        return 15.0 / (8.0 * self.dilation)

    def profile(self, r: np.ndarray) -> np.ndarray:
        return 1.0 - _smoothstep((r - self.inner_radius) / self.inner_radius)

    @cached_property
    def values(self) -> np.ndarray:
        """η centred at the origin grid point."""
        kernel = self.profile(periodic_distance(self.grid, (0.0, 0.0)))
        kernel.setflags(write=False)
        return kernel

    def at(self, index: tuple[int, int]) -> ScalarField:
        """η centred at grid index ``index``."""
        return ScalarField(self.grid, np.roll(self.values, shift=index, axis=(0, 1)))

    def max_gradient(self) -> float:
        """Spectral max|∇η| on the grid."""
        return float(np.max(gradient(ScalarField(self.grid, self.values)).pointwise_norm()))


@dataclass(frozen=True, eq=False)
class BallCover:
    """Centers {x_i} such that every B(x, ϱ) lies inside some B(x_i, λϱ).

    Attributes:
        grid: Grid the centers live on
        radius: ϱ
        dilation: λ
        indices: Grid indices of the centers, shape (N, 2)
    """

    grid: Grid
    radius: float
    dilation: float
    indices: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return len(self.indices)

    @property
    def centers(self) -> np.ndarray:
        """Center coordinates, shape (N, 2)."""
        return self.indices * self.grid.h

    @cached_property
    def window(self) -> WindowKernel:
        return WindowKernel(self.grid, self.radius, self.dilation)

    def center_distance(self) -> np.ndarray:
        """Distance from every grid point to its nearest center."""
        distances = np.stack([periodic_distance(self.grid, tuple(c)) for c in self.centers])
        return np.min(distances, axis=0)

    def verify(self) -> bool:
        """Exhaustive covering check over every grid point as a ball center."""
        return bool(np.all(self.center_distance() + self.radius <= self.dilation * self.radius + 1e-12))

    def window_energies(self, u: VectorField3) -> np.ndarray:
        """∫η_i²|∇u|² for every center i."""
        self._check_grid(u)
        convolved = _circular_convolution(self.grid, gradient_density(u), self.window.values**2)
        return convolved[self.indices[:, 0], self.indices[:, 1]]

    def _weighted_spread(self, u: VectorField3) -> np.ndarray:
        """∫η_i²|∇u|²·d(x_i, y)² for every center i."""
        r = periodic_distance(self.grid, (0.0, 0.0))
        convolved = _circular_convolution(
            self.grid, gradient_density(u), self.window.values**2 * r**2
        )
        return convolved[self.indices[:, 0], self.indices[:, 1]]

    def local_energy_sup(self, u: VectorField3, mode: str = "smooth") -> tuple[float, tuple[float, float]]:
        """Largest local energy and where it sits.

        Args:
            u: Field on the cover's grid
            mode: ``"smooth"`` maximises ∫η_i²|∇u|² over the centers;
                ``"sharp"`` maximises ∫_{B(x,ϱ)}|∇u|² over every grid point

        Returns:
            (value, (x₁, x₂)) of the maximiser. Smooth-mode ties within a
            relative 1e−9 go to the center with the smallest energy-weighted
            squared distance, then to the lowest index.
        """
        if mode == "sharp":
            return ball_energy_sup(u, self.radius)
        if mode != "smooth":
            raise BubbleError(f"Unknown local energy mode {mode!r}")
        energies = self.window_energies(u)
        best = float(np.max(energies))
        tied = np.flatnonzero(energies >= best - TIE_RTOL * max(abs(best), 1e-300))
        if len(tied) > 1:
            spread = self._weighted_spread(u)[tied]
            least = float(np.min(spread))
            tied = tied[spread <= least + TIE_RTOL * max(abs(least), 1e-300)]
        center = self.centers[int(tied[0])]
        return best, (float(center[0]), float(center[1]))

    def _check_grid(self, u: VectorField3) -> None:
        if u.grid != self.grid:
            raise GridMismatchError(f"Field on n={u.grid.n} does not match cover grid n={self.grid.n}")


def ball_energy_sup(u: VectorField3, radius: float) -> tuple[float, tuple[float, float]]:
    """sup over grid points x of ∫_{B(x,ϱ)}|∇u|² with a sharp indicator."""
    grid = u.grid
    indicator = (periodic_distance(grid, (0.0, 0.0)) <= radius).astype(float)
    convolved = _circular_convolution(grid, gradient_density(u), indicator)
    flat = int(np.argmax(convolved))
    i, j = np.unravel_index(flat, convolved.shape)
    return float(convolved[i, j]), (float(i * grid.h), float(j * grid.h))


def build_cover(grid: Grid, radius: float, dilation: float = DEFAULT_DILATION) -> BallCover:
    """Centers on a regular m×m sublattice, m = ceil(2π/ϱ).

    Args:
        grid: Grid carrying the centers
        radius: ϱ, with 3h ≤ ϱ < π√2/λ
        dilation: λ > 1

    Raises:
        RadiusOutOfRangeError: If ϱ or λ is outside the admissible range
    """
    if dilation <= 1.0:
        raise RadiusOutOfRangeError(f"Dilation must exceed 1, got {dilation}")
    diameter = math.pi * math.sqrt(2.0)
    if not 0.0 < radius < diameter / dilation:
        raise RadiusOutOfRangeError(
            f"Radius {radius} outside (0, {diameter / dilation:.4f}) for dilation {dilation}"
        )
    if radius < 3.0 * grid.h:
        raise RadiusOutOfRangeError(
            f"Radius {radius} below three grid spacings ({3.0 * grid.h:.4f}) at n={grid.n}"
        )
    per_axis = math.ceil(2.0 * math.pi / radius - 1e-12)
    axis = np.unique(np.round(np.arange(per_axis) * grid.n / per_axis).astype(int) % grid.n)
    indices = np.array([(i, j) for i in axis for j in axis], dtype=int)
    indices.setflags(write=False)
    return BallCover(grid=grid, radius=float(radius), dilation=float(dilation), indices=indices)
