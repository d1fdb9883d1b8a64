"""Periodic grid on the torus [0, 2π)²."""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from src.core.exceptions import GridError

TORUS_LENGTH = 2.0 * math.pi
TORUS_AREA = TORUS_LENGTH**2


@dataclass(frozen=True)
class Grid:
    """Uniform n×n collocation grid on [0, 2π)².

    Axis 0 of every value array is the x₁ direction and axis 1 is x₂.
    Spectral arrays use the ``rfft2`` layout: full frequencies along axis 0,
    non-negative frequencies along axis 1.

    Attributes:
        n: Points per axis (a power of two, at least 8)
    """

    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise GridError(f"Grid size must be an integer, got {self.n!r}")
        if self.n < 8 or self.n & (self.n - 1):
            raise GridError(f"Grid size must be a power of two and at least 8, got {self.n}")

    @property
    def h(self) -> float:
        """Grid spacing in radians."""
        return TORUS_LENGTH / self.n

    @property
    def area(self) -> float:
        """Area element h² of the grid quadrature."""
        return self.h**2

    @property
    def cutoff(self) -> int:
        """Largest wavenumber per axis kept by the 2/3 dealiasing rule."""
        return self.n // 3

    @property
    def spectral_shape(self) -> tuple[int, int]:
        return (self.n, self.n // 2 + 1)

    @cached_property
    def x(self) -> np.ndarray:
        """Coordinates of shape (2, n, n): x[0] = x₁, x[1] = x₂."""
        axis = np.arange(self.n) * self.h
        grid = np.stack(np.meshgrid(axis, axis, indexing="ij"))
        grid.setflags(write=False)
        return grid

    @cached_property
    def k(self) -> np.ndarray:
        """Integer wavenumbers of shape (2, n, n//2+1)."""
        k1 = np.fft.fftfreq(self.n, d=1.0 / self.n)
        k2 = np.fft.rfftfreq(self.n, d=1.0 / self.n)
        waves = np.stack(np.meshgrid(k1, k2, indexing="ij"))
        waves.setflags(write=False)
        return waves

    @cached_property
    def k_derivative(self) -> np.ndarray:
        """Wavenumbers for odd derivatives, with the Nyquist modes zeroed."""
        waves = np.array(self.k)
        nyquist = self.n // 2
        waves[np.abs(waves) == nyquist] = 0.0
        waves.setflags(write=False)
        return waves

    @cached_property
    def ksq(self) -> np.ndarray:
        """|k|² on the spectral layout."""
        values = self.k[0] ** 2 + self.k[1] ** 2
        values.setflags(write=False)
        return values

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """Boolean mask of modes with |k_j| ≤ n/3 on both axes."""
        mask = (np.abs(self.k[0]) <= self.cutoff) & (np.abs(self.k[1]) <= self.cutoff)
        mask.setflags(write=False)
        return mask

    @cached_property
    def rfft_weights(self) -> np.ndarray:
        """Multiplicity of each rfft column in the full spectrum."""
        weights = np.full(self.spectral_shape, 2.0)
        weights[:, 0] = 1.0
        weights[:, -1] = 1.0
        weights.setflags(write=False)
        return weights

    def fft(self, values: np.ndarray) -> np.ndarray:
        """Forward transform over the two trailing axes."""
        return np.fft.rfft2(values, axes=(-2, -1))

    def ifft(self, coefficients: np.ndarray) -> np.ndarray:
        """Inverse transform over the two trailing axes."""
        return np.fft.irfft2(coefficients, s=(self.n, self.n), axes=(-2, -1))

    def integrate(self, values: np.ndarray) -> np.ndarray | float:
        """Grid quadrature ∫ f dx over the two trailing axes."""
        return np.sum(values, axis=(-2, -1)) * self.area
