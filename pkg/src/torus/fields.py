"""Immutable grid fields on the torus."""

from typing import ClassVar

import numpy as np

from src.core.exceptions import FieldError, GridMismatchError, NonFiniteError
from src.torus.grid import Grid


class Field:
    """Real field with a tuple of component axes in front of the grid axes.

    Values have shape ``(*components, n, n)``. They are copied on
    construction and stored read-only, so fields can be shared freely
    between threads.
    """

    components: ClassVar[tuple[int, ...] | None] = None

    def __init__(self, grid: Grid, values: np.ndarray, *, check: bool = True):
        array = np.array(values, dtype=np.float64)
        if array.ndim < 2 or array.shape[-2:] != (grid.n, grid.n):
            raise FieldError(
                f"Values of shape {array.shape} do not live on a {grid.n}x{grid.n} grid"
            )
        if self.components is not None and array.shape[:-2] != self.components:
            raise FieldError(
                f"{type(self).__name__} expects components {self.components}, "
                f"got {array.shape[:-2]}"
            )
        if check and not np.all(np.isfinite(array)):
            raise NonFiniteError(f"{type(self).__name__} contains non-finite values")
        array.setflags(write=False)
        self.grid = grid
        self.values = array

    @staticmethod
    def wrap(grid: Grid, values: np.ndarray) -> "Field":
        """Build the most specific field class for the component shape."""
        shape = np.shape(values)[:-2]
        cls = _BY_SHAPE.get(shape, Field)
        return cls(grid, values)

    @property
    def shape(self) -> tuple[int, ...]:
        """Component shape (without grid axes)."""
        return self.values.shape[:-2]

    def same_grid(self, other: "Field") -> None:
        """Raise GridMismatchError unless ``other`` lives on this grid."""
        if other.grid != self.grid:
            raise GridMismatchError(
                f"Fields live on different grids: n={self.grid.n} and n={other.grid.n}"
            )

    def pointwise_norm(self) -> np.ndarray:
        """Euclidean norm over all component axes at each grid point."""
        if not self.shape:
            return np.abs(self.values)
        flat = self.values.reshape(-1, self.grid.n, self.grid.n)
        return np.sqrt(np.sum(flat**2, axis=0))

    def mean(self) -> np.ndarray | float:
        """Spatial average of every component."""
        return np.mean(self.values, axis=(-2, -1))

    def integral(self) -> np.ndarray | float:
        """Grid quadrature of every component."""
        return self.grid.integrate(self.values)

    def inner(self, other: "Field") -> float:
        """L² inner product summed over components."""
        self.same_grid(other)
        return float(np.sum(self.values * other.values) * self.grid.area)

    def _coerce(self, other: "Field | float") -> np.ndarray | float:
        if isinstance(other, Field):
            self.same_grid(other)
            return other.values
        return other

    def __add__(self, other: "Field | float") -> "Field":
        return Field.wrap(self.grid, self.values + self._coerce(other))

    def __radd__(self, other: float) -> "Field":
        return self.__add__(other)

    def __sub__(self, other: "Field | float") -> "Field":
        return Field.wrap(self.grid, self.values - self._coerce(other))

    def __mul__(self, other: "Field | float") -> "Field":
        return Field.wrap(self.grid, self.values * self._coerce(other))

    def __rmul__(self, other: float) -> "Field":
        return self.__mul__(other)

    def __neg__(self) -> "Field":
        return Field.wrap(self.grid, -self.values)

    def __getitem__(self, index) -> "Field":
        return Field.wrap(self.grid, self.values[index])

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.grid.n}, components={self.shape})"


class ScalarField(Field):
    """Single real-valued field."""

    components = ()

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "ScalarField":
        return cls(grid, np.full((grid.n, grid.n), float(value)))


class SpatialVector(Field):
    """Two-component field indexed by the spatial direction k."""

    components = (2,)


class VectorField3(Field):
    """Three-component field with target-space index i = 1..3."""

    components = (3,)

    @classmethod
    def constant(cls, grid: Grid, vector) -> "VectorField3":
        values = np.broadcast_to(np.asarray(vector, dtype=float)[:, None, None], (3, grid.n, grid.n))
        return cls(grid, values)

    def dot(self, other: "VectorField3") -> ScalarField:
        """Pointwise ℝ³ inner product."""
        self.same_grid(other)
        return ScalarField(self.grid, np.einsum("i...,i...->...", self.values, other.values))

    def cross(self, other: "VectorField3") -> "VectorField3":
        """Pointwise ℝ³ cross product self × other."""
        self.same_grid(other)
        return VectorField3(self.grid, np.cross(self.values, other.values, axis=0))

    def scale(self, factor: ScalarField) -> "VectorField3":
        """Multiply every component by a scalar field."""
        self.same_grid(factor)
        return VectorField3(self.grid, self.values * factor.values[None])

    def sphere_defect(self) -> float:
        """max_x ||u(x)| − 1|."""
        return float(np.max(np.abs(self.pointwise_norm() - 1.0)))


class TensorField32(Field):
    """Tensor field A^{i,j}_k with target indices i, j and spatial index k."""

    components = (3, 3, 2)

    def antisymmetry_defect(self) -> float:
        """max |A^{i,j}_k + A^{j,i}_k|."""
        return float(np.max(np.abs(self.values + np.swapaxes(self.values, 0, 1))))


_BY_SHAPE: dict[tuple[int, ...], type[Field]] = {
    (): ScalarField,
    (2,): SpatialVector,
    (3,): VectorField3,
    (3, 3, 2): TensorField32,
}
