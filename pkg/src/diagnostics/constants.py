"""Empirical lower bounds for the interpolation constants C₀ and C₁."""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from src.bubble.cover import build_cover
from src.core.exceptions import DiagnosticsError
from src.core.logging import get_logger
from src.noise.model import trajectory_rng
from src.torus.fields import ScalarField, VectorField3
from src.torus.grid import Grid
from src.torus.spectral import gradient, hessian_norm_sq, lp_norm, random_band_limited

logger = get_logger(__name__)

ZERO_GUARD = 1e-14
DEFAULT_EPS1_FACTOR = 0.5


@dataclass
class ConstantEstimate:
    """Running maxima of a ratio whose supremum is the constant.

    Attributes:
        name: ``"C0"`` or ``"C1"``
        per_grid: Estimate at every grid size
        running_max: Running maxima at every grid size, in sample order
    """

    name: str
    per_grid: dict[int, float] = field(default_factory=dict)
    running_max: dict[int, list[float]] = field(default_factory=dict)

    @property
    def grid_sizes(self) -> list[int]:
        return sorted(self.per_grid)

    @property
    def value(self) -> float:
        """Estimate on the finest grid."""
        return self.per_grid[self.grid_sizes[-1]]

    @property
    def stability(self) -> float:
        """|finest/coarsest − 1|, 0 with a single grid."""
        coarsest = self.per_grid[self.grid_sizes[0]]
        if coarsest == 0.0:
            return 0.0
        return abs(self.value / coarsest - 1.0)

    @property
    def eps1_star(self) -> float:
        """1/Ĉ, the threshold suggested for the bubble detector."""
        return 1.0 / self.value if self.value > 0.0 else float("inf")

    def add(self, n: int, ratio: float) -> None:
        history = self.running_max.setdefault(n, [])
        best = max(ratio, history[-1]) if history else ratio
        history.append(best)
        self.per_grid[n] = best

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "grid_sizes": self.grid_sizes,
            "per_grid": {str(n): v for n, v in sorted(self.per_grid.items())},
            "stability": self.stability,
            "eps1_star": self.eps1_star,
        }


def c0_ratio(f: ScalarField) -> float | None:
    """∫f⁴ / ((∫f²)(∫|∇f|²)) for zero-mean f; None when f is constant."""
    centered = ScalarField(f.grid, f.values - np.mean(f.values))
    l2_sq = lp_norm(centered, 2) ** 2
    grad_sq = lp_norm(gradient(centered), 2) ** 2
    if l2_sq < ZERO_GUARD or grad_sq < ZERO_GUARD:
        return None
    return lp_norm(centered, 4) ** 4 / (l2_sq * grad_sq)


def estimate_C0(
    samples: int,
    grid_sizes: Sequence[int],
    seed: int = 0,
    cutoff: float = 4,
    decay: float = 1.0,
) -> ConstantEstimate:
    """Maximise the C₀ ratio over random zero-mean band-limited functions.

    The same ``samples`` functions are evaluated on every grid size.
    """
    if samples < 1:
        raise DiagnosticsError(f"Need at least one sample, got {samples}")
    estimate = ConstantEstimate("C0")
    for n in grid_sizes:
        grid = Grid(n)
        for index in range(samples):
            f = random_band_limited(grid, cutoff, trajectory_rng(seed, index), decay)
            ratio = c0_ratio(f)
            if ratio is not None:
                estimate.add(n, ratio)
        logger.debug(f"C0 estimate at n={n}: {estimate.per_grid.get(n)}")
    return estimate


def c1_ratio(u: VectorField3, radius: float, local_energy: float) -> float | None:
    """∬|∇u|⁴ / (sup-local-energy·(∬|∇²u|² + ∬|∇u|²/ϱ²)); None for zero gradient."""
    grad = gradient(u)
    grad_sq = lp_norm(grad, 2) ** 2
    if grad_sq < ZERO_GUARD or local_energy < ZERO_GUARD:
        return None
    denominator = local_energy * (hessian_norm_sq(u) + grad_sq / radius**2)
    return lp_norm(grad, 4) ** 4 / denominator


def estimate_C1(
    samples: Mapping[int, Sequence[VectorField3]],
    radii: Sequence[float],
    dilation: float = 2.0,
    mode: str = "smooth",
) -> ConstantEstimate:
    """Maximise the C₁ ratio over stored fields and radii ϱ.

    Args:
        samples: Fields per grid size, e.g. snapshots of trajectories
        radii: Values of ϱ; each gets its own ball cover
        dilation: λ of the covers
        mode: Local energy mode passed to the covers
    """
    estimate = ConstantEstimate("C1")
    for n, fields in sorted(samples.items()):
        grid = Grid(n)
        covers = [build_cover(grid, radius, dilation) for radius in radii]
        for u in fields:
            for cover in covers:
                ratio = c1_ratio(u, cover.radius, cover.local_energy_sup(u, mode)[0])
                if ratio is not None:
                    estimate.add(n, ratio)
        if n not in estimate.per_grid:
            raise DiagnosticsError(f"No field with nonzero gradient at n={n}")
    return estimate


def default_eps1(c1: ConstantEstimate, factor: float = DEFAULT_EPS1_FACTOR) -> float:
    """Bubble threshold ε₁ = factor/Ĉ₁."""
    return factor * c1.eps1_star
