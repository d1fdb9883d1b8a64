"""Compensated regularity: solves sourced by the Poisson bracket {a, b}."""

from dataclasses import dataclass, field

import numpy as np

from src.core.exceptions import SingularModeError, WenteError
from src.core.logging import get_logger
from src.noise.model import trajectory_rng
from src.torus.fields import ScalarField
from src.torus.grid import Grid
from src.torus.spectral import (
    fourier_interpolate,
    gradient,
    lift,
    lp_norm,
    poisson_solve,
    random_band_limited,
    restrict,
)

logger = get_logger(__name__)

WENTE_MODES = ("helmholtz", "literal", "laplace")
KERNEL_RTOL = 1e-12
WENTE_COLUMNS = ("seed", "grad_a", "grad_b", "sup_phi", "grad_phi", "ratio")


def poisson_bracket(a: ScalarField, b: ScalarField) -> ScalarField:
    """{a, b} = ∂₁a∂₂b − ∂₂a∂₁b with dealiased products."""
    a.same_grid(b)
    grid = a.grid
    da = lift(grid, gradient(a).values)
    db = lift(grid, gradient(b).values)
    return ScalarField(grid, restrict(grid, da[0] * db[1] - da[1] * db[0]))


@dataclass(frozen=True, eq=False)
class WenteSolution:
    """φ and the measured ratio (|φ|_∞ + ‖∇φ‖)/(‖∇a‖‖∇b‖)."""

    phi: ScalarField = field(repr=False)
    rhs: ScalarField = field(repr=False)
    mode: str
    sup: float
    grad_norm: float
    grad_a: float
    grad_b: float

    @property
    def ratio(self) -> float:
        denominator = self.grad_a * self.grad_b
        if denominator == 0.0:
            return 0.0
        return (self.sup + self.grad_norm) / denominator


def _solve(rhs: ScalarField, mode: str, project_kernel: bool) -> ScalarField:
    grid = rhs.grid
    if mode == "laplace":
        return poisson_solve(rhs)
    coefficients = grid.fft(rhs.values)
    if mode == "helmholtz":
        return ScalarField(grid, grid.ifft(coefficients / (1.0 + grid.ksq)))

    # (I + Δ) annihilates the |k|² = 1 modes
    kernel = np.isclose(grid.ksq, 1.0)
    content = float(np.max(np.abs(coefficients[kernel])))
    scale = max(1.0, float(np.max(np.abs(coefficients))))
    if content > KERNEL_RTOL * scale:
        if not project_kernel:
            raise SingularModeError(
                f"Right side has content {content:.3e} on the |k|²=1 kernel of (I + Δ)"
            )
        logger.debug(f"Projecting out kernel content {content:.3e}")
    symbol = np.where(kernel, 1.0, 1.0 - grid.ksq)
    solution = np.where(kernel, 0.0, coefficients / symbol)
    return ScalarField(grid, grid.ifft(solution))


def wente_solve(
    a: ScalarField,
    b: ScalarField,
    mode: str = "helmholtz",
    project_kernel: bool = False,
    sup_grid: int | None = None,
) -> WenteSolution:
    """Solve the bracket-sourced problem and measure the Wente ratio.

    Args:
        a: Band-limited scalar field
        b: Band-limited scalar field on the same grid
        mode: ``"helmholtz"`` solves (I − Δ)φ = {a,b}; ``"literal"`` solves
            (I + Δ)φ = {a,b}; ``"laplace"`` solves Δφ = {a,b} with zero mean
        project_kernel: In literal mode, drop |k|² = 1 content instead of raising
        sup_grid: Evaluate |φ|_∞ on this finer grid by trigonometric
            interpolation, so that sweeps are comparable across n

    Raises:
        WenteError: For an unknown mode
        SingularModeError: If literal mode meets kernel content without
            ``project_kernel``
    """
    if mode not in WENTE_MODES:
        raise WenteError(f"Unknown Wente mode {mode!r}; expected one of {WENTE_MODES}")
    rhs = poisson_bracket(a, b)
    phi = _solve(rhs, mode, project_kernel)
    if sup_grid is not None and sup_grid > phi.grid.n:
        sup = float(np.max(np.abs(fourier_interpolate(phi, sup_grid))))
    else:
        sup = lp_norm(phi, np.inf)
    return WenteSolution(
        phi=phi,
        rhs=rhs,
        mode=mode,
        sup=sup,
        grad_norm=lp_norm(gradient(phi), 2),
        grad_a=lp_norm(gradient(a), 2),
        grad_b=lp_norm(gradient(b), 2),
    )


def wente_pair(grid: Grid, seed: int, index: int, cutoff: float = 4, decay: float = 1.0):
    """Random band-limited pair number ``index``; identical functions on every grid."""
    rng = trajectory_rng(seed, index)
    a = random_band_limited(grid, cutoff, rng, decay)
    b = random_band_limited(grid, cutoff, rng, decay)
    return a, b


def wente_sweep(
    count: int,
    n: int,
    seed: int = 0,
    mode: str = "helmholtz",
    cutoff: float = 4,
    sup_grid: int = 256,
    project_kernel: bool = True,
) -> list[dict[str, float]]:
    """Wente ratios over ``count`` random pairs.

    Returns:
        One row per pair with the :data:`WENTE_COLUMNS` keys; ``seed`` is
        the pair index within the sweep
    """
    if count < 1:
        raise WenteError(f"Sweep needs at least one pair, got {count}")
    grid = Grid(n)
    rows = []
    for index in range(count):
        a, b = wente_pair(grid, seed, index, cutoff)
        solution = wente_solve(a, b, mode, project_kernel=project_kernel, sup_grid=max(sup_grid, n))
        rows.append(
            {
                "seed": index,
                "grad_a": solution.grad_a,
                "grad_b": solution.grad_b,
                "sup_phi": solution.sup,
                "grad_phi": solution.grad_norm,
                "ratio": solution.ratio,
            }
        )
    logger.info(
        f"Wente sweep n={n}: max ratio {max(row['ratio'] for row in rows):.6g} over {count} pairs"
    )
    return rows
