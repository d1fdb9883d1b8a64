"""Spectral calculus on torus fields.

Every operator acts on the two trailing grid axes and maps over component
axes, so a VectorField3 gradient is a field with components (3, 2).
"""

import numpy as np

from src.core.exceptions import FieldError, NonZeroMeanError
from src.torus.fields import Field, ScalarField, VectorField3
from src.torus.grid import Grid

MEAN_TOL = 1e-10
SUPPORTED_P = (1, 2, 4, np.inf)


def gradient(f: Field) -> Field:
    """Spectral gradient; appends a spatial axis of size 2."""
    grid = f.grid
    coefficients = grid.fft(f.values)
    k1, k2 = grid.k_derivative
    partials = np.stack([grid.ifft(1j * k1 * coefficients), grid.ifft(1j * k2 * coefficients)], axis=-3)
    return Field.wrap(grid, partials)


def laplacian(f: Field) -> Field:
    """Spectral multiplier −|k|²."""
    grid = f.grid
    return Field.wrap(grid, grid.ifft(-grid.ksq * grid.fft(f.values)))


def perp_gradient(f: Field) -> Field:
    """Rotated gradient (−∂₂f, ∂₁f); always divergence-free."""
    partials = gradient(f).values
    rotated = np.stack([-partials[..., 1, :, :], partials[..., 0, :, :]], axis=-3)
    return Field.wrap(f.grid, rotated)


def _spatial_pair(v: Field) -> tuple[np.ndarray, np.ndarray]:
    if not v.shape or v.shape[-1] != 2:
        raise FieldError(f"Expected a trailing spatial axis of size 2, got components {v.shape}")
    grid = v.grid
    c = grid.fft(v.values)
    return c[..., 0, :, :], c[..., 1, :, :]


def divergence(v: Field) -> Field:
    """∂₁V₁ + ∂₂V₂ over the trailing spatial component axis."""
    grid = v.grid
    c1, c2 = _spatial_pair(v)
    k1, k2 = grid.k_derivative
    return Field.wrap(grid, grid.ifft(1j * k1 * c1 + 1j * k2 * c2))


def curl(v: Field) -> Field:
    """Scalar curl ∂₁V₂ − ∂₂V₁ over the trailing spatial component axis."""
    grid = v.grid
    c1, c2 = _spatial_pair(v)
    k1, k2 = grid.k_derivative
    return Field.wrap(grid, grid.ifft(1j * k1 * c2 - 1j * k2 * c1))


def poisson_solve(rhs: Field, mean_tol: float = MEAN_TOL) -> Field:
    """Zero-mean solution α of Δα = rhs.

    Raises:
        NonZeroMeanError: If any component of rhs has |mean| > mean_tol
    """
    grid = rhs.grid
    means = np.atleast_1d(rhs.mean())
    worst = float(np.max(np.abs(means)))
    if worst > mean_tol:
        raise NonZeroMeanError(f"Poisson right-hand side has mean {worst:.3e} > {mean_tol:.1e}")
    coefficients = grid.fft(rhs.values)
    ksq = np.where(grid.ksq == 0, 1.0, grid.ksq)
    solution = -coefficients / ksq
    solution[..., 0, 0] = 0.0
    return Field.wrap(grid, grid.ifft(solution))


def lp_norm(f: Field, p: float = 2) -> float:
    """L^p norm with the pointwise Euclidean norm over components.

    Args:
        f: Field to measure
        p: One of 1, 2, 4 or inf

    Returns:
        ‖f‖_{L^p} by grid quadrature; max-abs for p = inf
    """
    if p not in SUPPORTED_P:
        raise FieldError(f"Unsupported exponent p={p}; expected one of {SUPPORTED_P}")
    magnitude = f.pointwise_norm()
    if p == np.inf:
        return float(np.max(magnitude))
    return float((np.sum(magnitude**p) * f.grid.area) ** (1.0 / p))


def sobolev_h1_norm(f: Field) -> float:
    """(‖f‖² + ‖∇f‖²)^{1/2}."""
    return float(np.sqrt(lp_norm(f, 2) ** 2 + lp_norm(gradient(f), 2) ** 2))


def l4_gradient_norm(u: Field) -> float:
    """‖∇u‖_{L⁴} with the Frobenius norm of ∇u at each point."""
    return lp_norm(gradient(u), 4)


def spectral_energy(f: Field) -> float:
    """Σ|⟨f, e_k⟩|² over the orthonormal Fourier basis, summed over components."""
    grid = f.grid
    coefficients = grid.fft(f.values)
    total = np.sum(grid.rfft_weights * np.abs(coefficients) ** 2)
    return float(total * (2.0 * np.pi) ** 2 / grid.n**4)


def hessian_norm_sq(f: Field) -> float:
    """∬|∇²f|², which equals ∬|Δf|² on the torus, evaluated spectrally."""
    return spectral_energy(laplacian(f))


def low_pass(f: Field, cutoff: float) -> Field:
    """Keep the modes with Euclidean |k| ≤ cutoff."""
    grid = f.grid
    mask = grid.ksq <= cutoff**2 + 1e-9
    return Field.wrap(grid, grid.ifft(grid.fft(f.values) * mask))


def truncate(f: Field) -> Field:
    """Apply the dealiasing mask |k_j| ≤ n/3."""
    grid = f.grid
    return Field.wrap(grid, grid.ifft(grid.fft(f.values) * grid.dealias_mask))


def project_to_sphere(u: VectorField3) -> VectorField3:
    """Pointwise renormalisation u/|u|."""
    magnitude = u.pointwise_norm()
    if np.min(magnitude) == 0.0:
        raise FieldError("Cannot project a field that vanishes somewhere onto the sphere")
    return VectorField3(u.grid, u.values / magnitude[None])


# Dealiased products: inputs are truncated to |k_j| ≤ n/3, multiplied on a
# 3n/2 grid and truncated back. Exact for up to three factors.


def padded_size(grid: Grid) -> int:
    return 3 * grid.n // 2


def _pad(grid: Grid, coefficients: np.ndarray, m: int) -> np.ndarray:
    """Zero-pad rfft coefficients of the n grid and evaluate on the m grid."""
    n = grid.n
    padded = np.zeros(coefficients.shape[:-2] + (m, m // 2 + 1), dtype=complex)
    half = n // 2
    padded[..., :half, : half + 1] = coefficients[..., :half, :]
    padded[..., m - half :, : half + 1] = coefficients[..., half:, :]
    padded *= (m / n) ** 2
    return np.fft.irfft2(padded, s=(m, m), axes=(-2, -1))


def lift(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Truncate and interpolate values onto the padded 3n/2 grid."""
    return _pad(grid, grid.fft(values) * grid.dealias_mask, padded_size(grid))


def fourier_interpolate(f: Field, m: int) -> np.ndarray:
    """Values of the trigonometric interpolant of f on an m×m grid, m ≥ n.

    Nyquist modes are dropped.
    """
    grid = f.grid
    if m < grid.n:
        raise FieldError(f"Interpolation grid m={m} is coarser than n={grid.n}")
    coefficients = grid.fft(f.values)
    coefficients[..., grid.n // 2, :] = 0.0
    coefficients[..., :, -1] = 0.0
    return _pad(grid, coefficients, m)


def restrict(grid: Grid, padded_values: np.ndarray) -> np.ndarray:
    """Return padded-grid values to the n grid, keeping |k_j| ≤ n/3."""
    n = grid.n
    m = padded_size(grid)
    spectrum = np.fft.rfft2(padded_values, axes=(-2, -1))
    half = n // 2
    coefficients = np.zeros(padded_values.shape[:-2] + grid.spectral_shape, dtype=complex)
    coefficients[..., :half, :] = spectrum[..., :half, : half + 1]
    coefficients[..., half:, :] = spectrum[..., m - half :, : half + 1]
    coefficients *= (n / m) ** 2
    coefficients *= grid.dealias_mask
    return grid.ifft(coefficients)


def dealias_product(*fields: Field) -> Field:
    """Pointwise product of fields with 2/3-rule dealiasing.

    Component axes broadcast with numpy rules, so
    ``dealias_product(u[:, None], grad_u)`` forms u^i ∂_k u^j.
    """
    if not fields:
        raise FieldError("dealias_product needs at least one field")
    grid = fields[0].grid
    for other in fields[1:]:
        fields[0].same_grid(other)
    product = lift(grid, fields[0].values)
    for other in fields[1:]:
        product = product * lift(grid, other.values)
    return Field.wrap(grid, restrict(grid, product))


def half_plane_modes(cutoff: float) -> np.ndarray:
    """Nonzero wavevectors with |k| ≤ cutoff, one per ±k pair.

    The ordering depends only on ``cutoff``: k₁ ascending, then k₂ ascending,
    keeping k₂ > 0 or (k₂ = 0 and k₁ > 0).
    """
    bound = int(np.floor(cutoff))
    modes = [
        (k1, k2)
        for k1 in range(-bound, bound + 1)
        for k2 in range(0, bound + 1)
        if (k2 > 0 or k1 > 0) and k1 * k1 + k2 * k2 <= cutoff * cutoff + 1e-9
    ]
    return np.array(modes, dtype=float).reshape(-1, 2)


def random_band_limited(
    grid: Grid,
    cutoff: float,
    rng: np.random.Generator,
    decay: float = 0.0,
    components: int | None = None,
) -> Field:
    """Zero-mean random trigonometric polynomial with |k| ≤ cutoff.

    Coefficients are drawn on the fixed mode set of :func:`half_plane_modes`,
    so one generator state gives the same continuous function on every grid.

    Args:
        grid: Target grid
        cutoff: Euclidean mode cutoff, at most n/3
        rng: Random generator consumed by the draw
        decay: Coefficients scale like (1+|k|²)^(−decay/2)
        components: Number of independent components, or None for a scalar field
    """
    if cutoff > grid.cutoff:
        raise FieldError(f"Cutoff {cutoff} exceeds the dealiasing band n/3 = {grid.cutoff}")
    modes = half_plane_modes(cutoff)
    count = 1 if components is None else components
    weights = (1.0 + np.sum(modes**2, axis=1)) ** (-decay / 2.0)
    cos_coef = rng.standard_normal((count, len(modes))) * weights
    sin_coef = rng.standard_normal((count, len(modes))) * weights
    phase = np.einsum("md,dxy->mxy", modes, grid.x)
    values = np.einsum("cm,mxy->cxy", cos_coef, np.cos(phase)) + np.einsum(
        "cm,mxy->cxy", sin_coef, np.sin(phase)
    )
    if components is None:
        return ScalarField(grid, values[0])
    return Field.wrap(grid, values)
