"""Helein's antisymmetric tensor and its Helmholtz splitting.

For a sphere-valued u the nonlinearity u|∇u|² is the contraction A⋮∇u of

    A^{i,j}_k = u^i ∂_k u^j − u^j ∂_k u^i,

and on the torus every A^{i,j} splits orthogonally as mean + ∇α + ∇⊥β.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from src.core.logging import get_logger
from src.flow.integrator import FlowState, TrajectoryRecord
from src.flow.scheme import tension
from src.noise.model import NoiseModel
from src.torus.fields import Field, TensorField32, VectorField3
from src.torus.spectral import (
    curl,
    dealias_product,
    divergence,
    gradient,
    laplacian,
    lp_norm,
    perp_gradient,
    poisson_solve,
)

logger = get_logger(__name__)

HELEIN_SERIES = ("laplacian_alpha_sq", "perp_beta_sq", "tension_sq", "div_identity_defect")


def helein_tensor(u: VectorField3) -> TensorField32:
    """A^{i,j}_k = u^i∂_ku^j − u^j∂_ku^i with dealiased products."""
    products = dealias_product(u[:, None, None], gradient(u)[None]).values
    return TensorField32(u.grid, products - np.swapaxes(products, 0, 1))


def contraction(A: Field, grad_u: Field) -> VectorField3:
    """(A⋮∇u)^i = Σ_{j,k} A^{i,j}_k ∂_k u^j.

    Args:
        A: Field with components (3, 3, 2)
        grad_u: Gradient of u with components (3, 2)
    """
    products = dealias_product(A, grad_u[None]).values
    return VectorField3(A.grid, np.sum(products, axis=(1, 2)))


@dataclass(frozen=True, eq=False)
class HeleinSplit:
    """A = mean + ∇α + ∇⊥β.

    Attributes:
        A: The tensor that was split
        mean: Spatial average of every A^{i,j}_k, shape (3, 3, 2)
        alpha: Zero-mean potentials α^{i,j}
        beta: Zero-mean stream functions β^{i,j}
        residual: ‖mean + ∇α + ∇⊥β − A‖_{L²}
    """

    A: TensorField32
    mean: np.ndarray = field(repr=False)
    alpha: Field = field(repr=False)
    beta: Field = field(repr=False)
    residual: float = 0.0

    @property
    def mean_part(self) -> TensorField32:
        grid = self.A.grid
        return TensorField32(grid, np.broadcast_to(self.mean[..., None, None], self.A.values.shape))

    @property
    def gradient_part(self) -> TensorField32:
        """∇α."""
        return TensorField32(self.A.grid, gradient(self.alpha).values)

    @property
    def rotated_part(self) -> TensorField32:
        """∇⊥β."""
        return TensorField32(self.A.grid, perp_gradient(self.beta).values)

    def cross_products(self) -> dict[str, float]:
        """L² inner products between the three parts."""
        mean_part = self.mean_part
        gradient_part = self.gradient_part
        rotated_part = self.rotated_part
        return {
            "mean_gradient": mean_part.inner(gradient_part),
            "mean_rotated": mean_part.inner(rotated_part),
            "gradient_rotated": gradient_part.inner(rotated_part),
        }


def helmholtz_split(A: Field) -> HeleinSplit:
    """Split every A^{i,j} into its mean, a gradient and a rotated gradient.

    α solves Δα = div(A − mean) and β solves Δβ = curl(A − mean), both with
    zero mean. Constant tensors have zero divergence and curl, so they land
    entirely in ``mean``.
    """
    grid = A.grid
    mean = np.asarray(A.mean(), dtype=float)
    centered = Field.wrap(grid, A.values - mean[..., None, None])
    alpha = poisson_solve(divergence(centered))
    beta = poisson_solve(curl(centered))
    tensor = A if isinstance(A, TensorField32) else TensorField32(grid, A.values)
    rebuilt = mean[..., None, None] + gradient(alpha).values + perp_gradient(beta).values
    residual = lp_norm(Field.wrap(grid, rebuilt - A.values), 2)
    return HeleinSplit(A=tensor, mean=mean, alpha=alpha, beta=beta, residual=residual)


def nonlinearity_split(u: VectorField3, split: HeleinSplit) -> dict[str, VectorField3]:
    """mean⋮∇u, ∇α⋮∇u and ∇⊥β⋮∇u; their sum is A⋮∇u."""
    grad_u = gradient(u)
    return {
        "mean": contraction(split.mean_part, grad_u),
        "gradient": contraction(split.gradient_part, grad_u),
        "rotated": contraction(split.rotated_part, grad_u),
    }


def wedge_laplacian(u: VectorField3) -> Field:
    """u^iΔu^j − u^jΔu^i with dealiased products."""
    products = dealias_product(u[:, None], laplacian(u)[None]).values
    return Field.wrap(u.grid, products - np.swapaxes(products, 0, 1))


def helein_sample(u: VectorField3) -> tuple[HeleinSplit, dict[str, float]]:
    """Split A(u) and measure the quantities tracked along a trajectory.

    Returns:
        The split and a dictionary with ``laplacian_alpha_sq`` = ‖Δα‖²,
        ``perp_beta_sq`` = ‖∇⊥β‖², ``tension_sq`` = ‖τ‖² and
        ``div_identity_defect`` = ‖div A − u∧Δu‖/(1 + ‖Δu‖)
    """
    A = helein_tensor(u)
    split = helmholtz_split(A)
    div_A = divergence(A)
    defect = lp_norm(div_A - wedge_laplacian(u), 2) / (1.0 + lp_norm(laplacian(u), 2))
    return split, {
        "laplacian_alpha_sq": lp_norm(laplacian(split.alpha), 2) ** 2,
        "perp_beta_sq": lp_norm(split.rotated_part, 2) ** 2,
        "tension_sq": lp_norm(tension(u), 2) ** 2,
        "div_identity_defect": defect,
    }


@dataclass(frozen=True)
class AlphaTensionBound:
    """Time-integrated ∫‖Δα‖² against ∫‖τ‖².

    Since div A = u∧Δu and |u∧Δu|² = 2|u×τ|², the ratio is 2 for exactly
    sphere-valued maps.
    """

    lhs: float
    rhs: float
    max_div_defect: float

    @property
    def ratio(self) -> float:
        if self.rhs == 0.0:
            return 0.0
        return self.lhs / self.rhs

    @classmethod
    def from_series(
        cls,
        times: Sequence[float],
        laplacian_alpha_sq: Sequence[float],
        tension_sq: Sequence[float],
        div_defects: Sequence[float],
    ) -> "AlphaTensionBound":
        if len(times) < 2:
            return cls(lhs=0.0, rhs=0.0, max_div_defect=max(div_defects, default=0.0))
        return cls(
            lhs=float(trapezoid(laplacian_alpha_sq, times)),
            rhs=float(trapezoid(tension_sq, times)),
            max_div_defect=float(max(div_defects, default=0.0)),
        )

    @classmethod
    def from_record(cls, record: TrajectoryRecord) -> "AlphaTensionBound":
        """Read the series a :class:`HeleinObserver` added to ``record``."""
        return cls.from_series(
            record.times,
            record.series["laplacian_alpha_sq"],
            record.series["tension_sq"],
            record.series["div_identity_defect"],
        )


def alpha_tension_bound(fields: Sequence[VectorField3], times: Sequence[float]) -> AlphaTensionBound:
    """Compare ∫‖Δα‖² with ∫‖τ‖² over trajectory samples by the trapezoid rule."""
    samples = [helein_sample(u)[1] for u in fields]
    return AlphaTensionBound.from_series(
        list(times),
        [sample["laplacian_alpha_sq"] for sample in samples],
        [sample["tension_sq"] for sample in samples],
        [sample["div_identity_defect"] for sample in samples],
    )


@dataclass
class GainSeries:
    """𝒢(t) = E_t − c_φ·t at the sample times of one trajectory."""

    times: np.ndarray
    g: np.ndarray
    trajectory_id: int = 0

    def increments(self, pairs: Sequence[tuple[int, int]]) -> np.ndarray:
        """𝒢(t) − 𝒢(s) for index pairs (s, t)."""
        return np.array([self.g[t] - self.g[s] for s, t in pairs], dtype=float)

    def shifted(self, rate: float) -> "GainSeries":
        """𝒢 + rate·t."""
        return GainSeries(self.times, self.g + rate * self.times, self.trajectory_id)

    def subsample(self, indices: Sequence[int]) -> "GainSeries":
        index = np.asarray(indices, dtype=int)
        return GainSeries(self.times[index], self.g[index], self.trajectory_id)


def gain_series(record: TrajectoryRecord, model: NoiseModel) -> GainSeries:
    times = np.asarray(record.times, dtype=float)
    return GainSeries(
        times=times,
        g=record.values("energy") - model.c_phi * times,
        trajectory_id=record.trajectory_id,
    )


def helmholtz_increments(
    splits: Sequence[HeleinSplit], gains: GainSeries, c_phi: float
) -> list[dict[str, float]]:
    """Increments of the potentials between consecutive samples.

    Each row pairs ‖∇(α_t − α_s)‖² and ‖∇⊥(β_t − β_s)‖² with
    𝒢(t) − 𝒢(s) + c_φ(t − s), the energy change over the interval.
    """
    rows = []
    for index in range(1, len(splits)):
        earlier, later = splits[index - 1], splits[index]
        s, t = float(gains.times[index - 1]), float(gains.times[index])
        alpha = Field.wrap(later.A.grid, later.alpha.values - earlier.alpha.values)
        beta = Field.wrap(later.A.grid, later.beta.values - earlier.beta.values)
        rows.append(
            {
                "s": s,
                "t": t,
                "grad_alpha_sq": lp_norm(gradient(alpha), 2) ** 2,
                "perp_beta_sq": lp_norm(perp_gradient(beta), 2) ** 2,
                "energy_change": float(gains.g[index] - gains.g[index - 1]) + c_phi * (t - s),
            }
        )
    return rows


class HeleinObserver:
    """Adds the :data:`HELEIN_SERIES` values to each sample.

    Args:
        keep_splits: Also keep every HeleinSplit in ``splits``
    """

    def __init__(self, keep_splits: bool = False):
        self.keep_splits = keep_splits
        self.splits: list[HeleinSplit] = []

    def __call__(self, state: FlowState, sample: dict[str, float]) -> None:
        split, values = helein_sample(state.u)
        sample.update(values)
        if self.keep_splits:
            self.splits.append(split)
        if split.residual > 1e-8:
            logger.warning(
                f"Helmholtz reconstruction residual {split.residual:.3e}",
                extra={"step": state.step, "t": state.t},
            )
