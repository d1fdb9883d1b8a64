"""Simulation configuration: one pydantic section per dotted key prefix."""

import math
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.flow.initial import InitialKind
from src.flow.scheme import SchemeKind


class Section(BaseModel):
    """Base for config sections; unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class GridSection(Section):
    n: int = Field(default=64, ge=8, description="Grid points per axis")

    @field_validator("n")
    @classmethod
    def _power_of_two(cls, n: int) -> int:
        if n & (n - 1):
            raise ValueError(f"grid.n must be a power of two, got {n}")
        return n


class NoiseSection(Section):
    sigma: float = Field(default=0.05, ge=0.0, description="Noise amplitude σ")
    s: float = Field(default=3.0, description="Spectral decay exponent")
    cutoff: float = Field(default=8.0, ge=0.0, description="Euclidean mode cutoff K")


class SchemeSection(Section):
    kind: SchemeKind = Field(default=SchemeKind.SEMI_IMPLICIT_EM, description="Step rule")
    dt: float = Field(default=1e-4, gt=0.0, description="Time step")
    projection: bool = Field(default=True, description="Renormalise onto the sphere each step")
    ito_correction: bool = Field(default=True, description="Include F_φu in the drift")


class SimSection(Section):
    T: float = Field(default=0.1, gt=0.0, description="Final time")
    record_stride: int = Field(default=1, ge=1, description="Steps between samples")
    detection_stride: int = Field(default=1, ge=1, description="Steps between bubble checks")


class BubbleSection(Section):
    rho: float = Field(default=math.pi / 8, gt=0.0, description="Ball radius ϱ")
    dilation: float = Field(default=2.0, gt=1.0, alias="lambda", description="Cover dilation λ")
    eps1: float | None = Field(
        default=None, gt=0.0, description="Energy threshold ε₁; None derives it from Ĉ₁"
    )
    restart_cutoff: float = Field(default=8.0, gt=0.0, description="Restart low-pass cutoff")
    max_restarts: int = Field(default=8, ge=0, description="Restarts allowed per trajectory")


class EnsembleSection(Section):
    count: int = Field(default=200, ge=1, description="Trajectories M")
    master_seed: int = Field(default=0, ge=0, description="Seed of every trajectory stream")


class InitialSection(Section):
    kind: InitialKind = Field(default=InitialKind.RANDOM_SMOOTH, description="Initial data kind")
    params: dict[str, Any] = Field(default_factory=dict, description="Kind-specific parameters")


class CoupleSection(Section):
    perturbation: float = Field(default=1e-3, gt=0.0, description="Size of the v0 perturbation")
    validation_runs: int = Field(default=10, ge=1, description="Pairs checked against the fit")
    safety: float = Field(default=2.0, ge=1.0, description="Factor applied to the fitted C")
    min_constant: float = Field(default=0.05, ge=0.0, description="Floor of the validated C")


class ConstantsSection(Section):
    samples: int = Field(default=200, ge=1, description="Random functions for Ĉ₀")
    grid_sizes: list[int] = Field(default_factory=lambda: [64, 128], min_length=1)
    radii: list[float] = Field(default_factory=lambda: [math.pi / 8, math.pi / 4], min_length=1)
    snapshots: int = Field(default=5, ge=1, description="Fields per trajectory used for Ĉ₁")
    eps1_factor: float = Field(default=0.5, gt=0.0, description="ε₁ = factor/Ĉ₁")


class WenteSection(Section):
    count: int = Field(default=1000, ge=1, description="Random pairs per grid")
    mode: str = Field(default="helmholtz", pattern="^(helmholtz|literal|laplace)$")
    cutoff: float = Field(default=4.0, ge=1.0, description="Mode cutoff of a and b")
    sup_grid: int = Field(default=256, ge=8, description="Grid for |φ|_∞")
    grid_sizes: list[int] = Field(default_factory=lambda: [64, 128], min_length=1)


class VerifySection(Section):
    fixed_point_T: float = Field(default=1.0, gt=0.0, description="Horizon of the fixed-point check")
    negative_sigma_factor: float = Field(
        default=10.0, ge=1.0, description="σ amplification of the F_φ negative control"
    )
    reproducibility_count: int = Field(default=4, ge=1, description="Trajectories compared")


class OutputSection(Section):
    dir: str | None = Field(default=None, description="Output directory; None uses settings")
    formats: list[Literal["csv", "json"]] = Field(
        default_factory=lambda: ["csv", "json"],
        min_length=1,
        description="Artifact families to write; manifest.json is always written",
    )
    snapshots: bool = Field(default=False, description="Write field snapshots")
    snapshot_every: int = Field(default=100, ge=1, description="Samples between snapshots")


class SimConfig(BaseModel):
    """Complete, validated configuration of a run.

    Example:
        >>> config = SimConfig.model_validate({"grid": {"n": 128}, "noise": {"cutoff": 16}})
        >>> config.flat()["grid.n"]
        128
    """

    model_config = ConfigDict(extra="forbid")

    grid: GridSection = Field(default_factory=GridSection)
    noise: NoiseSection = Field(default_factory=NoiseSection)
    scheme: SchemeSection = Field(default_factory=SchemeSection)
    sim: SimSection = Field(default_factory=SimSection)
    bubble: BubbleSection = Field(default_factory=BubbleSection)
    ensemble: EnsembleSection = Field(default_factory=EnsembleSection)
    initial: InitialSection = Field(default_factory=InitialSection)
    couple: CoupleSection = Field(default_factory=CoupleSection)
    constants: ConstantsSection = Field(default_factory=ConstantsSection)
    wente: WenteSection = Field(default_factory=WenteSection)
    verify: VerifySection = Field(default_factory=VerifySection)
    output: OutputSection = Field(default_factory=OutputSection)

    @model_validator(mode="after")
    def _cross_fields(self) -> "SimConfig":
        n = self.grid.n
        if self.noise.cutoff > n / 3:
            raise ValueError(f"noise.cutoff={self.noise.cutoff} exceeds n/3 = {n / 3:.2f}")
        steps = self.sim.T / self.scheme.dt
        if abs(steps - round(steps)) > 1e-9 * max(steps, 1.0):
            raise ValueError(f"sim.T/scheme.dt must be integral, got {steps}")
        if self.bubble.rho < 3.0 * 2.0 * math.pi / n:
            raise ValueError(f"bubble.rho={self.bubble.rho} is below three grid spacings")
        return self

    @property
    def steps(self) -> int:
        return int(round(self.sim.T / self.scheme.dt))

    def flat(self) -> dict[str, Any]:
        """Dotted-key view of the resolved configuration, defaults included."""
        flat: dict[str, Any] = {}
        for section, values in self.model_dump(mode="json", by_alias=True).items():
            for key, value in values.items():
                flat[f"{section}.{key}"] = value
        return flat
