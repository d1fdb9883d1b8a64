"""Custom exception hierarchy for SLLG."""


class SllgError(Exception):
    """Base exception for all SLLG errors."""

    pass


class ConfigurationError(SllgError):
    """Raised when there's a configuration issue."""

    pass


class FieldError(SllgError):
    """Raised when a torus field operation receives invalid input."""

    pass


class GridError(FieldError):
    """Raised when a grid violates its size constraints."""

    pass


class GridMismatchError(FieldError):
    """Raised when fields living on different grids are combined."""

    pass


class NonZeroMeanError(FieldError):
    """Raised when a Poisson right-hand side has a nonzero mean."""

    pass


class NoiseError(SllgError):
    """Raised when a noise model cannot be built."""

    pass


class CutoffTooLargeError(NoiseError):
    """Raised when the noise mode cutoff exceeds the dealiasing band."""

    pass


class NumericalAbort(SllgError):
    """Raised when time stepping cannot continue.

    Attributes:
        step: Index of the step that failed, when known.
    """

    def __init__(self, message: str, step: int | None = None):
        self.step = step
        if step is not None:
            message = f"{message} (step {step})"
        super().__init__(message)


class NormCollapseError(NumericalAbort):
    """Raised when |u| drops below 1/2 somewhere before projection."""

    pass


class NonFiniteError(NumericalAbort):
    """Raised when a field contains NaN or Inf values."""

    pass


class BubbleError(SllgError):
    """Raised when the bubbling monitor is misconfigured."""

    pass


class RadiusOutOfRangeError(BubbleError):
    """Raised when a cover radius is outside the admissible range."""

    pass


class WenteError(SllgError):
    """Raised when a Wente solve is ill-posed."""

    pass


class SingularModeError(WenteError):
    """Raised when the operator annihilates a mode carried by the right-hand side."""

    pass


class DiagnosticsError(SllgError):
    """Raised when a statistical diagnostic cannot be evaluated."""

    pass


class InsufficientEnsembleError(DiagnosticsError):
    """Raised when an ensemble is too small for a statistical verdict."""

    pass


class InitialDataError(SllgError):
    """Raised when initial data parameters are invalid."""

    pass


class ExperimentError(SllgError):
    """Raised when there's an error in experiment execution."""

    pass


class WorkflowError(SllgError):
    """Raised when there's an error in workflow execution."""

    pass
