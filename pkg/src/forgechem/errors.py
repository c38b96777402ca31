"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input object fails a fail-fast consistency check."""


class CapacityError(ValidationError):
    """Raised when a requested problem size exceeds the desk-scale limits."""


class NumericalError(RuntimeError):
    """Raised when a computation fails for numerical reasons."""


class IntruderStateError(NumericalError):
    """Raised when a perturbative denominator is degenerate with a
    non-negligible numerator."""


class SingularOverlapError(NumericalError):
    """Raised when every overlap eigenvalue falls below the cutoff."""


class UndefinedCorrelationError(NumericalError):
    """Raised when a correlation denominator vanishes."""


class StageFailure(RuntimeError):
    """A pipeline stage aborted; carries the stage name and partial report.

    The original exception is chained as __cause__ so callers can still
    classify the failure.
    """

    def __init__(self, stage: str, report: dict, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.report = report
