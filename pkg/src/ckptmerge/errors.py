"""Exception types raised across the package."""


class CkptMergeError(Exception):
    """Base class for all package errors."""


class FormatError(CkptMergeError):
    """A checkpoint file is malformed (bad magic, truncated, bad manifest)."""


class ValidationError(CkptMergeError, ValueError):
    """A checkpoint violates an invariant (bad name, shape, non-finite data)."""


class IoError(CkptMergeError, OSError):
    """Reading or writing a checkpoint file failed at the OS level."""


class CompatError(CkptMergeError):
    """Two checkpoints cannot be merged; ``report`` lists the mismatches."""

    def __init__(self, report, message=None):
        self.report = report
        if message is None:
            parts = [f"{name} ({kind}: {detail})" for name, kind, detail in report.mismatches]
            message = "incompatible checkpoints: " + "; ".join(parts)
        super().__init__(message)


class WeightError(CkptMergeError, ValueError):
    """Merge weights are negative, mis-sized, or do not sum to one."""


class EmptyInputError(CkptMergeError, ValueError):
    pass


class NumericalError(CkptMergeError, ArithmeticError):
    """Gram matrix could not be factored even with the largest jitter."""


class DuplicateError(CkptMergeError, ValueError):
    """Repeated input locations in a noise-free GP fit."""


class DomainError(CkptMergeError, ValueError):
    pass


class DivergenceError(CkptMergeError, ArithmeticError):
    pass


class TrainingError(CkptMergeError):
    pass


class ObjectiveError(CkptMergeError):
    """The objective raised during a search; ``partial`` holds the trace so far."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial
