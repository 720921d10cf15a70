"""Exception types shared across the package."""


class DcsimError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(DcsimError, ValueError):
    """A precondition on an operation's arguments was violated."""


class DatasetFormatError(DcsimError, ValueError):
    """A dataset file could not be parsed.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UndefinedMetricError(DcsimError, ValueError):
    """The requested metric is undefined for the given labels."""


class TrainingDivergedError(DcsimError, RuntimeError):
    """Training produced a non-finite loss."""
