"""Exception types and warning categories used across the package.

The command-line harness maps these onto process exit codes, so library code
should raise the most specific type that applies.
"""


class ParameterError(ValueError):
    """An argument is outside its documented range (e.g. rank out of bounds)."""


class DimensionError(ParameterError):
    """A matrix dimension is zero or negative."""


class MatrixInputError(ValueError):
    """A matrix argument is malformed: wrong rank, non-numeric, or non-finite."""


class ContextError(ValueError):
    """A bound-evaluation context violates a precondition of the inequality
    being checked (e.g. a sketch partition that must be invertible is
    numerically singular)."""


class PgmFormatError(ValueError):
    """A PGM file is malformed.  ``byte_offset`` locates the first offending
    byte in the file, when known."""

    def __init__(self, message, byte_offset=None):
        if byte_offset is not None:
            message = f"{message} (byte offset {byte_offset})"
        super().__init__(message)
        self.byte_offset = byte_offset


class ConvergenceError(RuntimeError):
    """An iterative kernel failed to converge.  ``estimate`` carries the best
    value reached before giving up."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class ResourceLimitError(RuntimeError):
    """A requested computation exceeds the configured memory cap.
    ``required_bytes`` and ``cap_bytes`` document the refusal."""

    def __init__(self, message, required_bytes=None, cap_bytes=None):
        super().__init__(message)
        self.required_bytes = required_bytes
        self.cap_bytes = cap_bytes


class RankDeficiencyWarning(UserWarning):
    """Emitted when an orthonormalization encounters numerically dependent
    columns; the basis is still returned."""
