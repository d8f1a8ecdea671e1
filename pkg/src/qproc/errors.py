"""Exception hierarchy shared across the package."""


class QprocError(Exception):
    """Base class for all package errors."""


class ShapeError(QprocError, ValueError):
    """Matrix or vector dimensions do not agree."""


class ValidationError(QprocError, ValueError):
    """A structural invariant failed.

    ``kind`` names the failed check (``"unitary"``, ``"projector"``,
    ``"orthogonality"``, ``"completeness"``, ...) and ``residual`` holds
    the offending max-norm residual when one exists.
    """

    def __init__(self, kind, message, residual=None):
        super().__init__(message)
        self.kind = kind
        self.residual = residual


class UnknownSymbolError(QprocError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnsupportedError(QprocError):
    """The requested operation is undefined for this input (e.g. a nondeterministic generator)."""


class ResourceLimitError(QprocError):
    """Enumeration exceeded the configured live-prefix cap."""


class NumericalError(QprocError):
    """A numerical check failed in a way that indicates a degenerate computation."""
