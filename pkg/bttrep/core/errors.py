"""
Exceptions raised by bttrep.

Every error clause of the library maps to one class below. The CLI turns
them into exit codes, see ``bttrep.cli``.
"""


class BttError(Exception):
    """Base class for all bttrep errors."""

    def __init__(self, message: str = "", **details):
        super().__init__(message)
        self.details = details


class FieldMismatchError(BttError, ValueError):
    """Operands live in different fields or at different places."""


class ZeroValuationError(BttError, ValueError):
    """The valuation of zero is +infinity and was requested as an integer."""


class BoundExceededError(BttError):
    """A configured enumeration bound was exceeded."""


class UnsupportedFieldError(BttError):
    """The computation needs arithmetic this package does not implement."""


class ClassDataMissingError(BttError):
    """Degree-4 class data needed for a count is absent from the configuration."""


class InfiniteBranchError(BttError):
    """A branch search went past its depth bound."""


class ReducibleRepresentationError(BttError):
    """The span of the group image is not all of the matrix algebra."""


class RelatorError(BttError, ValueError):
    """Generator images do not satisfy the group relators."""


class SymbolicCountError(BttError):
    """Representatives were requested for a count known only symbolically."""

    def __init__(self, message: str = "", report=None, **details):
        super().__init__(message, **details)
        self.report = report


class ApproximationError(BttError):
    """Strong approximation did not meet its valuation contract."""


class DegenerateEigenvaluesError(BttError, ValueError):
    """The eigenvalue configuration is not the one the operation needs."""


class SquareElementError(BttError, ValueError):
    """The element is a square in its field."""
