"""Exception taxonomy shared across the geometry modules."""


class CalibraError(Exception):
    """Base class for all package errors."""


class StructuralError(CalibraError):
    """Mismatched dimensions, degrees, or broken algebraic identities."""


class DegenerateInputError(CalibraError):
    """Rank-deficient or otherwise degenerate geometric input."""


class ChartError(CalibraError):
    """A coordinate chart is invalid at the requested point."""


class ConsistencyError(CalibraError):
    """Two independent computation routes disagree beyond tolerance."""


class InputValidationError(CalibraError, ValueError):
    """Caller-supplied data violates a documented precondition."""


class FDEvaluationError(CalibraError):
    """A map could not be evaluated inside a finite-difference stencil."""
