"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class PlupError(Exception):
    exit_code = 1


class UsageError(PlupError, ValueError):
    exit_code = 2


class ResourceError(PlupError):
    exit_code = 3


class NumericalError(PlupError, ArithmeticError):
    exit_code = 4


class DomainError(NumericalError):
    """Operation undefined for the given input (e.g. reciprocal of a series with zero constant term)."""


class PoleAtOriginError(NumericalError):
    pass


class DegenerateSampleError(NumericalError):
    """Thiele inverted differences hit a zero denominator; resample and retry."""


class DegenerateApproximantError(NumericalError):
    """Singular Padé system; reduce the denominator degree."""


class SingularSystemError(NumericalError):
    pass


class ReconstructionError(NumericalError):
    pass


class RootConvergenceError(NumericalError):
    """Root finder hit its iteration cap. ``roots`` holds the partial result."""

    def __init__(self, message, roots=(), unconverged=()):
        super().__init__(message)
        self.roots = list(roots)
        self.unconverged = list(unconverged)


class NoEstimateError(NumericalError):
    pass


class ConsistencyError(PlupError):
    """An internal cross-check failed. Carries the disagreeing data for inspection."""

    exit_code = 5

    def __init__(self, message, **data):
        super().__init__(message)
        self.data = data


class StabilizationError(ConsistencyError):
    pass
