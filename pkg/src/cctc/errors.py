"""Exception hierarchy shared across the package."""


class CctcError(Exception):
    """Base class for all package errors."""


class UsageError(CctcError, ValueError):
    """Arguments are malformed or inconsistent (wrong lengths, bad ranges)."""


class DomainError(CctcError, ValueError):
    """Numeric input lies outside the mathematical domain of an operation."""


class DegenerateEstimateError(CctcError):
    """The extreme-index set an estimator averages over is empty."""


class FitError(CctcError):
    """GPD maximum-likelihood fit failed on every start of the retry ladder."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NoDelayFoundError(CctcError):
    """No lag reaches the selection threshold."""


class SimulationError(CctcError):
    """A simulated path became non-finite."""


class IngestionError(CctcError):
    """Input file could not be parsed into aligned numeric series."""
