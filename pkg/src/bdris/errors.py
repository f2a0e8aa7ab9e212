"""Exception types raised across the package."""


class BdrisError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(BdrisError, ValueError):
    """Input violates a documented precondition (non-finite entries, bad dims)."""


class DegenerateInputError(BdrisError, ValueError):
    """Input is degenerate for the requested operation (e.g. all-zero matrix)."""


class InvalidGeometryError(BdrisError, ValueError):
    """Scenario geometry is unusable (non-positive distance, coincident nodes)."""


class DegenerateChannelError(BdrisError, ValueError):
    """A channel vector/matrix required to be nonzero has zero norm."""


class InternalConsistencyError(BdrisError, RuntimeError):
    """An internal invariant failed (e.g. eigenvalue sign pattern without a
    zero crossing, which cannot occur for a trace-free quadratic form)."""


class UnsupportedSizeError(BdrisError, ValueError):
    """Problem size outside the supported range of an operation."""


class ConfigError(BdrisError, ValueError):
    """Experiment configuration could not be parsed or validated."""
