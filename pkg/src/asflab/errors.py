"""Exception types shared across the package."""


class IncommensurateParameters(ValueError):
    """A continuous parameter does not land on the finite grid.

    The message names the first violated divisibility condition; callers may
    retry with a refined grid resolution or an adjusted period.
    """


class ExponentDomainError(ValueError):
    """Lebesgue exponent outside the open interval (1, inf)."""


class ModelMismatchError(ValueError):
    """Two grid objects live on different cyclic models."""


class DenseCapExceededError(ValueError):
    """Dense assembly requested above the configured size cap."""


class PainlessConditionError(ValueError):
    """Window support exceeds one modulation period; the covering-count
    oracle does not apply (this is not a verdict)."""


class ZeroVectorError(ValueError):
    """Duality map requested for the zero vector."""


class SweepSpecError(ValueError):
    """Invalid sweep specification."""


class SpecHashMismatchError(SweepSpecError):
    """Partial results belong to a different sweep specification."""
