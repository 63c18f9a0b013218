"""Exception types shared across the toolkit."""


class KronkitError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(KronkitError, ValueError):
    """A model parameter is outside its admissible range, or an operation's
    precondition on the parameters is not met."""


class DimensionMismatchError(KronkitError, ValueError):
    """Two vertex labels of different bit dimensions were combined."""


class ResourceLimitError(KronkitError, RuntimeError):
    """The requested object exceeds the configured desk-scale cap."""


class InternalConsistencyError(KronkitError, RuntimeError):
    """An invariant that must hold by construction was violated."""
