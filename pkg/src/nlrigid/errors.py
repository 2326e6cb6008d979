"""Exception types shared across the package."""


class NlrigidError(Exception):
    """Base class for all package errors."""


class ConfigurationError(NlrigidError):
    """Invalid parameters, incompatible grid/kernel pairings, bad config files."""


class ResolutionError(ConfigurationError):
    """Grid spacing too coarse to resolve a kernel."""


class FieldIOError(NlrigidError):
    """Corrupt or malformed field file. Carries the byte offset of the defect."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class DomainError(NlrigidError):
    """Operation evaluated outside its admissible domain (empty window, nonpositive weight)."""


class HypothesisError(NlrigidError):
    """A structural hypothesis (monotonicity) does not hold, so the check refuses to run."""


class SolverError(NlrigidError):
    """Iteration failed to converge. Carries the residual history."""

    def __init__(self, message, history=()):
        super().__init__(message)
        self.history = tuple(history)
