"""Exception types shared across the toolkit."""


class PetcBoundError(Exception):
    """Base class for toolkit-specific failures."""


class DegenerateStateError(PetcBoundError):
    """A simulated state collapsed onto the origin, where triggering is undefined."""


class RootBracketingError(PetcBoundError):
    """Root finding for the risk polynomial could not bracket a sign change.

    Carries diagnostics: the (N, k, beta) triple and the probe values examined.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class UnsupportedConfigError(PetcBoundError):
    """A configuration combination the toolkit deliberately refuses."""


class AbstractionMismatchError(PetcBoundError):
    """Classifier and traffic abstraction were built from different label sets."""
