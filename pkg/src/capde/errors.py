"""Exception hierarchy shared by all modules."""


class CapdeError(Exception):
    """Base class for every error raised by the library."""


class DomainError(CapdeError, ValueError):
    """An operation was called outside its mathematical domain."""


class IntervalOverflowError(CapdeError, OverflowError):
    """An interval endpoint left the finite floating-point range."""


class SpaceError(CapdeError, ValueError):
    """Incompatible sequence spaces, weights or boxes."""


class SymmetryError(SpaceError):
    """A symmetry class is inconsistent with the requested operation."""


class NotContractingError(CapdeError):
    """A contraction defect is not provably below one."""


class VerificationFailed(CapdeError):
    """A fixed-point theorem hypothesis could not be verified.

    ``label`` names the violated condition when one is known.
    """

    def __init__(self, message, label=None):
        super().__init__(message)
        self.label = label


class EmptyIntervalError(VerificationFailed):
    """The radii polynomial has no verified negative interval."""


class PreconditionError(CapdeError):
    """The approximate inverse could not be built."""


class ResonantTailError(CapdeError):
    """A diagonal tail symbol may vanish outside the truncation box."""


class ResonanceSuspectedError(CapdeError):
    """A jet equation could not be shown solvable at some order."""

    def __init__(self, message, order=None):
        super().__init__(message)
        self.order = order


class ApproximationFailed(CapdeError):
    """The floating-point solver did not converge."""


class ConfigError(CapdeError, ValueError):
    """A configuration file or flag is malformed."""
