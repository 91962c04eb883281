"""Exception hierarchy.

Every error raised for a bad physical input or an impossible request derives
from :class:`BlochError`, so callers (and the CLI) can separate domain
failures from programming errors.
"""


class BlochError(Exception):
    """Base class for domain errors."""


class NonFiniteInputError(BlochError, ValueError):
    pass


class NegativeRateError(BlochError, ValueError):
    pass


class NegativeTimeError(BlochError, ValueError):
    pass


class BranchMismatchError(BlochError):
    """A branch-specific propagator was handed roots of another class."""


class ZeroRootInDoubleBranchError(BranchMismatchError):
    pass


class SingularGammaError(BlochError):
    """Gamma has no inverse, so there is no unique steady state."""


class DegenerateEigenvalueError(BlochError):
    pass


class NotAnEigenvalueError(BlochError, ValueError):
    pass


class ZeroColumnError(BlochError):
    pass


class NearSingularFrameError(BlochError):
    pass


class NoFrameError(BlochError):
    """Degenerate roots: no basis of eigenvectors exists."""


class NegativeInputError(BlochError, ValueError):
    pass


class OutOfRangeError(BlochError, ValueError):
    pass


class ResolutionTooLargeError(BlochError, ValueError):
    pass


class StepTooLargeError(BlochError, ValueError):
    pass


class RegimeDomainError(BlochError, ValueError):
    """The scaled regime map needs R1 == R2 >= R3."""
