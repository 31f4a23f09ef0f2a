"""Exception hierarchy for rigidity-lab.

Every error raised on purpose by the library derives from RigidityLabError.
The CLI maps ConfigError to exit status 2 and everything else to 1.
"""


class RigidityLabError(Exception):
    """Base class for all rigidity-lab errors."""


class PrecisionExhausted(RigidityLabError):
    """A real input cannot certify the requested number of digits."""


class NotInUnitInterval(RigidityLabError):
    """A real frequency lies outside (0, 1) or is exactly 1/2."""


class InsufficientDepth(RigidityLabError):
    """A continued fraction is not expanded far enough for the request."""


class EmptyResult(RigidityLabError):
    """A search produced nothing; the caller decides whether to deepen."""


class NonfiniteVariation(RigidityLabError):
    """A roof description is malformed or has infinite variation."""


class ZeroJump(RigidityLabError):
    """An operation needs a roof with a nonzero jump."""


class RoofNotPositive(RigidityLabError):
    """A roof used for a flow has no positive certified infimum."""


class HorizonOverflow(RigidityLabError):
    """A hitting count would exceed the configured cap."""


class FlowInvariantViolation(RigidityLabError):
    """A flow point left the region under the roof by more than rounding."""


class ArcTooWide(RigidityLabError):
    """An arc is too long for the requested combinatorics."""


class EpsilonTooLarge(RigidityLabError):
    """Epsilon exceeds the admissible cap in paper-faithful mode."""


class ScaleUnavailable(RigidityLabError):
    """No admissible scale index exists for the requested set."""


class CaseFallthrough(RigidityLabError):
    """No branch of the window decision tree matched."""


class NonzeroJump(RigidityLabError):
    """The coboundary solver was handed a roof with a jump."""


class NonzeroMean(RigidityLabError):
    """The coboundary solver was handed a roof with nonzero mean."""


class SmallDivisorUnderflow(RigidityLabError):
    """A small divisor could not be certified away from zero."""


class ConfigError(RigidityLabError):
    """An experiment configuration is malformed."""
