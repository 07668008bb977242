"""Exception hierarchy for MomentRate.

Every failure raised by the library derives from MomentRateError and from the closest
builtin, so callers can catch either the precise class or the builtin family.
"""


class MomentRateError(Exception):
    """Base class for all library errors."""


# ---------------------------------------------------------------------------
# Input validation
# ---------------------------------------------------------------------------


class SingularInput(MomentRateError, ValueError):
    """A group element factor is singular beyond the condition guard."""


class MismatchedGroup(MomentRateError, ValueError):
    """Operands live over different group specifications."""


class NotAState(MomentRateError, ValueError):
    """A matrix fails the Hermitian, positivity or unit-trace checks."""


class NotDominant(MomentRateError, ValueError):
    """A weight is not dominant integral for the requested family."""


class TooLarge(MomentRateError, ValueError):
    """A tensor power exceeds the configured memory bound."""


class UnsupportedRep(MomentRateError, ValueError):
    """The operation is not implemented for this representation family."""


class ConfigError(MomentRateError, ValueError):
    """A run configuration is malformed or inconsistent."""


# ---------------------------------------------------------------------------
# Numerical failures
# ---------------------------------------------------------------------------


class MaxIterations(MomentRateError, RuntimeError):
    """An optimizer neither converged nor certified divergence."""


class EnvelopeOverflow(MomentRateError, RuntimeError):
    """A rejection-sampling density exceeded its envelope."""


class SamplerTimeout(MomentRateError, RuntimeError):
    """Rejection sampling acceptance rate fell below the floor."""


class SingularMinor(MomentRateError, ArithmeticError):
    """A principal minor underflowed in a closed-form reduction."""


class InvariantViolation(MomentRateError, AssertionError):
    """An internally asserted identity failed beyond tolerance."""
