"""Exception hierarchy.

Every numerical failure derives from :class:`NumericalError`; the CLI maps
those to exit code 3 and :class:`ValidationError` to exit code 2.
"""


class MaslovKitError(Exception):
    """Base class for all package errors."""


class ValidationError(MaslovKitError, ValueError):
    """Malformed input (scenario params, JSON payloads, shapes)."""


class NumericalError(MaslovKitError):
    """A numerical precondition failed during computation."""


class RankDeficient(NumericalError):
    pass


class NotLagrangian(NumericalError):
    pass


class DimensionMismatch(NumericalError, ValueError):
    pass


class NotTransversal(NumericalError):
    pass


class DegenerateForm(NumericalError):
    pass


class Undersampled(NumericalError):
    pass


class NotClosed(NumericalError):
    pass


class RetryExhausted(NumericalError):
    pass


class InconsistentOverlap(NumericalError):
    pass
