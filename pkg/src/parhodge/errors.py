"""Exception hierarchy.  Every contract violation raised by the engine is a
:class:`ParhodgeError`; the CLI maps these to exit code 1."""
from __future__ import annotations


class ParhodgeError(Exception):
    """Base class for all engine errors."""


class DivisionByZero(ParhodgeError, ZeroDivisionError):
    pass


class CtxMismatch(ParhodgeError):
    pass


class PrecisionExhausted(ParhodgeError):
    pass


class SupportViolation(ParhodgeError):
    def __init__(self, message: str, exponent: int | None = None, entry=None):
        super().__init__(message)
        self.exponent = exponent
        self.entry = entry


class MembershipViolation(ParhodgeError):
    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class EquivarianceViolation(ParhodgeError):
    def __init__(self, message: str, violation=None):
        super().__init__(message)
        self.violation = violation


class WildRamification(ParhodgeError):
    pass


class PoleEscape(ParhodgeError):
    pass


class SingularGauge(ParhodgeError):
    pass


class NonDiagonalInput(ParhodgeError):
    pass


class NonTrivialRationalPart(ParhodgeError):
    def __init__(self, message: str, tau=None):
        super().__init__(message)
        self.tau = tau


class NonRationalInput(ParhodgeError):
    pass


class RationalResidueInHiggs(ParhodgeError):
    pass


class DepthViolation(ParhodgeError):
    pass


class ZeroInput(ParhodgeError):
    pass


class ExtensionTooLarge(ParhodgeError):
    """The splitting field needed exceeds the configured degree cap."""


class InvalidField(ParhodgeError):
    pass


class NotTame(ParhodgeError):
    """A weight's denominator is divisible by p."""
