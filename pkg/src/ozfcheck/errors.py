"""Exception hierarchy for ozfcheck."""


class OZFError(Exception):
    """Base class for all errors raised by ozfcheck."""


class DegeneratePlant(OZFError, ValueError):
    """Denominator of a transfer function vanishes at the requested frequency."""


class ZeroResponse(OZFError, ValueError):
    """Frequency response is zero, so its phase is undefined."""


class EmptyInterval(OZFError, ValueError):
    pass


class OutOfRange(OZFError, ValueError):
    pass


class BracketInvalid(OZFError, ValueError):
    """Criterion does not fire at the upper end or fires at the lower end."""


class PhaseSectorViolation(OZFError, ValueError):
    pass


class IneqViolation(OZFError, ValueError):
    pass


class ParityError(OZFError, ValueError):
    pass


class NonpositiveDenominator(OZFError, ArithmeticError):
    pass


class EquivalenceMismatch(OZFError, AssertionError):
    """A numerically computed supremum disagrees with its closed form.

    This indicates a bug in the implementation rather than bad input.
    """


class NotBiproper(OZFError, ValueError):
    pass


class ImproperTransferFunction(OZFError, ValueError):
    pass


class WindowTooShort(OZFError, ValueError):
    pass


class AlgebraicLoop(OZFError, ValueError):
    pass


class AlgebraicLoop(OZFError, ValueError):
    """A delay-free plant with feedthrough closes the loop instantaneously."""
