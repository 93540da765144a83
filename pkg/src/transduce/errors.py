"""Exception types raised by the toolkit."""


class TransducerError(Exception):
    """Base class for all toolkit errors."""


class InvalidChain(TransducerError, ValueError):
    """A chain or network violates a structural invariant."""


class InvalidRates(InvalidChain):
    """A rate argument is negative, zero where it must be positive, or non-finite."""


class DegenerateChain(TransducerError, ZeroDivisionError):
    """A continued fraction hit an exactly zero partial denominator.

    Attributes
    ----------
    index : int
        Zero-based mode index whose dressed inverse susceptibility vanished.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DegenerateNetwork(DegenerateChain):
    """Ladder analogue of :class:`DegenerateChain`."""


class ZeroLinewidth(TransducerError, ValueError):
    """Cooperativity requested for a mode pair with a zero total linewidth."""


class SingularSystem(TransducerError, ArithmeticError):
    """The frequency-domain dynamical matrix is singular at the requested frequency."""

    def __init__(self, message, modes=()):
        super().__init__(message)
        self.modes = tuple(modes)


class ConfigError(InvalidChain):
    """A configuration document failed validation.

    Attributes
    ----------
    field : str
        Dotted path of the offending field (empty for document-level problems).
    """

    def __init__(self, message, field=""):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
