"""Exception hierarchy.

Configuration problems (bad input, bad indices, parse failures) and numerical
problems (too few samples, failed evaluation) are kept apart so the command
line can map them onto distinct exit codes.
"""


class RearrangementError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(RearrangementError, ValueError):
    """Invalid configuration: wrong dimensions, missing seed, bad options."""


class InvalidIndexError(ConfigurationError):
    """A multi-index is nonpositive or out of its admissible range."""


class ParseError(ConfigurationError):
    """Expression text could not be parsed.

    ``position`` is the 0-based character offset of the offending token.
    """

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class RangeError(RearrangementError, ValueError):
    """An argument lies outside the interval on which a function is defined."""


class NumericalError(RearrangementError):
    """Base class for failures that depend on the data rather than the setup."""


class InsufficientSamplesError(NumericalError):
    """Fewer sample points than the construction needs."""


class EvaluationError(NumericalError, ArithmeticError):
    """A scalar field could not be evaluated at some point.

    ``point`` holds the coordinates of the first offending point when known.
    """

    def __init__(self, message, point=None):
        self.point = None if point is None else tuple(float(v) for v in point)
        if self.point is not None:
            message = f"{message} at x={self.point}"
        super().__init__(message)
