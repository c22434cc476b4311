"""Exception types shared across the package."""


class DegenerateInputError(ValueError):
    """Input carries no usable information (all-zero, constant, zero variance)."""


class NumericalFailureError(RuntimeError):
    """A linear solve or iteration failed numerically (e.g. singular normal equations)."""


class SignalParseError(ValueError):
    """A delimited signal file could not be parsed.

    ``line`` is the 1-based line number of the first offending row, when known.
    """

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line
