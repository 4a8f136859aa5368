"""Exception hierarchy shared by the coopnet modules."""


class NetworkError(ValueError):
    """Base class for malformed or unusable network descriptions."""


class NetworkSyntaxError(NetworkError):
    """The network document could not be parsed.

    ``line`` and ``column`` are 1-based when known.
    """

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class NetworkReferenceError(NetworkError):
    """An edge references an unknown node or an antenna out of range."""


class ZeroCoefficientError(NetworkError):
    """An edge carries an explicit zero fading coefficient."""


class MissingCoefficientError(NetworkError):
    """An operation needs every edge coefficient but some are absent."""


class NetworkValidationError(NetworkError):
    """Raised by :func:`coopnet.estimators.check_network`; carries the report."""

    def __init__(self, report):
        lines = "; ".join(f"{v.code}: {v.message}" for v in report.violations)
        super().__init__(f"invalid network: {lines}")
        self.report = report


class CeilingExceededError(RuntimeError):
    """Brute-force cut enumeration would exceed the configured ceiling."""


class LiftError(RuntimeError):
    """No certifying finite-field assignment was found."""


class NoCodeError(ValueError):
    """The end-to-end matrix has rank zero, so no code exists."""


class InsufficientDataError(ValueError):
    """Too few usable outage points to fit a diversity slope."""
