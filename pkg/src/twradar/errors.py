"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`TwrError`,
so callers (the CLI in particular) can separate user-facing failures from bugs.
"""


class TwrError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(TwrError, ValueError):
    pass


class OutOfWindowError(TwrError, ValueError):
    """A time instant falls outside the chirp or de-chirp window."""


class OutOfRangeError(TwrError, ValueError):
    pass


class InvalidModelError(TwrError, ValueError):
    pass


class InvalidConfigError(TwrError, ValueError):
    pass


class TargetBeyondWindowError(TwrError, ValueError):
    """Echo delay is not shorter than the chirp, so no de-chirp overlap exists."""


class SingularityError(TwrError, ZeroDivisionError):
    pass


class NoMoverDetected(TwrError):
    pass


class TraceFormatError(TwrError, ValueError):
    pass


class ConfigParseError(TwrError, ValueError):
    """Scene file problem; ``lineno`` points at the offending line when known."""

    def __init__(self, path, message, lineno=None):
        self.path = str(path)
        self.lineno = lineno
        where = f"{self.path}:{lineno}" if lineno is not None else self.path
        super().__init__(f"{where}: {message}")
