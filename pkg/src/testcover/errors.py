"""Exception hierarchy shared by every module of the package."""


class CoverError(Exception):
    """Base class for all errors raised by :mod:`testcover`."""


class InvalidArgument(CoverError, ValueError):
    pass


class UnvalidatedInstance(CoverError, ValueError):
    """A solver was handed an instance that never passed :func:`validate`."""


class ResourceLimitError(CoverError):
    """A brute-force search would exceed its configured cap."""

    def __init__(self, message: str, size: int | None = None):
        super().__init__(message)
        self.size = size


class SearchTimeout(CoverError):
    pass


class InconsistencyError(CoverError):
    """Raised when an input that claims to be a test cover behaves like it is not."""


class InvariantViolation(CoverError, AssertionError):
    """An internal structural guarantee (laminarity, out-degree, ...) failed."""


class ParseError(CoverError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
