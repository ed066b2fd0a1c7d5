"""Exception types shared across the package."""

from __future__ import annotations


class CQIError(Exception):
    """Base class for every error raised by this package."""


class NonPrime(CQIError, ValueError):
    pass


class OutOfRange(CQIError, ValueError):
    pass


class CapExceeded(CQIError, RuntimeError):
    """An enumeration would exceed its configured size cap."""

    def __init__(self, what: str, size: int, cap: int) -> None:
        super().__init__(f"{what}: size {size} exceeds cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap


class ZeroProfile(CQIError, ValueError):
    pass


class NotInY(CQIError, ValueError):
    pass


class NotAPermutation(CQIError, ValueError):
    pass


class TooLarge(CQIError, ValueError):
    pass


class ParseError(CQIError, ValueError):
    """Malformed group spec text; ``position`` is a 0-based column."""

    def __init__(self, message: str, text: str, position: int) -> None:
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position
