"""Shared exception types."""


class DegenerateAlphabetError(ValueError):
    """Raised when a Kolakoski pair has p == q (one-letter alphabet)."""


class ResourceCapError(RuntimeError):
    """Raised when a requested computation exceeds a documented size cap."""
