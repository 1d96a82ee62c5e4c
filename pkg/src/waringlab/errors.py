"""Exception types shared across the package."""

from __future__ import annotations


class WaringlabError(Exception):
    """Base class for all package errors."""


class PreconditionError(WaringlabError, ValueError):
    """An operation was called with inputs outside its documented domain."""


class CapacityError(WaringlabError, ValueError):
    """Input exceeds a documented desk-scale limit (modulus cap, subset cap, ...)."""


class PrecisionError(WaringlabError, RuntimeError):
    """A requested enclosure width is unreachable within the documented limits.

    Carries the best enclosure achieved so a caller can still inspect it.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class EmptyBohrSetError(WaringlabError, RuntimeError):
    """Bohr set came out empty; callers may retry with a larger width."""
