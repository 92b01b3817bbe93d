"""
Error Types
Exception hierarchy shared by the geometry, potential, engine and CLI layers.

Every error subclasses a builtin (ValueError, RuntimeError, ...) so callers
that only know the builtin still catch it.
"""

from typing import Any, List, Optional


class PotentialError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(PotentialError, ValueError):
    """A point, radius or shape parameter lies outside the admissible domain."""


class NestingError(DomainError):
    """The nested pair o ∈ D ⊂ closure(D) ⊂ G is violated."""


class ExtendedArithmeticError(PotentialError, ArithmeticError):
    """An extended-real operation has no defined value (e.g. +inf - +inf)."""


class SidednessError(PotentialError, ValueError):
    """A one-sided estimate was offered to a slot that needs the other side."""


class CoverError(PotentialError, AssertionError):
    """A covering construction broke its own guarantee."""


class WalkError(PotentialError, RuntimeError):
    """A walk-on-spheres path did not reach the boundary shell."""

    def __init__(self, message: str, start: Optional[Any] = None,
                 trace: Optional[List[Any]] = None):
        super().__init__(message)
        self.start = start
        self.trace = trace or []


class ScenarioError(PotentialError, ValueError):
    """A scenario file does not match the documented schema."""

    def __init__(self, message: str, path: Optional[str] = None,
                 field: Optional[str] = None):
        location = ""
        if path:
            location += f"{path}: "
        if field:
            location += f"[{field}] "
        super().__init__(f"{location}{message}")
        self.path = path
        self.field = field
