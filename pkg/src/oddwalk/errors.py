"""Shared exception types.

Every error raised by the library derives from OddwalkError so callers (and
the CLI) can distinguish domain failures from programming errors.
"""


class OddwalkError(Exception):
    """Base class for all library errors."""


class ParseError(OddwalkError):
    """Malformed input document (edge list, hom file, walk literal, ...)."""


class InputError(OddwalkError):
    """An argument violates a stated precondition of the operation."""


class MoveError(OddwalkError):
    """A walk move is not applicable at the requested position."""


class RefusalError(OddwalkError):
    """The operation declines the input (out of supported range, wrong shape)."""


class HypothesisError(OddwalkError):
    """A mathematical hypothesis the operation relies on failed at runtime.

    Instances carry a `certificate` attribute with enough data to reproduce
    the failure (e.g. two conflicting walks).
    """

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class ViolationError(OddwalkError):
    """An internal guarantee was violated; carries the offending witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ConstructionError(OddwalkError):
    """A derived object (homomorphism, cycle, ...) failed validation."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = violations or []


class SearchFailure(OddwalkError):
    """An existence search came up empty; carries summary statistics."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats or {}
