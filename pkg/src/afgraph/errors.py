"""Exception hierarchy shared across the package.

Each class maps to one CLI exit code (see cli.EXIT_CODES).
"""
from __future__ import annotations


class AfGraphError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(AfGraphError):
    """A document failed to parse.  Carries a JSON-pointer to the offending node."""

    def __init__(self, pointer: str, message: str):
        self.pointer = pointer
        self.message = message
        super().__init__(f"schema error at {pointer}: {message}")


class InvalidDiagramError(AfGraphError):
    """A diagram violates a structural axiom.  Carries the validation report."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"invalid diagram: {report.summary()}")


class PreconditionError(AfGraphError):
    """An operation was called on input that violates its stated precondition."""


class DepthError(AfGraphError):
    """A finite diagram cannot supply the requested number of levels."""
