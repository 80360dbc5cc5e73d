"""Exception hierarchy for the dbmorph library."""

from __future__ import annotations


class DbmorphError(Exception):
    """Base class for all dbmorph errors."""


class ParseError(DbmorphError):
    """Raised on malformed DSL or file input; carries a source position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class SchemaError(DbmorphError):
    """Unknown symbol, arity mismatch, or ill-formed schema/instance data."""


class SafetyError(DbmorphError):
    """A dependency violates a well-formedness condition (unsafe variable, bad head term)."""


class IncompleteInterpretationError(DbmorphError):
    """A function application has no entry in the interpretation and no default."""


class PreconditionError(DbmorphError):
    """An operation was invoked on inputs that violate its stated precondition."""
