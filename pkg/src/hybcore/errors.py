"""Exception hierarchy shared by all layers."""

from __future__ import annotations


class HybError(Exception):
    """Base class for every error raised by hybcore."""


class FrontendError(HybError):
    """Errors that stop a program before it runs (CLI exit code 1)."""


class ParseError(FrontendError):
    def __init__(self, message: str, line: int, col: int, expected: frozenset[str] = frozenset()):
        self.line = line
        self.col = col
        self.expected = frozenset(expected)
        detail = f"{line}:{col}: {message}"
        if self.expected:
            detail += " (expected one of: " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(detail)
        self.message = message


class TypeCheckError(FrontendError):
    pass


class UnboundVariable(TypeCheckError):
    pass


class UnknownSymbol(TypeCheckError):
    pass


class ArgumentTypeMismatch(TypeCheckError):
    pass


class IllTyped(TypeCheckError):
    """Any other rule failure: non-Bool guard, branch mismatch, pattern on a non-pair."""


class RuntimeFault(HybError):
    """A partial signature operation was applied outside its domain (CLI exit code 2)."""


class ShapeViolation(HybError):
    """An iterated trajectory carried a continue-tag somewhere other than a closed endpoint."""
