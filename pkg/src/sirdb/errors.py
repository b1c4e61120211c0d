"""Exception hierarchy shared by every layer of sirdb."""

from __future__ import annotations


class SirError(Exception):
    """Base class for all sirdb errors."""


class SqlSyntaxError(SirError):
    def __init__(self, message: str, line: int, column: int, expected: tuple[str, ...] = ()):
        self.line = line
        self.column = column
        self.expected = expected
        hint = f" (expected {' or '.join(expected)})" if expected else ""
        super().__init__(f"line {line}, column {column}: {message}{hint}")
        self.message = message


class CatalogError(SirError):
    pass


class DuplicateNameError(CatalogError):
    pass


class DanglingReferenceError(CatalogError):
    pass


class UnknownRelationError(CatalogError):
    pass


class MalformedCatalogError(CatalogError):
    pass


class CatalogVersionError(CatalogError):
    pass


class CompileError(SirError):
    pass


class RoutingError(SirError):
    pass


class InheritedAttributeWriteError(RoutingError):
    """A write statement named an inherited attribute."""


class ExecutionError(SirError):
    pass


class KeyViolationError(ExecutionError):
    pass


class TypeMismatchError(ExecutionError):
    pass


class UnknownColumnError(ExecutionError):
    pass


class AmbiguousColumnError(ExecutionError):
    pass
