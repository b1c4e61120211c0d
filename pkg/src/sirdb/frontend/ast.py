"""Immutable syntax tree for the supported SQL subset.

Nodes are frozen dataclasses, so structural equality is plain ``==``.
Identifiers keep the spelling they were written with; name lookups elsewhere
compare them case-insensitively.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

Value = Union[int, float, str, None]


def same_name(a: Optional[str], b: Optional[str]) -> bool:
    if a is None or b is None:
        return a is b
    return a.casefold() == b.casefold()


@dataclass(frozen=True)
class DataType:
    name: str  # CHAR | INT | REAL
    length: Optional[int] = None

    def __str__(self) -> str:
        return f"{self.name} {self.length}" if self.length is not None else self.name


@dataclass(frozen=True)
class ColumnRef:
    name: str
    qualifier: Optional[str] = None

    def __str__(self) -> str:
        return f"{self.qualifier}.{self.name}" if self.qualifier else self.name

    def matches(self, other: "ColumnRef") -> bool:
        return same_name(self.name, other.name) and same_name(self.qualifier, other.qualifier)


@dataclass(frozen=True)
class Literal:
    value: Value


Operand = Union[ColumnRef, Literal]


@dataclass(frozen=True)
class AttributeClause:
    """One entry of a CREATE TABLE attribute list.

    Without a data type the attribute is inherited.  ``parenthesized`` marks
    the ``(A Char 5)`` foreign-key shorthand.
    """

    column: ColumnRef
    data_type: Optional[DataType] = None
    parenthesized: bool = False

    @property
    def name(self) -> str:
        return self.column.name

    @property
    def inherited(self) -> bool:
        return self.data_type is None


@dataclass(frozen=True)
class JoinClause:
    """``LEFT JOIN right ON (left_col = right_col)``."""

    right: str
    left_col: ColumnRef
    right_col: ColumnRef

    def same_as(self, other: "JoinClause") -> bool:
        if not same_name(self.right, other.right):
            return False
        straight = self.left_col.matches(other.left_col) and self.right_col.matches(other.right_col)
        crossed = self.left_col.matches(other.right_col) and self.right_col.matches(other.left_col)
        return straight or crossed


@dataclass(frozen=True)
class FromClause:
    source: str
    joins: tuple[JoinClause, ...] = ()

    @property
    def sources(self) -> tuple[str, ...]:
        return (self.source,) + tuple(j.right for j in self.joins)


@dataclass(frozen=True)
class ForeignKeyClause:
    columns: tuple[str, ...]
    references: str
    key: tuple[str, ...]


@dataclass(frozen=True)
class Predicate:
    left: Operand
    op: str
    right: Operand


@dataclass(frozen=True)
class Star:
    pass


SelectItem = Union[ColumnRef, Star]


@dataclass(frozen=True)
class Select:
    items: tuple[SelectItem, ...]
    from_: FromClause
    where: tuple[Predicate, ...] = ()


@dataclass(frozen=True)
class CreateTable:
    name: str
    attributes: tuple[AttributeClause, ...]
    ie: Optional[FromClause] = None
    primary_key: tuple[str, ...] = ()
    foreign_keys: tuple[ForeignKeyClause, ...] = ()

    @property
    def is_sir(self) -> bool:
        return any(a.inherited or a.parenthesized for a in self.attributes)


@dataclass(frozen=True)
class CreateView:
    name: str
    select: Select


@dataclass(frozen=True)
class Insert:
    """``columns`` is None for positional ``INSERT INTO R VALUES (...)``."""

    table: str
    columns: Optional[tuple[str, ...]]
    values: tuple[Literal, ...]


@dataclass(frozen=True)
class Assignment:
    column: str
    value: Literal


@dataclass(frozen=True)
class Update:
    table: str
    assignments: tuple[Assignment, ...]
    where: tuple[Predicate, ...] = ()


@dataclass(frozen=True)
class Delete:
    table: str
    where: tuple[Predicate, ...] = ()


@dataclass(frozen=True)
class DropTable:
    name: str


@dataclass(frozen=True)
class DropView:
    name: str


@dataclass(frozen=True)
class AlterTableAddInherited:
    table: str
    attribute: ColumnRef
    ie: Optional[FromClause] = None


@dataclass(frozen=True)
class AlterTableDropInherited:
    table: str
    attribute: ColumnRef


Statement = Union[
    CreateTable,
    CreateView,
    Select,
    Insert,
    Update,
    Delete,
    DropTable,
    DropView,
    AlterTableAddInherited,
    AlterTableDropInherited,
]

DDL = (CreateTable, CreateView, DropTable, DropView, AlterTableAddInherited, AlterTableDropInherited)
DML = (Insert, Update, Delete)
