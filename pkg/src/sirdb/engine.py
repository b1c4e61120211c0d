"""In-memory execution of routed statements.

Stored tables hold rows as tuples; views keep only their SELECT and are
re-evaluated on every read, so a view always reflects current stored data.
Joins are nested loops.  Comparisons follow SQL three-valued logic: anything
compared with NULL is unknown and the row is dropped.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import (
    AmbiguousColumnError,
    ExecutionError,
    KeyViolationError,
    TypeMismatchError,
    UnknownColumnError,
    UnknownRelationError,
)
from .frontend import ast

NULL_TEXT = "NULL"


@dataclass(frozen=True)
class Column:
    name: str
    source: str
    aliases: frozenset = frozenset()
    data_type: Optional[ast.DataType] = None
    # position of the FROM source the column came from; 0 is the base
    origin: int = 0


@dataclass
class Relation:
    columns: tuple[Column, ...]
    rows: list[tuple] = field(default_factory=list)

    @property
    def labels(self) -> list[str]:
        names = [c.name.casefold() for c in self.columns]
        return [
            f"{c.source}.{c.name}" if names.count(c.name.casefold()) > 1 else c.name
            for c in self.columns
        ]

    def index(self, label: str) -> int:
        folded = [x.casefold() for x in self.labels]
        try:
            return folded.index(label.casefold())
        except ValueError:
            raise UnknownColumnError(f"no column {label}") from None

    def column_values(self, label: str) -> list:
        i = self.index(label)
        return [r[i] for r in self.rows]

    def as_dicts(self) -> list[dict]:
        labels = self.labels
        return [dict(zip(labels, r)) for r in self.rows]

    def pretty(self) -> str:
        labels = self.labels
        cells = [[_show(v) for v in r] for r in self.rows]
        widths = [len(x) for x in labels]
        for r in cells:
            widths = [max(w, len(v)) for w, v in zip(widths, r)]
        fmt = lambda row: " | ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip()
        lines = [fmt(labels), "-+-".join("-" * w for w in widths)]
        lines.extend(fmt(r) for r in cells)
        return "\n".join(lines)


def _show(v) -> str:
    return NULL_TEXT if v is None else str(v)


def left_outer_join(left: Relation, right: Relation, on: tuple[int, int]) -> Relation:
    """Pair every left row with each right row whose key is equal; pad misses with NULLs."""
    li, ri = on
    shift = max((c.origin for c in left.columns), default=-1) + 1
    columns = left.columns + tuple(
        Column(c.name, c.source, c.aliases, c.data_type, c.origin + shift) for c in right.columns
    )
    pad = (None,) * len(right.columns)
    rows = []
    for lrow in left.rows:
        matched = False
        key = lrow[li]
        if key is not None:
            for rrow in right.rows:
                if rrow[ri] is not None and _compare(key, "=", rrow[ri]):
                    rows.append(lrow + rrow)
                    matched = True
        if not matched:
            rows.append(lrow + pad)
    return Relation(columns, rows)


_OPS = {
    "=": operator.eq,
    "<>": operator.ne,
    "<": operator.lt,
    ">": operator.gt,
    "<=": operator.le,
    ">=": operator.ge,
}


def _compare(a, op: str, b) -> Optional[bool]:
    if a is None or b is None:
        return None
    if isinstance(a, str) != isinstance(b, str):
        raise TypeMismatchError(f"cannot compare {a!r} with {b!r}")
    return _OPS[op](a, b)


def coerce(value, data_type: Optional[ast.DataType], column: str = "?"):
    """Check ``value`` against ``data_type``; INT widens to REAL."""
    if value is None or data_type is None:
        return value
    kind = data_type.name
    if kind == "CHAR":
        if not isinstance(value, str):
            raise TypeMismatchError(f"{column}: expected text, got {value!r}")
        if data_type.length is not None and len(value) > data_type.length:
            raise TypeMismatchError(f"{column}: {value!r} is longer than CHAR {data_type.length}")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeMismatchError(f"{column}: expected a number, got {value!r}")
    if kind == "INT":
        if isinstance(value, float):
            raise TypeMismatchError(f"{column}: expected an integer, got {value!r}")
        return value
    return float(value)


@dataclass
class Table:
    name: str
    columns: tuple[tuple[str, ast.DataType], ...]
    primary_key: tuple[int, ...] = ()
    rows: list[tuple] = field(default_factory=list)

    def position(self, name: str) -> int:
        qual, _, bare = name.rpartition(".")
        if qual and ast.same_name(qual, self.name):
            name = bare
        for i, (n, _) in enumerate(self.columns):
            if ast.same_name(n, name):
                return i
        raise UnknownColumnError(f"table {self.name} has no column {name}")

    def check_keys(self, rows: Sequence[tuple]) -> None:
        if not self.primary_key:
            return
        seen = set()
        for r in rows:
            key = tuple(r[i] for i in self.primary_key)
            if any(k is None for k in key):
                raise KeyViolationError(f"{self.name}: primary key may not be NULL")
            if key in seen:
                raise KeyViolationError(f"{self.name}: duplicate primary key {key}")
            seen.add(key)


class Database:
    """A store of tables and views executing routed statements."""

    def __init__(self):
        self.tables: dict[str, Table] = {}
        self.views: dict[str, ast.Select] = {}
        self._view_names: dict[str, str] = {}

    def has(self, name: str) -> bool:
        return name.casefold() in self.tables or name.casefold() in self.views

    def table(self, name: str) -> Table:
        try:
            return self.tables[name.casefold()]
        except KeyError:
            raise UnknownRelationError(f"no stored table {name}") from None

    def execute(self, stmt: ast.Statement):
        """Run one statement: a Relation for SELECT, a row count for DML, None for DDL."""
        if isinstance(stmt, ast.Select):
            return self.select(stmt)
        if isinstance(stmt, ast.Insert):
            return self.insert(stmt)
        if isinstance(stmt, ast.Update):
            return self.update(stmt)
        if isinstance(stmt, ast.Delete):
            return self.delete(stmt)
        if isinstance(stmt, ast.CreateTable):
            return self.create_table(stmt)
        if isinstance(stmt, ast.CreateView):
            return self.create_view(stmt)
        if isinstance(stmt, ast.DropTable):
            self.table(stmt.name)
            del self.tables[stmt.name.casefold()]
            return None
        if isinstance(stmt, ast.DropView):
            if stmt.name.casefold() not in self.views:
                raise UnknownRelationError(f"no view {stmt.name}")
            del self.views[stmt.name.casefold()]
            del self._view_names[stmt.name.casefold()]
            return None
        raise ExecutionError(f"the engine cannot execute {type(stmt).__name__}; route it first")

    # DDL -----------------------------------------------------------------

    def create_table(self, stmt: ast.CreateTable) -> None:
        if stmt.is_sir or stmt.ie is not None:
            raise ExecutionError(f"{stmt.name} still carries SIR syntax; route it first")
        if self.has(stmt.name):
            raise ExecutionError(f"relation {stmt.name} already exists")
        cols = tuple((a.name, a.data_type) for a in stmt.attributes)
        table = Table(stmt.name, cols)
        table.primary_key = tuple(table.position(k) for k in stmt.primary_key)
        self.tables[stmt.name.casefold()] = table

    def create_view(self, stmt: ast.CreateView) -> None:
        if self.has(stmt.name):
            raise ExecutionError(f"relation {stmt.name} already exists")
        self.select(stmt.select)  # binds every name now rather than at first use
        self.views[stmt.name.casefold()] = stmt.select
        self._view_names[stmt.name.casefold()] = stmt.name

    # reads ---------------------------------------------------------------

    def scan(self, name: str) -> Relation:
        key = name.casefold()
        if key in self.tables:
            t = self.tables[key]
            alias = frozenset({t.name.casefold()})
            cols = tuple(Column(n, t.name, alias, dt) for n, dt in t.columns)
            return Relation(cols, list(t.rows))
        if key in self.views:
            view_name = self._view_names[key]
            inner = self.select(self.views[key])
            qualified = [lbl != c.name for lbl, c in zip(inner.labels, inner.columns)]
            cols = []
            for c, q in zip(inner.columns, qualified):
                if q:
                    cols.append(Column(c.name, c.source, frozenset({key, c.source.casefold()}), c.data_type))
                else:
                    cols.append(Column(c.name, view_name, frozenset({key}), c.data_type))
            return Relation(tuple(cols), inner.rows)
        raise UnknownRelationError(f"unknown relation {name}")

    def select(self, stmt: ast.Select) -> Relation:
        rel = self.scan(stmt.from_.source)
        for j in stmt.from_.joins:
            right = self.scan(j.right)
            rel = left_outer_join(rel, right, _join_positions(rel, right, j))
        if stmt.where:
            test = _predicate(rel.columns, stmt.where)
            rel = Relation(rel.columns, [r for r in rel.rows if test(r)])
        if any(isinstance(i, ast.Star) for i in stmt.items) and len(stmt.items) == 1:
            return rel
        idx = []
        for item in stmt.items:
            if isinstance(item, ast.Star):
                idx.extend(range(len(rel.columns)))
            else:
                idx.append(resolve_column(rel.columns, item))
        return Relation(tuple(rel.columns[i] for i in idx), [tuple(r[i] for i in idx) for r in rel.rows])

    # writes --------------------------------------------------------------

    def insert(self, stmt: ast.Insert) -> int:
        t = self.table(stmt.table)
        row = [None] * len(t.columns)
        if stmt.columns is None:
            if len(stmt.values) != len(t.columns):
                raise ExecutionError(f"{t.name} has {len(t.columns)} columns, got {len(stmt.values)} values")
            targets = range(len(t.columns))
        else:
            targets = [t.position(c) for c in stmt.columns]
        for i, lit in zip(targets, stmt.values):
            row[i] = coerce(lit.value, t.columns[i][1], t.columns[i][0])
        new_rows = t.rows + [tuple(row)]
        t.check_keys(new_rows)
        t.rows = new_rows
        return 1

    def update(self, stmt: ast.Update) -> int:
        t = self.table(stmt.table)
        rel = self.scan(t.name)
        test = _predicate(rel.columns, stmt.where)
        sets = [(t.position(a.column), a.value.value) for a in stmt.assignments]
        sets = [(i, coerce(v, t.columns[i][1], t.columns[i][0])) for i, v in sets]
        new_rows, count = [], 0
        for r in t.rows:
            if test(r):
                r = list(r)
                for i, v in sets:
                    r[i] = v
                r = tuple(r)
                count += 1
            new_rows.append(r)
        t.check_keys(new_rows)
        t.rows = new_rows
        return count

    def delete(self, stmt: ast.Delete) -> int:
        t = self.table(stmt.table)
        test = _predicate(self.scan(t.name).columns, stmt.where)
        keep = [r for r in t.rows if not test(r)]
        count = len(t.rows) - len(keep)
        t.rows = keep
        return count

    def load_rows(self, name: str, rows: Iterable[Sequence]) -> int:
        """Bulk insert already-typed rows into a stored table."""
        t = self.table(name)
        typed = [
            tuple(coerce(v, dt, n) for v, (n, dt) in zip(r, t.columns)) for r in rows
        ]
        for r in typed:
            if len(r) != len(t.columns):
                raise ExecutionError(f"{t.name}: row {r} has the wrong arity")
        t.check_keys(t.rows + typed)
        t.rows = t.rows + typed
        return len(typed)


def resolve_column(columns: Sequence[Column], ref: ast.ColumnRef) -> int:
    """Index of ``ref`` in ``columns``; unqualified ties go to the base source."""
    hits = [
        i for i, c in enumerate(columns)
        if ast.same_name(c.name, ref.name)
        and (ref.qualifier is None or ref.qualifier.casefold() in c.aliases)
    ]
    if len(hits) > 1 and ref.qualifier is None:
        base = [i for i in hits if columns[i].origin == 0]
        if len(base) == 1:
            hits = base
    if not hits:
        raise UnknownColumnError(f"unknown column {ref}")
    if len(hits) > 1:
        raise AmbiguousColumnError(f"column {ref} is ambiguous")
    return hits[0]


def _try_resolve(columns, ref: ast.ColumnRef) -> Optional[int]:
    try:
        return resolve_column(columns, ref)
    except UnknownColumnError:
        return None


def _join_positions(left: Relation, right: Relation, j: ast.JoinClause) -> tuple[int, int]:
    for a, b in ((j.left_col, j.right_col), (j.right_col, j.left_col)):
        li, ri = _try_resolve(left.columns, a), _try_resolve(right.columns, b)
        if li is not None and ri is not None:
            return li, ri
    raise UnknownColumnError(f"join condition {j.left_col} = {j.right_col} does not match its sources")


def _predicate(columns: Sequence[Column], preds: tuple[ast.Predicate, ...]):
    """Compile a conjunction into a row test.

    A bare word that names no column, compared with a column, is taken as a
    text value (``S# = S1``).
    """
    getters = []
    for p in preds:
        left = _operand(columns, p.left)
        right = _operand(columns, p.right)
        if left is None and right is None:
            raise UnknownColumnError(f"neither {p.left} nor {p.right} is a column")
        if left is None:
            left = _constant(p.left.name)
        if right is None:
            right = _constant(p.right.name)
        getters.append((left, p.op, right))

    def test(row) -> bool:
        return all(_compare(lf(row), op, rf(row)) is True for lf, op, rf in getters)

    return test


def _constant(value):
    return lambda row: value


def _operand(columns, operand: ast.Operand):
    if isinstance(operand, ast.Literal):
        return _constant(operand.value)
    i = _try_resolve(columns, operand)
    if i is None:
        if operand.qualifier is not None:
            raise UnknownColumnError(f"unknown column {operand}")
        return None
    return lambda row: row[i]
