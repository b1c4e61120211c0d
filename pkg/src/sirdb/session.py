"""A SIR-layer session: routes each statement, executes it, tracks the catalog."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .catalog import Catalog, SirSchema
from .compiler import STANDARD, stored_table, view_definition
from .engine import Database, Relation
from .errors import ExecutionError, SirError, TypeMismatchError
from .frontend import ast, parse_statement, split_script
from .router import RoutedStatement, route

NULL_MARK = r"\N"


@dataclass(frozen=True)
class SessionConfig:
    parentheses_mode: str = STANDARD
    catalog_path: Optional[str] = None
    echo_routing: bool = False
    fixture: Optional[str] = None


@dataclass(frozen=True)
class Outcome:
    routed: RoutedStatement
    result: Union[Relation, int, None]


class Session:
    def __init__(self, catalog: Optional[Catalog] = None, mode: str = STANDARD):
        self.mode = mode
        self.catalog = Catalog()
        self.db = Database()
        if catalog is not None:
            self.materialize(catalog)

    def materialize(self, catalog: Catalog) -> None:
        """Create empty internal objects for every relation of ``catalog``."""
        for schema in catalog:
            self.adopt(schema)

    def adopt(self, schema: SirSchema) -> None:
        """Register an already-compiled schema and create its (empty) objects."""
        catalog = self.catalog.register(schema)
        if schema.kind == "plain":
            attrs = tuple(ast.AttributeClause(a.ref, a.data_type) for a in schema.attributes)
            self.db.execute(ast.CreateTable(schema.name, attrs, None, schema.primary_key))
        elif schema.kind == "sir":
            self.db.execute(stored_table(schema))
            self.db.execute(view_definition(schema, catalog))
        else:
            self.db.execute(ast.CreateView(schema.name, schema.definition))
        self.catalog = catalog

    def run(self, stmt: ast.Statement) -> Outcome:
        routed = route(stmt, self.catalog, self.mode)
        result = None
        for s in routed.rewritten:
            result = self.db.execute(s)
        self.catalog = routed.catalog
        return Outcome(routed, result)

    def execute(self, source: str) -> list[Outcome]:
        """Run every statement of ``source``; stops at the first error."""
        return [self.run(parse_statement(text)) for text in split_script(source)]

    def query(self, source: str) -> Relation:
        stmt = parse_statement(source)
        if not isinstance(stmt, ast.Select):
            raise ExecutionError("query() expects a SELECT")
        return self.run(stmt).result

    def load_tsv(self, relation: str, path: Union[str, os.PathLike]) -> int:
        """Insert rows from a tab-separated file through the SIR layer.

        The first line names the columns; ``\\N`` is NULL.
        """
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE))
        if not rows:
            return 0
        header, body = rows[0], [r for r in rows[1:] if r]
        schema = self.catalog.lookup(relation)
        if schema is None:
            raise SirError(f"unknown relation {relation}")
        types = []
        for col in header:
            attr = schema.attribute(col)
            if attr is None:
                raise SirError(f"{Path(path).name}: {relation} has no column {col}")
            types.append(attr.data_type)
        count = 0
        for lineno, raw in enumerate(body, start=2):
            if len(raw) != len(header):
                raise SirError(f"{Path(path).name}:{lineno}: expected {len(header)} fields, got {len(raw)}")
            values = tuple(ast.Literal(_parse_field(v, t, col)) for v, t, col in zip(raw, types, header))
            count += self.run(ast.Insert(relation, tuple(header), values)).result
        return count


def _parse_field(text: str, data_type: Optional[ast.DataType], column: str):
    if text == NULL_MARK:
        return None
    if data_type is None or data_type.name == "CHAR":
        return text
    try:
        return int(text) if data_type.name == "INT" else float(text)
    except ValueError:
        raise TypeMismatchError(f"{column}: {text!r} is not a {data_type.name}") from None
