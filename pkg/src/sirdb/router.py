"""SIR-layer request routing.

Reads of a SIR go to its view, writes go to its hidden stored relation and
may touch stored attributes only.  DDL is compiled and folded into the
catalog, so ``route`` returns the evolved catalog alongside the rewritten
statements.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import compiler
from .catalog import Catalog, SirSchema
from .errors import (
    DuplicateNameError,
    InheritedAttributeWriteError,
    RoutingError,
    SirError,
    UnknownRelationError,
)
from .frontend import ast

VIEW = "view"
STORED = "stored"
PLAIN = "plain"


@dataclass(frozen=True)
class RoutedStatement:
    original: ast.Statement
    rewritten: tuple[ast.Statement, ...]
    target_kind: str
    catalog: Catalog
    notes: tuple[str, ...] = field(default=())


def _where_columns(preds: tuple[ast.Predicate, ...]):
    for p in preds:
        for side in (p.left, p.right):
            if isinstance(side, ast.ColumnRef):
                yield side


def _check_sources(select: ast.Select, catalog: Catalog) -> list[str]:
    notes = []
    for src in select.from_.sources:
        res = catalog.resolve(src)
        if res.schema.is_sir:
            notes.append(f"{src} -> view {res.object_name}")
        elif res.hidden:
            notes.append(f"{src} is the hidden stored relation of {catalog.owner_of_hidden(src).name}")
    return notes


def _route_write(stmt, catalog: Catalog) -> RoutedStatement:
    name = stmt.table
    schema = catalog.get(name)
    if schema is None:
        if catalog.owner_of_hidden(name) is not None:
            owner = catalog.owner_of_hidden(name)
            raise RoutingError(f"{name} is the hidden stored relation of {owner.name}; write to {owner.name}")
        raise UnknownRelationError(f"unknown relation {name}")
    if schema.kind == "view":
        raise RoutingError(f"{schema.name} is a view and cannot be written")
    if schema.kind == "plain":
        return RoutedStatement(stmt, (stmt,), PLAIN, catalog)

    hidden = schema.hidden_name

    def check(col: str) -> str:
        """The bare stored column ``col`` writes to; anything else is refused."""
        qual, _, bare = col.rpartition(".")
        if qual and (ast.same_name(qual, schema.name) or ast.same_name(qual, hidden)):
            col = bare
        attr = schema.attribute(col)
        if attr is None:
            if any(ast.same_name(a.name, col) for a in schema.attributes):
                raise RoutingError(f"column {col} of {schema.name} is ambiguous")
            raise RoutingError(f"{schema.name} has no attribute {col}")
        if not attr.stored:
            raise InheritedAttributeWriteError(
                f"{attr.display} is inherited from {attr.source}; only stored attributes of {schema.name} can be written"
            )
        return attr.name

    if isinstance(stmt, ast.Insert):
        if stmt.columns is None:
            n = len(schema.stored_attributes)
            if len(stmt.values) != n:
                raise RoutingError(f"{schema.name} has {n} stored attributes, got {len(stmt.values)} values")
        columns = None if stmt.columns is None else tuple(check(c) for c in stmt.columns)
        rewritten = ast.Insert(hidden, columns, stmt.values)
    else:
        if isinstance(stmt, ast.Update):
            assignments = tuple(ast.Assignment(check(a.column), a.value) for a in stmt.assignments)
        for ref in _where_columns(stmt.where):
            if ref.qualifier and not (ast.same_name(ref.qualifier, schema.name) or ast.same_name(ref.qualifier, hidden)):
                raise RoutingError(f"{ref}: writes to {schema.name} can only filter on its own stored attributes")
            inherited = [a for a in schema.inherited_attributes if ast.same_name(a.name, ref.name)]
            if inherited:
                raise RoutingError(
                    f"{inherited[0].display} is inherited; filter writes to {schema.name} on stored attributes"
                )
        where = tuple(_requalify(p, schema.name, hidden) for p in stmt.where)
        if isinstance(stmt, ast.Update):
            rewritten = ast.Update(hidden, assignments, where)
        else:
            rewritten = ast.Delete(hidden, where)
    return RoutedStatement(stmt, (rewritten,), STORED, catalog, (f"{name} -> stored {hidden}",))


def _requalify(p: ast.Predicate, name: str, hidden: str) -> ast.Predicate:
    def fix(o):
        if isinstance(o, ast.ColumnRef) and ast.same_name(o.qualifier, name):
            return ast.ColumnRef(o.name, hidden)
        return o
    return ast.Predicate(fix(p.left), p.op, fix(p.right))


def route(stmt: ast.Statement, catalog: Catalog, mode: str = compiler.STANDARD) -> RoutedStatement:
    """Rewrite ``stmt`` against internal objects; DDL also yields the next catalog."""
    if isinstance(stmt, ast.Select):
        notes = _check_sources(stmt, catalog)
        kind = VIEW if any("-> view" in n for n in notes) else PLAIN
        return RoutedStatement(stmt, (stmt,), kind, catalog, tuple(notes))

    if isinstance(stmt, (ast.Insert, ast.Update, ast.Delete)):
        return _route_write(stmt, catalog)

    if isinstance(stmt, ast.CreateTable):
        _check_free(stmt.name, catalog)
        compiled = compiler.compile_create(stmt, catalog, mode)
        new_catalog = catalog.register(compiled.schema)
        if isinstance(compiled, compiler.CompiledSir):
            notes = (f"SIR {stmt.name} -> stored {compiled.stored_ddl.name} + view {stmt.name}",)
            return RoutedStatement(stmt, compiled.statements, VIEW, new_catalog, notes)
        return RoutedStatement(stmt, compiled.statements, PLAIN, new_catalog)

    if isinstance(stmt, ast.CreateView):
        _check_free(stmt.name, catalog)
        _check_sources(stmt.select, catalog)
        schema = compiler.compile_view(stmt, catalog)
        return RoutedStatement(stmt, (stmt,), VIEW, catalog.register(schema))

    if isinstance(stmt, ast.DropTable):
        schema = _existing(stmt.name, catalog)
        if schema.kind == "view":
            raise RoutingError(f"{schema.name} is a view; use DROP VIEW")
        new_catalog = catalog.remove(schema.name)
        if schema.is_sir:
            rewritten = (ast.DropView(schema.name), ast.DropTable(schema.hidden_name))
            return RoutedStatement(stmt, rewritten, VIEW, new_catalog,
                                   (f"SIR {schema.name} -> drop view {schema.name}, table {schema.hidden_name}",))
        return RoutedStatement(stmt, (stmt,), PLAIN, new_catalog)

    if isinstance(stmt, ast.DropView):
        schema = _existing(stmt.name, catalog)
        if schema.kind != "view":
            raise RoutingError(f"{schema.name} is not a view; use DROP TABLE")
        return RoutedStatement(stmt, (stmt,), VIEW, catalog.remove(schema.name))

    if isinstance(stmt, (ast.AlterTableAddInherited, ast.AlterTableDropInherited)):
        schema = _existing(stmt.table, catalog)
        if schema.kind == "view":
            raise RoutingError(f"{schema.name} is a view; alter it by redefining it")
        dependents = catalog.dependents_of(schema.name)
        if dependents:
            raise RoutingError(f"cannot alter {schema.name}: {', '.join(dependents)} depend on it")
        if isinstance(stmt, ast.AlterTableAddInherited):
            compiled = compiler.add_inherited(schema, stmt, catalog)
        else:
            compiled = compiler.drop_inherited(schema, stmt, catalog)
        new_catalog = catalog.replace(compiled.schema)
        rewritten = (ast.DropView(schema.name), compiled.view_ddl)
        return RoutedStatement(stmt, rewritten, VIEW, new_catalog,
                               (f"view {schema.name} redefined; stored {schema.hidden_name} untouched",))

    raise RoutingError(f"cannot route {type(stmt).__name__}")


def _existing(name: str, catalog: Catalog) -> SirSchema:
    schema = catalog.get(name)
    if schema is None:
        owner = catalog.owner_of_hidden(name)
        if owner is not None:
            raise RoutingError(f"{name} is the hidden stored relation of {owner.name}")
        raise UnknownRelationError(f"unknown relation {name}")
    return schema


def _check_free(name: str, catalog: Catalog) -> None:
    if name.casefold() in catalog.names():
        raise DuplicateNameError(f"relation name {name} is already in use")


def route_script(stmts: list[ast.Statement], catalog: Catalog, mode: str = compiler.STANDARD):
    """Route statements in order against an evolving catalog.

    Stops at the first failure; the error is raised after ``routed`` and
    ``catalog`` attributes are attached so earlier work is not lost.
    """
    routed: list[RoutedStatement] = []
    for i, stmt in enumerate(stmts):
        try:
            r = route(stmt, catalog, mode)
        except SirError as exc:
            exc.statement_index = i
            exc.routed = routed
            exc.catalog = catalog
            raise
        routed.append(r)
        catalog = r.catalog
    return routed, catalog

