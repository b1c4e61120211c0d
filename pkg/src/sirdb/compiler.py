"""Desugar SIR table definitions and compile them to a stored table plus a view.

The pipeline for a CREATE TABLE is::

    apply_parentheses_mode -> expand_fk_shorthand -> expand_implicit_joins -> compile_table

Every pass is a pure function of (statement, catalog).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

from .catalog import INHERITED, STORED, Attribute, Catalog, ForeignKey, SirSchema, hidden_name
from .errors import CompileError
from .frontend import ast, render_ansi

STANDARD = "standard"
INVERTED = "inverted"
MODES = (STANDARD, INVERTED)


@dataclass(frozen=True)
class CompiledSir:
    stored_ddl: ast.CreateTable
    view_ddl: ast.CreateView
    schema: SirSchema

    @property
    def statements(self) -> tuple[ast.Statement, ...]:
        return (self.stored_ddl, self.view_ddl)


@dataclass(frozen=True)
class PlainTable:
    ddl: ast.CreateTable
    schema: SirSchema

    @property
    def statements(self) -> tuple[ast.Statement, ...]:
        return (self.ddl,)


Compiled = Union[CompiledSir, PlainTable]


def _keyed_relations(catalog: Catalog, attr: str, exclude: str) -> list[SirSchema]:
    return [
        s for s in catalog
        if s.kind != "view"
        and not ast.same_name(s.name, exclude)
        and len(s.primary_key) == 1
        and ast.same_name(s.primary_key[0], attr)
    ]


def referenced_relation(catalog: Catalog, attr: str, exclude: str = "") -> SirSchema:
    """The relation whose primary key is exactly ``attr`` (same-name convention)."""
    hits = _keyed_relations(catalog, attr, exclude)
    if not hits:
        raise CompileError(f"no relation is keyed on {attr}")
    if len(hits) > 1:
        names = ", ".join(s.name for s in hits)
        raise CompileError(f"foreign key ({attr}) is ambiguous: {names} are all keyed on it")
    return hits[0]


def apply_parentheses_mode(stmt: ast.CreateTable, mode: str, catalog: Catalog) -> ast.CreateTable:
    """In inverted mode, swap plain and parenthesized spellings of foreign keys."""
    if mode not in MODES:
        raise ValueError(f"unknown parentheses mode {mode!r}")
    if mode == STANDARD:
        return stmt
    attrs = []
    for a in stmt.attributes:
        if a.data_type is not None and _keyed_relations(catalog, a.name, stmt.name):
            a = replace(a, parenthesized=not a.parenthesized)
        attrs.append(a)
    return replace(stmt, attributes=tuple(attrs))


def _add_fk(fks: list[ast.ForeignKeyClause], fk: ast.ForeignKeyClause) -> None:
    for old in fks:
        if ast.same_name(old.references, fk.references) and len(old.columns) == len(fk.columns) and all(
            ast.same_name(a, b) for a, b in zip(old.columns, fk.columns)
        ):
            return
    fks.append(fk)


def expand_fk_shorthand(stmt: ast.CreateTable, catalog: Catalog) -> ast.CreateTable:
    """Replace each ``(A type)`` by ``A type`` plus the non-key attributes of A's relation."""
    if not any(a.parenthesized for a in stmt.attributes):
        return stmt
    explicit = [a for a in stmt.attributes if a.inherited]

    def declared(source: str, name: str) -> bool:
        return any(
            ast.same_name(a.name, name) and (a.column.qualifier is None or ast.same_name(a.column.qualifier, source))
            for a in explicit
        )

    attrs: list[ast.AttributeClause] = []
    origin: dict[int, str] = {}  # index of generated IA -> source relation
    fks = list(stmt.foreign_keys)
    for a in stmt.attributes:
        if not a.parenthesized:
            attrs.append(a)
            continue
        ref = referenced_relation(catalog, a.name, stmt.name)
        attrs.append(replace(a, parenthesized=False))
        _add_fk(fks, ast.ForeignKeyClause((a.name,), ref.name, ref.primary_key))
        key = {k.casefold() for k in ref.primary_key}
        for fa in ref.attributes:
            if fa.name.casefold() in key or declared(ref.name, fa.name):
                continue
            origin[len(attrs)] = ref.name
            attrs.append(ast.AttributeClause(ast.ColumnRef(fa.name)))

    counts: dict[str, int] = {}
    for a in attrs:
        if a.inherited:
            counts[a.name.casefold()] = counts.get(a.name.casefold(), 0) + 1
    for i, source in origin.items():
        if counts[attrs[i].name.casefold()] > 1:
            attrs[i] = ast.AttributeClause(ast.ColumnRef(attrs[i].name, source))
    return replace(stmt, attributes=tuple(attrs), foreign_keys=tuple(fks))


def expand_implicit_joins(stmt: ast.CreateTable, catalog: Catalog) -> ast.CreateTable:
    """Synthesize ``LEFT JOIN F ON (R_.A = F.A)`` for every foreign key not yet joined."""
    if not stmt.is_sir:
        return stmt
    fks = list(stmt.foreign_keys)
    for a in stmt.attributes:
        if a.parenthesized:
            ref = referenced_relation(catalog, a.name, stmt.name)
            _add_fk(fks, ast.ForeignKeyClause((a.name,), ref.name, ref.primary_key))
    base = stmt.ie.source if stmt.ie is not None else hidden_name(stmt.name)
    joins = list(stmt.ie.joins) if stmt.ie is not None else []
    for fk in fks:
        if len(fk.columns) != 1:
            raise CompileError(f"composite foreign key {fk.columns} cannot be joined implicitly")
        if catalog.lookup(fk.references) is None:
            raise CompileError(f"foreign key references unknown relation {fk.references}")
        join = ast.JoinClause(
            fk.references, ast.ColumnRef(fk.columns[0], base), ast.ColumnRef(fk.key[0], fk.references)
        )
        if any(join.same_as(j) for j in joins):
            continue
        if any(ast.same_name(j.right, fk.references) for j in joins):
            raise CompileError(f"relation {fk.references} would be joined twice; aliasing is not supported")
        joins.append(join)
    if stmt.ie is None and not joins:
        return stmt
    return replace(stmt, ie=ast.FromClause(base, tuple(joins)))


def desugar(stmt: ast.CreateTable, catalog: Catalog, mode: str = STANDARD) -> ast.CreateTable:
    stmt = apply_parentheses_mode(stmt, mode, catalog)
    stmt = expand_fk_shorthand(stmt, catalog)
    return expand_implicit_joins(stmt, catalog)


def _source_attributes(catalog: Catalog, name: str) -> tuple[Attribute, ...]:
    schema = catalog.lookup(name)
    if schema is None:
        raise CompileError(f"unknown relation {name}")
    return schema.attributes


def _has_column(attrs, name: str) -> bool:
    return any(ast.same_name(a.name, name) for a in attrs)


def compile_table(stmt: ast.CreateTable, catalog: Catalog) -> Compiled:
    """Compile a desugared CREATE TABLE."""
    if any(a.parenthesized for a in stmt.attributes):
        raise CompileError("foreign-key shorthand must be expanded before compiling")
    stored = [
        Attribute(a.name, STORED, None, a.data_type) for a in stmt.attributes if not a.inherited
    ]
    clause_fks = [ForeignKey(fk.columns, fk.references, fk.key) for fk in stmt.foreign_keys]
    for fk in clause_fks:
        if catalog.lookup(fk.referenced_relation) is None:
            raise CompileError(f"foreign key references unknown relation {fk.referenced_relation}")
    if not stmt.is_sir:
        schema = SirSchema(stmt.name, tuple(stored), stmt.primary_key, tuple(clause_fks))
        return PlainTable(stmt, schema)

    hidden = hidden_name(stmt.name)
    ie = stmt.ie
    if ie is None:
        raise CompileError(f"{stmt.name} has inherited attributes but no inheritance expression")
    if not ast.same_name(ie.source, hidden):
        raise CompileError(f"inheritance expression of {stmt.name} must start FROM {hidden}, not {ie.source}")

    sources: dict[str, tuple[Attribute, ...]] = {hidden.casefold(): tuple(stored)}
    joined: list[SirSchema] = []
    derived_fks: list[ForeignKey] = []
    for j in ie.joins:
        if j.right.casefold() in sources or ast.same_name(j.right, stmt.name):
            raise CompileError(f"relation {j.right} is joined twice; aliasing is not supported")
        ref = catalog.lookup(j.right)
        if ref is None:
            raise CompileError(f"{stmt.name} inherits from unknown relation {j.right}")
        if ast.same_name(j.right_col.qualifier, j.right):
            inner, outer = j.right_col, j.left_col
        elif ast.same_name(j.left_col.qualifier, j.right):
            inner, outer = j.left_col, j.right_col
        else:
            raise CompileError(f"join condition on {j.right} does not reference {j.right}")
        outer_attrs = sources.get(outer.qualifier.casefold())
        if outer_attrs is None:
            raise CompileError(f"join condition references {outer.qualifier}, which is not joined earlier")
        if not _has_column(outer_attrs, outer.name):
            raise CompileError(f"unknown column {outer} in join condition")
        if not _has_column(ref.attributes, inner.name):
            raise CompileError(f"unknown column {inner} in join condition")
        if (
            ast.same_name(outer.qualifier, hidden)
            and len(ref.primary_key) == 1
            and ast.same_name(ref.primary_key[0], inner.name)
        ):
            local = next(a.name for a in stored if ast.same_name(a.name, outer.name))
            derived_fks.append(ForeignKey((local,), ref.name, ref.primary_key))
        sources[j.right.casefold()] = ref.attributes
        joined.append(ref)

    stored_names = {a.name.casefold() for a in stored}
    ia_clauses = [a for a in stmt.attributes if a.inherited]
    bare_counts: dict[str, int] = {}
    for a in ia_clauses:
        bare_counts[a.name.casefold()] = bare_counts.get(a.name.casefold(), 0) + 1

    attributes: list[Attribute] = []
    for a in stmt.attributes:
        if not a.inherited:
            attributes.append(Attribute(a.name, STORED, None, a.data_type))
            continue
        ref = a.column
        if ref.name.casefold() in stored_names:
            raise CompileError(f"inherited attribute {ref} collides with stored attribute {ref.name}")
        if bare_counts[ref.name.casefold()] > 1 and not ref.qualifier:
            raise CompileError(f"inherited attribute {ref.name} occurs more than once; qualify it")
        if ref.qualifier:
            candidates = [s for s in joined if ast.same_name(s.name, ref.qualifier)]
        else:
            candidates = joined
        hits = [(s, s.attribute(ref.name)) for s in candidates]
        hits = [(s, fa) for s, fa in hits if fa is not None]
        if len(hits) != 1:
            reason = "is ambiguous" if hits else "cannot be resolved"
            raise CompileError(f"inherited attribute {ref} {reason} through the inheritance expression")
        src, fa = hits[0]
        attributes.append(Attribute(ref.name, INHERITED, ref.qualifier, fa.data_type, src.name))

    fks: list[ForeignKey] = []
    for fk in derived_fks + clause_fks:
        if not any(
            ast.same_name(fk.referenced_relation, o.referenced_relation)
            and [x.casefold() for x in fk.local_attrs] == [x.casefold() for x in o.local_attrs]
            for o in fks
        ):
            fks.append(fk)

    schema = SirSchema(stmt.name, tuple(attributes), stmt.primary_key, tuple(fks), ie)
    return CompiledSir(stored_table(schema), view_definition(schema, catalog), schema)


def stored_table(schema: SirSchema) -> ast.CreateTable:
    attrs = tuple(ast.AttributeClause(ast.ColumnRef(a.name), a.data_type) for a in schema.stored_attributes)
    return ast.CreateTable(hidden_name(schema.name), attrs, None, schema.primary_key)


def view_definition(schema: SirSchema, catalog: Catalog) -> ast.CreateView:
    """CREATE VIEW R selecting every SIR attribute; stored ones read from R_."""
    joined_names: set[str] = set()
    for j in schema.ie.joins:
        joined_names.update(a.name.casefold() for a in _source_attributes(catalog, j.right))
    items = []
    for a in schema.attributes:
        if a.stored:
            qual = schema.ie.source if a.name.casefold() in joined_names else None
            items.append(ast.ColumnRef(a.name, qual))
        else:
            items.append(a.ref)
    select = ast.Select(tuple(items), schema.ie)
    return ast.CreateView(schema.name, select)


def compile_create(stmt: ast.CreateTable, catalog: Catalog, mode: str = STANDARD) -> Compiled:
    return compile_table(desugar(stmt, catalog, mode), catalog)


def schema_to_create(schema: SirSchema) -> ast.CreateTable:
    """Rebuild an explicit (desugared) CREATE TABLE from a catalog schema."""
    attrs = tuple(
        ast.AttributeClause(a.ref, a.data_type if a.stored else None) for a in schema.attributes
    )
    fks = tuple(ast.ForeignKeyClause(fk.local_attrs, fk.referenced_relation, fk.referenced_key)
                for fk in schema.foreign_keys)
    return ast.CreateTable(schema.name, attrs, schema.ie, schema.primary_key, fks)


def add_inherited(schema: SirSchema, stmt: ast.AlterTableAddInherited, catalog: Catalog) -> CompiledSir:
    """Recompile ``schema`` with one more inherited attribute."""
    if not schema.is_sir:
        raise CompileError(f"{schema.name} has no inherited attributes; only SIRs can be altered")
    joins = list(schema.ie.joins)
    if stmt.ie is not None:
        if not ast.same_name(stmt.ie.source, schema.ie.source):
            raise CompileError(f"inheritance expression must start FROM {schema.ie.source}")
        for j in stmt.ie.joins:
            if any(j.same_as(o) for o in joins):
                continue
            if any(ast.same_name(j.right, o.right) for o in joins):
                raise CompileError(f"relation {j.right} is already joined with a different condition")
            joins.append(j)
    base = schema_to_create(schema)
    new = replace(
        base,
        attributes=base.attributes + (ast.AttributeClause(stmt.attribute),),
        ie=ast.FromClause(schema.ie.source, tuple(joins)),
    )
    return compile_table(new, catalog)


def _prune_joins(ie: ast.FromClause, needed: set[str]) -> tuple[ast.JoinClause, ...]:
    kept: list[ast.JoinClause] = []
    for j in reversed(ie.joins):
        if j.right.casefold() in needed:
            kept.append(j)
            for col in (j.left_col, j.right_col):
                if not ast.same_name(col.qualifier, j.right):
                    needed.add(col.qualifier.casefold())
    return tuple(reversed(kept))


def drop_inherited(schema: SirSchema, stmt: ast.AlterTableDropInherited, catalog: Catalog) -> CompiledSir:
    """Recompile ``schema`` without one inherited attribute, pruning unused joins."""
    if not schema.is_sir:
        raise CompileError(f"{schema.name} has no inherited attributes")
    target = schema.attribute(stmt.attribute)
    if target is None:
        raise CompileError(f"{schema.name} has no attribute {stmt.attribute}")
    if target.stored:
        raise CompileError(f"{target.display} is a stored attribute; only inherited ones can be dropped")
    remaining = [a for a in schema.attributes if a is not target]
    if not any(not a.stored for a in remaining):
        raise CompileError(f"cannot drop {target.display}: it is the last inherited attribute of {schema.name}")
    needed = {a.source.casefold() for a in remaining if not a.stored}
    joins = _prune_joins(schema.ie, needed)
    joined = {j.right.casefold() for j in joins}
    fks = tuple(fk for fk in schema.foreign_keys if fk.referenced_relation.casefold() in joined)
    pruned = replace(schema, attributes=tuple(remaining), foreign_keys=fks,
                     ie=ast.FromClause(schema.ie.source, joins))
    return compile_table(schema_to_create(pruned), catalog)


def describe_select(select: ast.Select, catalog: Catalog) -> tuple[Attribute, ...]:
    """Output attributes of a SELECT evaluated against catalog schemas."""
    columns: list[tuple[str, frozenset, int, Attribute]] = []
    for origin, src in enumerate(select.from_.sources):
        schema = catalog.lookup(src)
        if schema is None:
            raise CompileError(f"unknown relation {src}")
        for a in schema.attributes:
            display = a.qualifier or schema.name
            aliases = frozenset({schema.name.casefold(), display.casefold()})
            columns.append((display, aliases, origin, a))

    def find(ref: ast.ColumnRef):
        hits = [
            c for c in columns
            if ast.same_name(c[3].name, ref.name)
            and (ref.qualifier is None or ref.qualifier.casefold() in c[1])
        ]
        if len(hits) > 1 and ref.qualifier is None:
            hits = [c for c in hits if c[2] == 0] or hits
        if len(hits) != 1:
            raise CompileError(f"column {ref} is {'ambiguous' if hits else 'unknown'}")
        return hits[0]

    picked = []
    for item in select.items:
        if isinstance(item, ast.Star):
            picked.extend(columns)
        else:
            picked.append(find(item))
    names = [c[3].name.casefold() for c in picked]
    out = []
    for display, _aliases, _origin, a in picked:
        qual = display if names.count(a.name.casefold()) > 1 else None
        out.append(Attribute(a.name, STORED, qual, a.data_type))
    labels = [x.display.casefold() for x in out]
    if len(set(labels)) != len(labels):
        raise CompileError("view would have two columns with the same name")
    return tuple(out)


def compile_view(stmt: ast.CreateView, catalog: Catalog) -> SirSchema:
    return SirSchema(stmt.name, describe_select(stmt.select, catalog), definition=stmt.select)


def emit_standard_sql(compiled: Compiled, dialect: str = "ansi") -> list[str]:
    """Executable SQL text for the internal objects, one ``;``-terminated line each."""
    if dialect != "ansi":
        raise ValueError(f"unsupported dialect {dialect!r}")
    return [render_ansi(s) for s in compiled.statements]


def resolved_projection(view: ast.CreateView, catalog: Catalog, extra: Optional[SirSchema] = None):
    """Bind every projected column of ``view`` to (source relation, column).

    Two view definitions with equal bindings and equal FROM clauses define the
    same relation, whatever qualifiers they spell out.
    """
    cat = catalog
    if extra is not None and cat.get(extra.name) is None:
        cat = cat.register(extra)
    sources = view.select.from_.sources
    bound = []
    for item in view.select.items:
        if isinstance(item, ast.Star):
            raise CompileError("cannot bind '*'")
        if item.qualifier:
            candidates = [s for s in sources if ast.same_name(s, item.qualifier)]
        else:
            candidates = [s for s in sources if _has_column(cat.lookup(s).attributes, item.name)]
            if len(candidates) > 1 and sources[0] in candidates:
                candidates = [sources[0]]
        if len(candidates) != 1:
            raise CompileError(f"column {item} does not bind to exactly one source")
        bound.append((candidates[0].casefold(), item.name.casefold()))
    return tuple(bound), view.select.from_
