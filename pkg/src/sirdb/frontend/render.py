"""Turn syntax trees back into SQL text.

``render`` produces the canonical single-line form of the SIR dialect; it
keeps the parenthesization the SIR notation uses (view bodies, ON
conditions) so the token stream of a statement survives a round trip.
``render_ansi`` produces plain SQL for an external DBMS.
"""

from __future__ import annotations

from functools import singledispatch

from . import ast


def render_value(value: ast.Value) -> str:
    if value is None:
        return "NULL"
    if isinstance(value, str):
        return "'" + value.replace("'", "''") + "'"
    return repr(value)


def _operand(op: ast.Operand) -> str:
    return render_value(op.value) if isinstance(op, ast.Literal) else str(op)


def _where(preds: tuple[ast.Predicate, ...]) -> str:
    if not preds:
        return ""
    return " WHERE " + " AND ".join(f"{_operand(p.left)} {p.op} {_operand(p.right)}" for p in preds)


def _join(j: ast.JoinClause, ansi: bool) -> str:
    cond = f"{j.left_col} = {j.right_col}"
    return f" LEFT JOIN {j.right} ON " + (cond if ansi else f"({cond})")


def _from(f: ast.FromClause, ansi: bool = False) -> str:
    return f"FROM {f.source}" + "".join(_join(j, ansi) for j in f.joins)


def _select(s: ast.Select, ansi: bool = False) -> str:
    items = ", ".join("*" if isinstance(i, ast.Star) else str(i) for i in s.items)
    return f"SELECT {items} {_from(s.from_, ansi)}{_where(s.where)}"


def _names(names: tuple[str, ...]) -> str:
    return "(" + ", ".join(names) + ")"


def _foreign_key(fk: ast.ForeignKeyClause) -> str:
    return f"FOREIGN KEY {_names(fk.columns)} REFERENCES {fk.references} {_names(fk.key)}"


@singledispatch
def render(stmt) -> str:
    """Canonical single-line text of ``stmt`` (no trailing semicolon)."""
    raise TypeError(f"cannot render {type(stmt).__name__}")


@render.register
def _(stmt: ast.CreateTable) -> str:
    attrs = []
    for a in stmt.attributes:
        text = str(a.column) if a.data_type is None else f"{a.column} {a.data_type}"
        attrs.append(f"({text})" if a.parenthesized else text)
    body = ", ".join(attrs)
    if stmt.ie is not None:
        body += " " + _from(stmt.ie)
    if stmt.primary_key:
        body += " PRIMARY KEY " + _names(stmt.primary_key)
    for fk in stmt.foreign_keys:
        body += ", " + _foreign_key(fk)
    return f"CREATE TABLE {stmt.name} ({body})"


@render.register
def _(stmt: ast.CreateView) -> str:
    return f"CREATE VIEW {stmt.name} AS ({_select(stmt.select)})"


@render.register
def _(stmt: ast.Select) -> str:
    return _select(stmt)


@render.register
def _(stmt: ast.Insert) -> str:
    values = [render_value(v.value) for v in stmt.values]
    if stmt.columns is None:
        return f"INSERT INTO {stmt.table} VALUES ({', '.join(values)})"
    pairs = ", ".join(f"{c} = {v}" for c, v in zip(stmt.columns, values))
    return f"INSERT {stmt.table} ({pairs})"


@render.register
def _(stmt: ast.Update) -> str:
    sets = ", ".join(f"{a.column} = {render_value(a.value.value)}" for a in stmt.assignments)
    return f"UPDATE {stmt.table} SET {sets}{_where(stmt.where)}"


@render.register
def _(stmt: ast.Delete) -> str:
    return f"DELETE FROM {stmt.table}{_where(stmt.where)}"


@render.register
def _(stmt: ast.DropTable) -> str:
    return f"DROP TABLE {stmt.name}"


@render.register
def _(stmt: ast.DropView) -> str:
    return f"DROP VIEW {stmt.name}"


@render.register
def _(stmt: ast.AlterTableAddInherited) -> str:
    tail = " " + _from(stmt.ie) if stmt.ie is not None else ""
    return f"ALTER TABLE {stmt.table} ADD {stmt.attribute}{tail}"


@render.register
def _(stmt: ast.AlterTableDropInherited) -> str:
    return f"ALTER TABLE {stmt.table} DROP {stmt.attribute}"


def render_ansi(stmt: ast.Statement) -> str:
    """Standard SQL text, ``;``-terminated.

    Only stored-table and view DDL differ from the canonical form; inherited
    attributes and foreign-key shorthand have no standard spelling and must
    be compiled away first.
    """
    if isinstance(stmt, ast.CreateTable):
        if stmt.is_sir or stmt.ie is not None:
            raise ValueError(f"{stmt.name} still carries SIR syntax; compile it first")
        cols = []
        for a in stmt.attributes:
            t = a.data_type
            cols.append(f"{a.name} CHAR({t.length})" if t.name == "CHAR" else f"{a.name} {t.name}")
        if stmt.primary_key:
            cols.append("PRIMARY KEY " + _names(stmt.primary_key))
        return f"CREATE TABLE {stmt.name} ({', '.join(cols)});"
    if isinstance(stmt, ast.CreateView):
        return f"CREATE VIEW {stmt.name} AS {_select(stmt.select, ansi=True)};"
    if isinstance(stmt, ast.Select):
        return _select(stmt, ansi=True) + ";"
    if isinstance(stmt, ast.Insert) and stmt.columns is not None:
        values = ", ".join(render_value(v.value) for v in stmt.values)
        return f"INSERT INTO {stmt.table} {_names(stmt.columns)} VALUES ({values});"
    return render(stmt) + ";"
