"""Recursive-descent parser for the SQL subset plus the SIR extensions.

Each ``_parse_xxx`` method expects the cursor on the first token of the
construct and leaves it one past the last token.
"""

from __future__ import annotations

from typing import Optional

from ..errors import SqlSyntaxError
from . import ast
from .lexer import Token, TokenKind, tokenize

COMPARISON_OPS = ("=", "<>", "!=", "<", ">", "<=", ">=")


def parse_statement(source: str) -> ast.Statement:
    """Parse exactly one statement, optionally ``;``-terminated."""
    parser = _Parser(source)
    stmt = parser.statement()
    if parser.peek().is_symbol(";"):
        parser.next()
    parser.expect_end()
    return stmt


def parse_script(source: str) -> list[ast.Statement]:
    """Parse a ``;``-separated sequence of statements."""
    parser = _Parser(source)
    stmts = []
    while not parser.at_end():
        if parser.peek().is_symbol(";"):
            parser.next()
            continue
        stmts.append(parser.statement())
        if not parser.at_end():
            parser.expect_symbol(";")
    return stmts


def split_script(source: str) -> list[str]:
    """Split a script into statement texts without parsing them.

    Lets callers report errors per statement and keep going.
    """
    tokens = tokenize(source)
    chunks, start = [], 0
    for tok in tokens:
        if tok.is_symbol(";"):
            chunk = source[start:tok.offset]
            if chunk.strip() and tokenize(chunk):
                chunks.append(chunk)
            start = tok.offset + 1
    tail = source[start:]
    if tokenize(tail):
        chunks.append(tail)
    return chunks


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.pos = 0

    # cursor helpers ----------------------------------------------------

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def peek(self, ahead: int = 0) -> Token:
        i = self.pos + ahead
        if i < len(self.tokens):
            return self.tokens[i]
        return self._eof()

    def _eof(self) -> Token:
        lines = self.source.split("\n")
        return Token(TokenKind.SYMBOL, "", len(lines), len(lines[-1]) + 1, len(self.source))

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind is TokenKind.ERROR:
            self.fail(tok, f"unexpected character {tok.text[:1]!r}")
        self.pos += 1
        return tok

    def fail(self, tok: Token, message: str, expected: tuple[str, ...] = ()):
        raise SqlSyntaxError(message, tok.line, tok.column, expected)

    def unexpected(self, *expected: str):
        tok = self.peek()
        if tok.kind is TokenKind.ERROR:
            self.fail(tok, f"unexpected character {tok.text[:1]!r}", expected)
        what = repr(tok.text) if tok.text else "end of input"
        self.fail(tok, f"unexpected {what}", expected)

    def expect_keyword(self, *words: str) -> Token:
        if not self.peek().is_keyword(*words):
            self.unexpected(*words)
        return self.next()

    def accept_keyword(self, *words: str) -> Optional[Token]:
        if self.peek().is_keyword(*words):
            return self.next()
        return None

    def expect_symbol(self, sym: str) -> Token:
        if not self.peek().is_symbol(sym):
            self.unexpected(repr(sym))
        return self.next()

    def accept_symbol(self, sym: str) -> bool:
        if self.peek().is_symbol(sym):
            self.next()
            return True
        return False

    def expect_end(self) -> None:
        if not self.at_end():
            self.unexpected("end of statement")

    def identifier(self, what: str = "identifier") -> str:
        tok = self.peek()
        if tok.kind is not TokenKind.IDENTIFIER:
            self.unexpected(what)
        return self.next().text

    # statements --------------------------------------------------------

    def statement(self) -> ast.Statement:
        tok = self.peek()
        if tok.is_keyword("CREATE"):
            return self._parse_create()
        if tok.is_keyword("SELECT"):
            return self._parse_select()
        if tok.is_keyword("INSERT"):
            return self._parse_insert()
        if tok.is_keyword("UPDATE"):
            return self._parse_update()
        if tok.is_keyword("DELETE"):
            return self._parse_delete()
        if tok.is_keyword("DROP"):
            return self._parse_drop()
        if tok.is_keyword("ALTER"):
            return self._parse_alter()
        self.unexpected("CREATE", "SELECT", "INSERT", "UPDATE", "DELETE", "DROP", "ALTER")

    def _parse_create(self) -> ast.Statement:
        self.expect_keyword("CREATE")
        kind = self.expect_keyword("TABLE", "VIEW")
        if kind.upper == "VIEW":
            name = self.identifier("view name")
            self.expect_keyword("AS")
            if self.peek().is_symbol("("):
                self.next()
                select = self._parse_select()
                self.expect_symbol(")")
            else:
                select = self._parse_select()
            return ast.CreateView(name, select)
        return self._parse_create_table()

    def _parse_create_table(self) -> ast.CreateTable:
        name_tok = self.peek()
        name = self.identifier("table name")
        self.expect_symbol("(")
        attributes: list[ast.AttributeClause] = []
        attr_tokens: list[Token] = []
        ie = None
        primary_key: tuple[str, ...] = ()
        pk_tokens: list[Token] = []
        foreign_keys: list[ast.ForeignKeyClause] = []

        attr_tokens.append(self.peek())
        attributes.append(self._parse_attribute())
        while True:
            if self.peek().is_symbol(","):
                self.next()
                if self.peek().is_keyword("FROM", "PRIMARY", "FOREIGN"):
                    continue
                attr_tokens.append(self.peek())
                attributes.append(self._parse_attribute())
            elif self.peek().is_keyword("FROM") and ie is None and not primary_key and not foreign_keys:
                ie = self._parse_from()
            elif self.peek().is_keyword("PRIMARY") and not primary_key and not foreign_keys:
                self.next()
                self.expect_keyword("KEY")
                primary_key, pk_tokens = self._parse_name_list()
            elif self.peek().is_keyword("FOREIGN"):
                foreign_keys.append(self._parse_foreign_key())
            elif self.peek().is_symbol(")"):
                self.next()
                break
            else:
                self.unexpected("','", "FROM", "PRIMARY KEY", "')'")

        seen: dict[tuple[Optional[str], str], Token] = {}
        for attr, tok in zip(attributes, attr_tokens):
            key = ((attr.column.qualifier or "").casefold(), attr.name.casefold())
            if key in seen:
                self.fail(tok, f"duplicate attribute {attr.column}")
            seen[key] = tok
        declared = {a.name.casefold() for a in attributes if not a.inherited}
        for col, tok in zip(primary_key, pk_tokens):
            if col.casefold() not in declared:
                self.fail(tok, f"primary-key column {col} is not a declared stored attribute")
        if ie is not None and not any(a.inherited or a.parenthesized for a in attributes):
            self.fail(name_tok, f"table {name} has an inheritance expression but no inherited attribute")
        has_fk = foreign_keys or any(a.parenthesized for a in attributes)
        if ie is None and not has_fk and any(a.inherited for a in attributes):
            # bare inherited attributes need somewhere to come from
            first = next(t for a, t in zip(attributes, attr_tokens) if a.inherited)
            self.fail(first, "inherited attribute without an inheritance expression", ("FROM",))
        return ast.CreateTable(name, tuple(attributes), ie, primary_key, tuple(foreign_keys))

    def _parse_attribute(self) -> ast.AttributeClause:
        if self.peek().is_symbol("("):
            open_tok = self.next()
            inner = self._parse_attribute_body()
            self.expect_symbol(")")
            if inner.data_type is None:
                self.fail(open_tok, "parenthesized foreign key needs a data type")
            if inner.column.qualifier:
                self.fail(open_tok, "parenthesized foreign key must be unqualified")
            return ast.AttributeClause(inner.column, inner.data_type, True)
        return self._parse_attribute_body()

    def _parse_attribute_body(self) -> ast.AttributeClause:
        start = self.peek()
        column = self._parse_column_ref()
        data_type = None
        if self.peek().is_keyword("CHAR", "INT", "REAL"):
            if column.qualifier:
                self.fail(start, "a stored attribute cannot be qualified")
            data_type = self._parse_type()
        return ast.AttributeClause(column, data_type, False)

    def _parse_type(self) -> ast.DataType:
        tok = self.next()
        if tok.upper != "CHAR":
            return ast.DataType(tok.upper)
        if self.accept_symbol("("):
            length = self._parse_length()
            self.expect_symbol(")")
        else:
            length = self._parse_length()
        return ast.DataType("CHAR", length)

    def _parse_length(self) -> int:
        tok = self.peek()
        if tok.kind is not TokenKind.NUMBER or "." in tok.text or int(tok.text) == 0:
            self.unexpected("character length")
        return int(self.next().text)

    def _parse_name_list(self) -> tuple[tuple[str, ...], list[Token]]:
        self.expect_symbol("(")
        names, toks = [], [self.peek()]
        names.append(self.identifier("column name"))
        while self.accept_symbol(","):
            toks.append(self.peek())
            names.append(self.identifier("column name"))
        self.expect_symbol(")")
        return tuple(names), toks

    def _parse_foreign_key(self) -> ast.ForeignKeyClause:
        self.expect_keyword("FOREIGN")
        self.expect_keyword("KEY")
        cols, _ = self._parse_name_list()
        self.expect_keyword("REFERENCES")
        ref = self.identifier("relation name")
        key, tok = self._parse_name_list()
        if len(key) != len(cols):
            self.fail(tok[0], "foreign key and referenced key differ in arity")
        return ast.ForeignKeyClause(cols, ref, key)

    def _parse_from(self) -> ast.FromClause:
        self.expect_keyword("FROM")
        source = self.identifier("relation name")
        joins = []
        while self.peek().is_keyword("LEFT", "JOIN"):
            joins.append(self._parse_join())
        return ast.FromClause(source, tuple(joins))

    def _parse_join(self) -> ast.JoinClause:
        if not self.peek().is_keyword("LEFT"):
            self.fail(self.peek(), "only LEFT JOIN is supported", ("LEFT",))
        self.next()
        self.accept_keyword("OUTER")
        self.expect_keyword("JOIN")
        right = self.identifier("relation name")
        self.expect_keyword("ON")
        parens = self.accept_symbol("(")
        first = self.peek()
        left_col = self._parse_column_ref()
        self.expect_symbol("=")
        right_col = self._parse_column_ref()
        if parens:
            self.expect_symbol(")")
        if not left_col.qualifier or not right_col.qualifier:
            self.fail(first, "join condition columns must be qualified")
        if ast.same_name(left_col.qualifier, right_col.qualifier):
            self.fail(first, "join condition must reference two distinct sources")
        return ast.JoinClause(right, left_col, right_col)

    def _parse_column_ref(self) -> ast.ColumnRef:
        first = self.identifier("column name")
        if self.peek().is_symbol(".") and self.peek(1).kind is TokenKind.IDENTIFIER:
            self.next()
            return ast.ColumnRef(self.next().text, first)
        return ast.ColumnRef(first)

    def _parse_select(self) -> ast.Select:
        self.expect_keyword("SELECT")
        items: list[ast.SelectItem] = []
        if self.accept_symbol("*"):
            items.append(ast.Star())
        else:
            items.append(self._parse_column_ref())
            while self.accept_symbol(","):
                items.append(self._parse_column_ref())
        from_ = self._parse_from()
        where = self._parse_where()
        return ast.Select(tuple(items), from_, where)

    def _parse_where(self) -> tuple[ast.Predicate, ...]:
        if not self.accept_keyword("WHERE"):
            return ()
        preds = [self._parse_predicate()]
        while self.accept_keyword("AND"):
            preds.append(self._parse_predicate())
        return tuple(preds)

    def _parse_predicate(self) -> ast.Predicate:
        left = self._parse_operand()
        tok = self.peek()
        if tok.kind is not TokenKind.SYMBOL or tok.text not in COMPARISON_OPS:
            self.unexpected(*COMPARISON_OPS)
        op = self.next().text
        if op == "!=":
            op = "<>"
        right = self._parse_operand()
        return ast.Predicate(left, op, right)

    def _parse_operand(self) -> ast.Operand:
        if self.peek().kind is TokenKind.IDENTIFIER:
            return self._parse_column_ref()
        return self._parse_literal()

    def _parse_literal(self) -> ast.Literal:
        """A value: number, quoted string, NULL, or a bare word taken as text."""
        tok = self.peek()
        if tok.is_symbol("-") and self.peek(1).kind is TokenKind.NUMBER:
            self.next()
            return ast.Literal(-_number(self.next().text))
        if tok.kind is TokenKind.NUMBER:
            return ast.Literal(_number(self.next().text))
        if tok.kind is TokenKind.STRING:
            return ast.Literal(self.next().text[1:-1].replace("''", "'"))
        if tok.is_keyword("NULL"):
            self.next()
            return ast.Literal(None)
        if tok.kind is TokenKind.IDENTIFIER:
            return ast.Literal(self.next().text)
        self.unexpected("value")

    def _parse_insert(self) -> ast.Insert:
        self.expect_keyword("INSERT")
        self.accept_keyword("INTO")
        table = self.identifier("table name")
        if self.peek().is_keyword("VALUES"):
            return ast.Insert(table, None, self._parse_values())
        self.expect_symbol("(")
        if self.peek(1).is_symbol("=") or (self.peek(1).is_symbol(".") and self.peek(3).is_symbol("=")):
            columns, values = [], []
            while True:
                columns.append(self._target_column())
                self.expect_symbol("=")
                values.append(self._parse_literal())
                if not self.accept_symbol(","):
                    break
            self.expect_symbol(")")
            self._check_unique_columns(columns)
            return ast.Insert(table, tuple(columns), tuple(values))
        columns = [self._target_column()]
        while self.accept_symbol(","):
            columns.append(self._target_column())
        self.expect_symbol(")")
        values_tok = self.peek()
        values = self._parse_values()
        if len(values) != len(columns):
            self.fail(values_tok, f"{len(columns)} columns but {len(values)} values")
        self._check_unique_columns(columns)
        return ast.Insert(table, tuple(columns), values)

    def _target_column(self) -> str:
        """A written column; a qualified one is kept as ``Q.NAME`` for the router to judge."""
        name = self.identifier("column name")
        if self.accept_symbol("."):
            name = f"{name}.{self.identifier('column name')}"
        return name

    def _check_unique_columns(self, columns: list[str]) -> None:
        folded = [c.casefold() for c in columns]
        if len(set(folded)) != len(folded):
            self.fail(self.tokens[self.pos - 1], "column assigned twice")

    def _parse_values(self) -> tuple[ast.Literal, ...]:
        self.expect_keyword("VALUES")
        self.expect_symbol("(")
        values = [self._parse_literal()]
        while self.accept_symbol(","):
            values.append(self._parse_literal())
        self.expect_symbol(")")
        return tuple(values)

    def _parse_update(self) -> ast.Update:
        self.expect_keyword("UPDATE")
        table = self.identifier("table name")
        self.expect_keyword("SET")
        assignments = []
        while True:
            col = self._target_column()
            self.expect_symbol("=")
            assignments.append(ast.Assignment(col, self._parse_literal()))
            if not self.accept_symbol(","):
                break
        self._check_unique_columns([a.column for a in assignments])
        return ast.Update(table, tuple(assignments), self._parse_where())

    def _parse_delete(self) -> ast.Delete:
        self.expect_keyword("DELETE")
        self.accept_keyword("FROM")
        table = self.identifier("table name")
        return ast.Delete(table, self._parse_where())

    def _parse_drop(self) -> ast.Statement:
        self.expect_keyword("DROP")
        kind = self.expect_keyword("TABLE", "VIEW")
        name = self.identifier("relation name")
        return ast.DropTable(name) if kind.upper == "TABLE" else ast.DropView(name)

    def _parse_alter(self) -> ast.Statement:
        self.expect_keyword("ALTER")
        self.expect_keyword("TABLE")
        table = self.identifier("table name")
        action = self.expect_keyword("ADD", "DROP")
        attr = self._parse_column_ref()
        if action.upper == "DROP":
            return ast.AlterTableDropInherited(table, attr)
        if self.peek().is_keyword("CHAR", "INT", "REAL"):
            self.fail(self.peek(), "only inherited attributes (no data type) can be added", ("FROM",))
        ie = self._parse_from() if self.peek().is_keyword("FROM") else None
        return ast.AlterTableAddInherited(table, attr, ie)


def _number(text: str):
    return float(text) if "." in text else int(text)
