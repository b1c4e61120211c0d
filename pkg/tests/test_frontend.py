import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sirdb.errors import SqlSyntaxError
from sirdb.frontend import ast, parse_script, parse_statement, render, split_script, tokenize
from sirdb.frontend.lexer import TokenKind, reassemble
from sirdb.frontend.render import render_ansi

from support import STATEMENTS, statement_text

TRIVIA = re.compile(r"(?:\s+|--[^\n]*)*\Z")


class TestLexer:
    def test_identifier_with_hash_and_underscore(self):
        toks = tokenize("SP_.S# = S1")
        assert [(t.kind, t.text) for t in toks] == [
            (TokenKind.IDENTIFIER, "SP_"),
            (TokenKind.SYMBOL, "."),
            (TokenKind.IDENTIFIER, "S#"),
            (TokenKind.SYMBOL, "="),
            (TokenKind.IDENTIFIER, "S1"),
        ]

    def test_keywords_case_insensitive(self):
        toks = tokenize("create TABLE Left jOIN")
        assert all(t.kind is TokenKind.KEYWORD for t in toks)
        assert [t.upper for t in toks] == ["CREATE", "TABLE", "LEFT", "JOIN"]

    def test_numbers(self):
        toks = tokenize("12 3.5 17.0")
        assert [(t.kind, t.text) for t in toks] == [(TokenKind.NUMBER, x) for x in ("12", "3.5", "17.0")]

    def test_string_with_doubled_quote(self):
        (tok,) = tokenize("'O''Hara'")
        assert tok.kind is TokenKind.STRING and tok.text == "'O''Hara'"

    def test_unterminated_string_is_error_token(self):
        toks = tokenize("x 'abc")
        assert toks[-1].kind is TokenKind.ERROR

    def test_positions(self):
        toks = tokenize("Select *\n  From S")
        from_tok = toks[2]
        assert (from_tok.line, from_tok.column, from_tok.offset) == (2, 3, 11)

    def test_comment_is_trivia(self):
        toks = tokenize("Select * -- all columns\nFrom S")
        assert [t.text for t in toks] == ["Select", "*", "From", "S"]

    @pytest.mark.parametrize("n", STATEMENTS)
    def test_gaps_are_trivia(self, n):
        text = statement_text(n)
        toks = tokenize(text)
        assert reassemble(text, toks) == text
        cursor = 0
        for t in toks:
            assert TRIVIA.match(text[cursor:t.offset])
            cursor = t.offset + len(t.text)

    @settings(max_examples=200, deadline=None)
    @given(st.text(alphabet="SELCTabc_#01 ,.();=<>'-\n\t", max_size=60))
    def test_tokens_partition_input(self, text):
        toks = tokenize(text)
        assert reassemble(text, toks) == text
        cursor = 0
        for t in toks:
            assert t.offset >= cursor
            assert text[t.offset:t.offset + len(t.text)] == t.text
            assert TRIVIA.match(text[cursor:t.offset])
            cursor = t.offset + len(t.text)
        assert TRIVIA.match(text[cursor:])


class TestGoldenCorpus:
    def test_stmt1_view(self):
        stmt = parse_statement(statement_text("1"))
        assert isinstance(stmt, ast.CreateView)
        assert stmt.name == "SP"
        assert stmt.select.items == (
            ast.ColumnRef("S#"), ast.ColumnRef("SNAME"), ast.ColumnRef("P#"), ast.ColumnRef("QTY"),
        )
        assert stmt.select.from_ == ast.FromClause(
            "SP_", (ast.JoinClause("S", ast.ColumnRef("S#", "SP_"), ast.ColumnRef("S#", "S")),)
        )

    def test_stmt3_plain_table(self):
        stmt = parse_statement(statement_text("3"))
        assert not stmt.is_sir and stmt.ie is None
        assert [a.name for a in stmt.attributes] == ["S#", "P#", "QTY"]
        assert stmt.attributes[0].data_type == ast.DataType("CHAR", 5)
        assert stmt.attributes[2].data_type == ast.DataType("INT")
        assert stmt.primary_key == ("S#", "P#")

    def test_stmt4_one_inherited(self):
        stmt = parse_statement(statement_text("4"))
        assert stmt.is_sir
        assert [a.inherited for a in stmt.attributes] == [False, True, False, False]
        assert stmt.ie.source == "SP_" and stmt.ie.sources == ("SP_", "S")

    def test_stmt5_qualified_inherited(self):
        stmt = parse_statement(statement_text("5"))
        inherited = [str(a.column) for a in stmt.attributes if a.inherited]
        assert inherited == ["SNAME", "STATUS", "S.CITY", "PNAME", "COLOR", "WEIGHT", "P.CITY"]
        assert stmt.ie.sources == ("SP_", "S", "P")

    def test_stmt6_view(self):
        stmt = parse_statement(statement_text("6"))
        assert [str(i) for i in stmt.select.items] == [
            "SP_.S#", "SNAME", "STATUS", "S.CITY", "SP_.P#", "PNAME", "COLOR", "WEIGHT", "P.CITY", "QTY",
        ]

    def test_stmt6_without_select_is_rejected(self):
        corrected = statement_text("6")
        raw = corrected.replace("(Select ", "(")
        assert raw != corrected
        with pytest.raises(SqlSyntaxError) as exc:
            parse_statement(raw)
        assert exc.value.expected == ("SELECT",)
        assert (exc.value.line, exc.value.column) == (1, 20)

    def test_stmt7_parenthesized(self):
        stmt = parse_statement(statement_text("7"))
        assert [a.parenthesized for a in stmt.attributes] == [True, True, False]
        assert stmt.ie is not None

    def test_stmt8_no_ie(self):
        stmt = parse_statement(statement_text("8"))
        assert stmt.ie is None
        assert [a.parenthesized for a in stmt.attributes] == [True, True, False]

    def test_insert_assignment_form(self):
        stmt = parse_statement("Insert SP (S# = S1, P# = P20, QTY = 100)")
        assert stmt == ast.Insert(
            "SP", ("S#", "P#", "QTY"), (ast.Literal("S1"), ast.Literal("P20"), ast.Literal(100))
        )

    def test_select_with_bare_words(self):
        stmt = parse_statement("Select * From SP Where S# = S1 And P# = P20;")
        assert stmt.where == (
            ast.Predicate(ast.ColumnRef("S#"), "=", ast.ColumnRef("S1")),
            ast.Predicate(ast.ColumnRef("P#"), "=", ast.ColumnRef("P20")),
        )

    @pytest.mark.parametrize("n", STATEMENTS)
    def test_render_round_trip(self, n):
        stmt = parse_statement(statement_text(n))
        assert parse_statement(render(stmt)) == stmt


class TestOtherStatements:
    @pytest.mark.parametrize("text", [
        "Insert Into S (S#, SNAME) Values ('S9', 'Ng')",
        "Insert Into S Values ('S9', 'Ng', 10, NULL)",
        "Update SP Set QTY = 5 Where S# = 'S1' And QTY >= 100",
        "Delete From SP Where QTY <> 3",
        "Delete SP",
        "Drop Table SP",
        "Drop View V",
        "Alter Table SP Add S.CITY",
        "Alter Table SP Add PNAME From SP_ Left Join P On (SP_.P# = P.P#)",
        "Alter Table SP Drop S.CITY",
        "Create View V As Select S#, QTY From SP0",
        "Create Table T (A Char(3), B Real, Primary Key (A))",
        "Create Table T (A Char 3, B INT Primary Key (A) Foreign Key (B) References U (B))",
        "Select S.S#, CITY From S Where STATUS > -1",
    ])
    def test_round_trip(self, text):
        stmt = parse_statement(text)
        assert parse_statement(render(stmt)) == stmt

    def test_bang_equals_normalized(self):
        stmt = parse_statement("Select * From S Where STATUS != 10")
        assert stmt.where[0].op == "<>"

    def test_char_parenthesized_length(self):
        a = parse_statement("Create Table T (A Char(3) Primary Key (A))")
        b = parse_statement("Create Table T (A Char 3 Primary Key (A))")
        assert a == b

    def test_ansi_render(self):
        stmt = parse_statement(statement_text("3"))
        assert render_ansi(stmt) == "CREATE TABLE SP (S# CHAR(5), P# CHAR(5), QTY INT, PRIMARY KEY (S#, P#));"

    def test_script_split(self):
        src = "Select * From S;\n-- note; with a semicolon\nSelect * From P ; ;"
        assert len(split_script(src)) == 2
        assert [type(s) for s in parse_script(src)] == [ast.Select, ast.Select]

    def test_semicolon_inside_string(self):
        assert len(split_script("Insert Into S (SNAME) Values ('a;b'); Select * From S")) == 2

    def test_empty_script(self):
        assert parse_script("  -- nothing\n") == []


NEGATIVE = [
    # text, line, column
    ("Create Table SP (S# Char, P# Char 5 Primary Key (S#))", 1, 25),
    ("Create Table SP (S# Char 5, S# Char 5 Primary Key (S#))", 1, 29),
    ("Create Table SP (S# Char 5 Primary Key (X))", 1, 41),
    ("Create Table SP (S# Char 5, SNAME Primary Key (S#))", 1, 29),
    ("Create Table SP (S# Char 5, SNAME From SP_ Inner Join S On (SP_.S# = S.S#) Primary Key (S#))", 1, 44),
    ("Create Table SP (S# Char 5, SNAME From SP_ Left Join S On (S# = S.S#) Primary Key (S#))", 1, 60),
    ("Create Table SP ((S#) Primary Key (S#))", 1, 18),
    ("Select From S", 1, 8),
    ("Select * From", 1, 14),
    ("Select * From S Where", 1, 22),
    ("Insert SP (S# = )", 1, 17),
    ("Select * From S Where SNAME = 'open", 1, 31),
    ("Select * From S @", 1, 17),
    ("Update S Where S# = 'S1'", 1, 10),
    ("Frobnicate S", 1, 1),
    ("Select *\nFrom S\nWhere = 3", 3, 7),
]


class TestNegativeCorpus:
    @pytest.mark.parametrize("text,line,column", NEGATIVE)
    def test_error_position(self, text, line, column):
        with pytest.raises(SqlSyntaxError) as exc:
            parse_statement(text)
        assert (exc.value.line, exc.value.column) == (line, column), str(exc.value)
        assert f"line {line}, column {column}" in str(exc.value)

    def test_two_statements_rejected_by_parse_statement(self):
        with pytest.raises(SqlSyntaxError):
            parse_statement("Select * From S; Select * From P")


# generated round trips ----------------------------------------------------------

names = st.sampled_from(["A", "B", "S#", "P#", "QTY", "CITY", "X_1"])
qualifiers = st.sampled_from(["S", "P", "SP_", "T"])
colrefs = st.builds(ast.ColumnRef, names, st.none() | qualifiers)
types = st.sampled_from([ast.DataType("INT"), ast.DataType("REAL"), ast.DataType("CHAR", 5)])
literals = st.builds(
    ast.Literal,
    st.none() | st.integers(-1000, 1000) | st.sampled_from([1.5, 0.25]) | st.text("abc' #", max_size=6),
)


@st.composite
def selects(draw):
    items = tuple(draw(st.lists(colrefs, min_size=1, max_size=4)))
    n = draw(st.integers(0, 2))
    joins = tuple(
        ast.JoinClause(f"J{i}", ast.ColumnRef(draw(names), "B0"), ast.ColumnRef(draw(names), f"J{i}"))
        for i in range(n)
    )
    preds = tuple(
        ast.Predicate(draw(colrefs), draw(st.sampled_from(["=", "<>", "<", ">=" ])), draw(literals | colrefs))
        for _ in range(draw(st.integers(0, 2)))
    )
    return ast.Select(items, ast.FromClause("B0", joins), preds)


@st.composite
def sir_tables(draw):
    stored = draw(st.lists(st.sampled_from(["K", "V1", "V2", "FK"]), min_size=1, max_size=4, unique=True))
    attrs = [ast.AttributeClause(ast.ColumnRef(n), draw(types)) for n in stored]
    inherited = draw(st.lists(st.sampled_from(["W1", "W2", "W3"]), min_size=1, max_size=3, unique=True))
    attrs += [ast.AttributeClause(ast.ColumnRef(n, draw(st.none() | st.just("F")))) for n in inherited]
    ie = ast.FromClause("T_", (ast.JoinClause("F", ast.ColumnRef(stored[0], "T_"), ast.ColumnRef("K", "F")),))
    return ast.CreateTable("T", tuple(attrs), ie, (stored[0],))


class TestGeneratedRoundTrip:
    @settings(max_examples=150, deadline=None)
    @given(selects())
    def test_select(self, stmt):
        assert parse_statement(render(stmt)) == stmt

    @settings(max_examples=100, deadline=None)
    @given(sir_tables())
    def test_sir_create(self, stmt):
        assert parse_statement(render(stmt)) == stmt

    @settings(max_examples=100, deadline=None)
    @given(st.text(alphabet="SELCTFROMWHERabc#_ ,.()=*'\n", max_size=40))
    def test_parser_fails_only_with_syntax_error(self, text):
        try:
            parse_statement(text)
        except SqlSyntaxError as exc:
            assert exc.line >= 1 and exc.column >= 1
