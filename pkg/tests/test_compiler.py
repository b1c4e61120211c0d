import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sirdb.catalog import INHERITED, STORED
from sirdb.compiler import (
    INVERTED,
    STANDARD,
    CompiledSir,
    PlainTable,
    add_inherited,
    apply_parentheses_mode,
    compile_create,
    compile_table,
    desugar,
    drop_inherited,
    emit_standard_sql,
    expand_fk_shorthand,
    expand_implicit_joins,
    resolved_projection,
    schema_to_create,
)
from sirdb.errors import CompileError
from sirdb.frontend import ast, parse_statement

from support import random_schema, statement_text


@pytest.fixture
def cat(sp_session):
    return sp_session.catalog


def stmt(n):
    return parse_statement(statement_text(n))


class TestGoldens:
    def test_stmt4_view_is_stmt1(self, cat):
        compiled = compile_create(stmt("4"), cat)
        view1 = stmt("1")
        assert compiled.view_ddl.name == view1.name
        assert resolved_projection(compiled.view_ddl, cat, compiled.schema) == resolved_projection(
            view1, cat, compiled.schema
        )
        assert compiled.view_ddl.select.from_ == view1.select.from_

    def test_stmt4_view_text(self, cat):
        compiled = compile_create(stmt("4"), cat)
        assert [str(i) for i in compiled.view_ddl.select.items] == ["SP_.S#", "SNAME", "P#", "QTY"]

    def test_stmt5_view_is_stmt6(self, cat):
        compiled = compile_create(stmt("5"), cat)
        assert compiled.view_ddl == stmt("6")

    def test_stmt5_stored_table(self, cat):
        compiled = compile_create(stmt("5"), cat)
        assert compiled.stored_ddl == parse_statement(
            "Create Table SP_ (S# Char 5, P# Char 5, QTY INT Primary Key (S#, P#))"
        )

    def test_stmt7_expands_to_stmt5_attributes(self, cat):
        assert expand_fk_shorthand(stmt("7"), cat).attributes == stmt("5").attributes

    def test_stmt8_expands_to_stmt7_joins(self, cat):
        assert expand_implicit_joins(stmt("8"), cat).ie == stmt("7").ie

    @pytest.mark.parametrize("n", ["5", "7", "8"])
    def test_same_schema(self, cat, n):
        assert compile_create(stmt(n), cat).schema == compile_create(stmt("5"), cat).schema

    def test_stmt3_inverted_is_stmt5(self, cat):
        assert compile_create(stmt("3"), cat, INVERTED).schema == compile_create(stmt("5"), cat).schema

    def test_stmt8_inverted_is_plain(self, cat):
        compiled = compile_create(stmt("8"), cat, INVERTED)
        assert isinstance(compiled, PlainTable)
        assert compiled.ddl == stmt("3")

    def test_stmt3_standard_is_plain(self, cat):
        compiled = compile_create(stmt("3"), cat)
        assert isinstance(compiled, PlainTable)
        assert compiled.schema.foreign_keys == ()

    def test_schema_kinds(self, cat):
        schema = compile_create(stmt("5"), cat).schema
        kinds = {a.display: a.kind for a in schema.attributes}
        assert [n for n, k in kinds.items() if k == STORED] == ["S#", "P#", "QTY"]
        assert kinds["S.CITY"] == INHERITED and kinds["P.CITY"] == INHERITED
        sources = {a.display: a.source for a in schema.inherited_attributes}
        assert sources == {
            "SNAME": "S", "STATUS": "S", "S.CITY": "S", "PNAME": "P", "COLOR": "P", "WEIGHT": "P", "P.CITY": "P",
        }
        assert [(fk.local_attrs, fk.referenced_relation) for fk in schema.foreign_keys] == [
            (("S#",), "S"), (("P#",), "P"),
        ]

    def test_inherited_types_come_from_source(self, cat):
        schema = compile_create(stmt("5"), cat).schema
        assert schema.attribute("WEIGHT").data_type == ast.DataType("REAL")
        assert schema.attribute("S.CITY").data_type == ast.DataType("CHAR", 15)

    def test_emitted_sql(self, cat):
        lines = emit_standard_sql(compile_create(stmt("5"), cat))
        assert lines == [
            "CREATE TABLE SP_ (S# CHAR(5), P# CHAR(5), QTY INT, PRIMARY KEY (S#, P#));",
            "CREATE VIEW SP AS SELECT SP_.S#, SNAME, STATUS, S.CITY, SP_.P#, PNAME, COLOR, WEIGHT, P.CITY, QTY "
            "FROM SP_ LEFT JOIN S ON SP_.S# = S.S# LEFT JOIN P ON SP_.P# = P.P#;",
        ]

    def test_emitted_sql_reparses(self, cat):
        compiled = compile_create(stmt("5"), cat)
        view = parse_statement(emit_standard_sql(compiled)[1])
        assert view == compiled.view_ddl


class TestDesugaring:
    def test_inversion_is_involution(self, cat):
        for n in ("3", "5", "7", "8"):
            s = stmt(n)
            assert apply_parentheses_mode(apply_parentheses_mode(s, INVERTED, cat), INVERTED, cat) == s

    def test_standard_mode_is_identity(self, cat):
        assert apply_parentheses_mode(stmt("8"), STANDARD, cat) == stmt("8")

    def test_unknown_mode(self, cat):
        with pytest.raises(ValueError):
            apply_parentheses_mode(stmt("3"), "sideways", cat)

    def test_inverted_leaves_non_key_types_alone(self, cat):
        inverted = apply_parentheses_mode(stmt("3"), INVERTED, cat)
        assert [a.parenthesized for a in inverted.attributes] == [True, True, False]

    @pytest.mark.parametrize("n", ["5", "7", "8"])
    def test_expansion_order_confluent(self, cat, n):
        a = expand_implicit_joins(expand_fk_shorthand(stmt(n), cat), cat)
        b = expand_fk_shorthand(expand_implicit_joins(stmt(n), cat), cat)
        assert compile_table(a, cat).schema == compile_table(b, cat).schema

    @pytest.mark.parametrize("n", ["5", "7", "8"])
    def test_desugar_idempotent(self, cat, n):
        once = desugar(stmt(n), cat)
        assert desugar(once, cat) == once

    def test_explicit_inherited_not_duplicated(self, cat):
        s = parse_statement("Create Table SP ((S# Char 5), S.CITY, P# Char 5, QTY INT Primary Key (S#, P#))")
        names = [a.column for a in expand_fk_shorthand(s, cat).attributes]
        assert names.count(ast.ColumnRef("CITY", "S")) == 1
        assert ast.ColumnRef("CITY") not in names

    def test_single_shorthand_leaves_city_unqualified(self, cat):
        s = parse_statement("Create Table SP ((S# Char 5), P# Char 5, QTY INT Primary Key (S#, P#))")
        attrs = [str(a.column) for a in expand_fk_shorthand(s, cat).attributes]
        assert attrs == ["S#", "SNAME", "STATUS", "CITY", "P#", "QTY"]

    def test_shorthand_without_keyed_relation(self, cat):
        s = parse_statement("Create Table T ((X# Char 5), Q INT Primary Key (X#))")
        with pytest.raises(CompileError, match="no relation is keyed on X#"):
            compile_create(s, cat)

    def test_composite_foreign_key_not_joined_implicitly(self, cat):
        s = parse_statement(
            "Create Table T (A Char 5, B Char 5, SNAME Primary Key (A) Foreign Key (A, B) References SP0 (S#, P#))"
        )
        with pytest.raises(CompileError, match="composite"):
            compile_create(s, cat)

    def test_existing_join_not_repeated(self, cat):
        s = stmt("7")
        assert expand_implicit_joins(s, cat).ie == s.ie


class TestCompileErrors:
    @pytest.mark.parametrize("text,message", [
        ("Create Table SP (S# Char 5, SNAME From SPX Left Join S On (SPX.S# = S.S#) Primary Key (S#))",
         "must start FROM SP_"),
        ("Create Table SP (S# Char 5, SNAME From SP_ Left Join Q On (SP_.S# = Q.S#) Primary Key (S#))",
         "unknown relation Q"),
        ("Create Table SP (S# Char 5, SNAME From SP_ Left Join S On (SP_.X = S.S#) Primary Key (S#))",
         "unknown column SP_.X"),
        ("Create Table SP (S# Char 5, SNAME From SP_ Left Join S On (SP_.S# = S.Y) Primary Key (S#))",
         "unknown column S.Y"),
        ("Create Table SP (S# Char 5, NOPE From SP_ Left Join S On (SP_.S# = S.S#) Primary Key (S#))",
         "cannot be resolved"),
        ("Create Table SP (S# Char 5, P# Char 5, CITY From SP_ Left Join S On (SP_.S# = S.S#) "
         "Left Join P On (SP_.P# = P.P#) Primary Key (S#, P#))", "ambiguous"),
        ("Create Table SP (S# Char 5, SNAME, SNAME From SP_ Left Join S On (SP_.S# = S.S#) Primary Key (S#))",
         None),
        ("Create Table SP (S# Char 5, SNAME Char 5, S.SNAME From SP_ Left Join S On (SP_.S# = S.S#) "
         "Primary Key (S#))", "collides"),
        ("Create Table SP (S# Char 5, SNAME From SP_ Left Join S On (SP_.S# = S.S#) "
         "Left Join S On (SP_.S# = S.S#) Primary Key (S#))", "joined twice"),
        ("Create Table SP (S# Char 5, SNAME From SP_ Left Join S On (P.P# = S.S#) Primary Key (S#))",
         "not joined earlier"),
    ])
    def test_rejected(self, cat, text, message):
        from sirdb.errors import SirError

        with pytest.raises(SirError) as exc:
            compile_create(parse_statement(text), cat)
        if message:
            assert message in str(exc.value)

    def test_error_leaves_catalog_unchanged(self, cat):
        before = cat
        with pytest.raises(CompileError):
            compile_create(parse_statement("Create Table T ((X# Char 5) Primary Key (X#))"), cat)
        assert cat == before


class TestChainedSir:
    def test_sir_over_sir(self, sp_session):
        sp_session.execute(statement_text("5"))
        s = parse_statement(
            "Create Table SHIP (ID INT, S# Char 5, P# Char 5, QTY, SNAME From SHIP_ "
            "Left Join SP On (SHIP_.S# = SP.S#) Primary Key (ID))"
        )
        compiled = compile_create(s, sp_session.catalog)
        assert isinstance(compiled, CompiledSir)
        assert compiled.schema.attribute("SNAME").source == "SP"


class TestAlter:
    def test_add_then_drop_returns_to_original(self, cat):
        base = compile_create(stmt("4"), cat).schema
        added = add_inherited(base, parse_statement("Alter Table SP Add S.CITY"), cat.register(base))
        assert [a.display for a in added.schema.attributes][-1] == "S.CITY"
        dropped = drop_inherited(added.schema, parse_statement("Alter Table SP Drop S.CITY"), cat)
        assert dropped.schema == base

    def test_add_with_new_join(self, cat):
        base = compile_create(stmt("4"), cat).schema
        alter = parse_statement("Alter Table SP Add PNAME From SP_ Left Join P On (SP_.P# = P.P#)")
        added = add_inherited(base, alter, cat.register(base))
        assert added.schema.ie.sources == ("SP_", "S", "P")
        assert added.schema.attribute("PNAME").source == "P"

    def test_drop_prunes_unused_join(self, cat):
        base = compile_create(stmt("5"), cat).schema
        schema = base
        for name in ("PNAME", "COLOR", "WEIGHT", "P.CITY"):
            schema = drop_inherited(schema, parse_statement(f"Alter Table SP Drop {name}"), cat).schema
        assert schema.ie.sources == ("SP_", "S")
        assert [fk.referenced_relation for fk in schema.foreign_keys] == ["S"]

    def test_drop_stored_rejected(self, cat):
        base = compile_create(stmt("5"), cat).schema
        with pytest.raises(CompileError, match="stored"):
            drop_inherited(base, parse_statement("Alter Table SP Drop QTY"), cat)

    def test_drop_last_inherited_rejected(self, cat):
        base = compile_create(stmt("4"), cat).schema
        with pytest.raises(CompileError):
            drop_inherited(base, parse_statement("Alter Table SP Drop SNAME"), cat)

    def test_add_existing_rejected(self, cat):
        base = compile_create(stmt("5"), cat).schema
        with pytest.raises(CompileError):
            add_inherited(base, parse_statement("Alter Table SP Add SNAME"), cat)

    def test_schema_to_create_round_trip(self, cat):
        schema = compile_create(stmt("5"), cat).schema
        assert compile_table(schema_to_create(schema), cat).schema == schema


class TestRandomSchemas:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10_000))
    def test_view_covers_every_attribute(self, seed):
        from sirdb import Session

        spec = random_schema(random.Random(seed))
        session = Session()
        for ddl in spec.ddl()[:-1]:
            session.execute(ddl)
        compiled = compile_create(parse_statement(spec.ddl()[-1]), session.catalog)
        assert isinstance(compiled, CompiledSir)
        items = compiled.view_ddl.select.items
        assert [i.name for i in items] == spec.view_labels
        assert [a.name for a in compiled.stored_ddl.attributes] == [n for n, _ in spec.sir.stored]
        assert {fk.referenced_relation for fk in compiled.schema.foreign_keys} == set(spec.sir.fks.values())
