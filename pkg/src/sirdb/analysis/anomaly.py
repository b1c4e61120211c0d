"""Update-anomaly simulation on the suppliers-and-parts fixture.

Renames one supplier two ways: with SNAME stored redundantly in every supply
row, and with SNAME inherited by SIR SP from S.  Each write is a real
statement executed through the SIR layer.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..frontend import ast
from .fds import FunctionalDependency, detect_fd_violations

DENORMALIZED = "denormalized-SA"
SIR = "sir"

SIR_SP = (
    "Create Table SP (S# Char 5, SNAME, STATUS, S.CITY, P# Char 5, PNAME, COLOR, WEIGHT, P.CITY, "
    "QTY INT From SP_ Left Join S On (SP_.S# = S.S#) LEFT JOIN P On (SP_.P# = P.P#) Primary Key (S#, P#))"
)
STORED_SNAME_SP = "Create Table SP (S# Char 5, SNAME Char 20, P# Char 5, QTY INT Primary Key (S#, P#))"

SNAME_FD = FunctionalDependency(frozenset({"S#"}), "SNAME")


@dataclass(frozen=True)
class AnomalyReport:
    mode: str
    writes_required: int
    writes_performed: int
    consistent: bool


def _lit(v) -> ast.Literal:
    return ast.Literal(v)


def simulate_anomaly(mode: str, supplier: str = "S1", new_name: str = "Smyth", skip: int = 0) -> AnomalyReport:
    """Rename ``supplier`` to ``new_name``, leaving ``skip`` of the required writes undone."""
    from ..fixtures import fixture_path, load_fixture

    session = load_fixture("s-p")
    if mode == DENORMALIZED:
        session.execute(STORED_SNAME_SP)
        joined = session.query("Select SP0.S#, SNAME, SP0.P#, QTY From SP0 Left Join S On (SP0.S# = S.S#)")
        for row in joined.rows:
            session.run(ast.Insert("SP", ("S#", "SNAME", "P#", "QTY"), tuple(map(_lit, row))))
        targets = session.query(f"Select P# From SP Where S# = '{supplier}'").rows
        performed = 0
        for (part,) in targets[skip:]:
            update = ast.Update(
                "SP",
                (ast.Assignment("SNAME", _lit(new_name)),),
                (ast.Predicate(ast.ColumnRef("S#"), "=", _lit(supplier)),
                 ast.Predicate(ast.ColumnRef("P#"), "=", _lit(part))),
            )
            performed += session.run(update).result
        visible = session.query("Select * From SP")
        consistent = not detect_fd_violations(visible, SNAME_FD)
        return AnomalyReport(mode, len(targets), performed, consistent)

    if mode == SIR:
        session.execute(SIR_SP)
        session.load_tsv("SP", fixture_path("s-p", "SP0.tsv"))
        update = ast.Update(
            "S",
            (ast.Assignment("SNAME", _lit(new_name)),),
            (ast.Predicate(ast.ColumnRef("S#"), "=", _lit(supplier)),),
        )
        required = 1
        performed = session.run(update).result if skip < required else 0
        visible = session.query("Select * From SP")
        names = {r["SNAME"] for r in visible.as_dicts() if r["S#"] == supplier}
        consistent = not detect_fd_violations(visible, SNAME_FD) and len(names) <= 1
        return AnomalyReport(mode, required, performed, consistent)

    raise ValueError(f"unknown anomaly mode {mode!r}")
