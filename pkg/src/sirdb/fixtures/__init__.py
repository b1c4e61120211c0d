"""Bundled datasets.

``s-p`` is the suppliers-and-parts database: S, P and the supplies table,
loaded here as SP0 so that the name SP stays free for a SIR.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..compiler import STANDARD
from ..errors import SirError
from ..session import Session

FIXTURES = {"s-p": ("S", "P", "SP0")}


class FixtureError(SirError):
    pass


def fixture_path(name: str, filename: str) -> Path:
    if name not in FIXTURES:
        raise FixtureError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}")
    return Path(str(resources.files(__package__).joinpath(name, filename)))


def load_fixture(name: str = "s-p", mode: str = STANDARD, session: Session | None = None) -> Session:
    """Create and populate the fixture's relations in ``session`` (a new one by default)."""
    session = session or Session(mode=mode)
    # fixture DDL is written in standard notation whatever mode the session reads
    user_mode, session.mode = session.mode, STANDARD
    try:
        session.execute(fixture_path(name, "schema.sql").read_text(encoding="utf-8"))
    finally:
        session.mode = user_mode
    for table in FIXTURES[name]:
        session.load_tsv(table, fixture_path(name, f"{table}.tsv"))
    if name == "s-p":
        _check_sp(session)
    return session


def _check_sp(session: Session) -> None:
    from ..analysis.fds import FunctionalDependency, detect_fd_violations

    s = session.query("Select * From S")
    if detect_fd_violations(s, FunctionalDependency({"S#"}, "SNAME")):
        raise FixtureError("S violates S# -> SNAME")
    names = {r["S#"]: r["SNAME"] for r in s.as_dicts()}
    if names.get("S1") != "Smith":
        raise FixtureError("S1 is not Smith")
    s1 = session.query("Select * From SP0 Where S# = 'S1'")
    if len(s1.rows) != 6:
        raise FixtureError(f"SP0 holds {len(s1.rows)} supplies by S1, expected 6")
