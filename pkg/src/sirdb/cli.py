"""Command-line entry point: ``sirdb repl|run|compile|analyze|metric``."""

from __future__ import annotations

import argparse
import contextlib
import fcntl
import io
import os
import sys
from pathlib import Path
from typing import Optional, TextIO

from . import catalog as catalog_io
from .analysis import FunctionalDependency, check_normal_forms, delta, procedurality
from .compiler import MODES, STANDARD, compile_create, emit_standard_sql
from .engine import Relation
from .errors import SirError, SqlSyntaxError
from .fixtures import FIXTURES, load_fixture
from .frontend import ast, parse_statement, render, split_script, tokenize
from .router import route
from .session import Outcome, Session, SessionConfig

PROMPT = "sirdb> "
CONTINUE = "   ...> "


class CatalogLockedError(SirError):
    pass


@contextlib.contextmanager
def catalog_lock(path: Optional[str]):
    """Advisory exclusive lock on ``<catalog>.lock`` for the life of a session."""
    if not path:
        yield
        return
    lock_path = Path(str(path) + ".lock")
    with open(lock_path, "w") as fh:
        try:
            fcntl.flock(fh, fcntl.LOCK_EX | fcntl.LOCK_NB)
        except BlockingIOError:
            raise CatalogLockedError(f"catalog {path} is in use by another session") from None
        try:
            yield
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


def open_session(config: SessionConfig) -> Session:
    """Fixture first, then any relations of the saved catalog not already present."""
    session = Session(mode=config.parentheses_mode)
    if config.fixture:
        load_fixture(config.fixture, session=session)
    if config.catalog_path and Path(config.catalog_path).exists():
        saved = catalog_io.load(config.catalog_path)
        for schema in saved:
            present = session.catalog.get(schema.name)
            if present is None:
                session.adopt(schema)
            elif present != schema:
                raise SirError(f"catalog {config.catalog_path} defines {schema.name} differently from the fixture")
    return session


def save_session(session: Session, config: SessionConfig) -> None:
    if config.catalog_path:
        catalog_io.save(session.catalog, config.catalog_path)


# output ---------------------------------------------------------------------


def format_outcome(outcome: Outcome, echo_routing: bool) -> str:
    lines = []
    routed = outcome.routed
    if echo_routing:
        for note in routed.notes:
            lines.append(f"-- {note}")
        for stmt in routed.rewritten:
            lines.append(f"-- => {render(stmt)}")
    result = outcome.result
    if isinstance(result, Relation):
        lines.append(result.pretty())
        n = len(result.rows)
        lines.append(f"({n} row{'s' if n != 1 else ''})")
    elif isinstance(result, int):
        lines.append(f"{result} row{'s' if result != 1 else ''} affected")
    else:
        lines.append("OK")
    return "\n".join(lines)


def _shift(exc: SirError, line_offset: int) -> str:
    if isinstance(exc, SqlSyntaxError) and line_offset:
        exc = SqlSyntaxError(exc.message, exc.line + line_offset, exc.column, exc.expected)
    return str(exc)


def execute_text(session: Session, source: str, out: TextIO, err: TextIO, echo_routing: bool,
                 first_index: int = 1, stop_on_error: bool = True) -> tuple[int, int]:
    """Run every statement of ``source``; returns (statements run, errors)."""
    run = errors = 0
    pos = 0
    for i, chunk in enumerate(split_script(source), start=first_index):
        start = source.index(chunk, pos)
        pos = start + len(chunk)
        line_offset = source.count("\n", 0, start)
        try:
            outcome = session.run(parse_statement(chunk))
        except SirError as exc:
            errors += 1
            print(f"error: statement {i}: {_shift(exc, line_offset)}", file=err)
            if stop_on_error:
                return run, errors
            continue
        run += 1
        print(format_outcome(outcome, echo_routing), file=out)
    return run, errors


# subcommands ----------------------------------------------------------------


def cmd_run(args, config: SessionConfig, out: TextIO, err: TextIO) -> int:
    try:
        source = Path(args.script).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return 1
    with catalog_lock(config.catalog_path):
        session = open_session(config)
        _, errors = execute_text(session, source, out, err, config.echo_routing)
        save_session(session, config)
    return 1 if errors else 0


def _statement_complete(buffer: str) -> bool:
    tokens = tokenize(buffer)
    return bool(tokens) and tokens[-1].is_symbol(";")


def cmd_repl(args, config: SessionConfig, stdin: TextIO, out: TextIO, err: TextIO) -> int:
    interactive = stdin.isatty()
    echo = config.echo_routing
    count = 0
    with catalog_lock(config.catalog_path):
        session = open_session(config)
        buffer = ""
        while True:
            if interactive:
                out.write(CONTINUE if buffer else PROMPT)
                out.flush()
            line = stdin.readline()
            if not line:
                break
            stripped = line.strip()
            if not buffer and stripped.startswith("\\"):
                cmd, *rest = stripped.split()
                if cmd in ("\\quit", "\\q"):
                    break
                if cmd == "\\routing" and rest in (["on"], ["off"]):
                    echo = rest[0] == "on"
                    print(f"routing echo {rest[0]}", file=out)
                elif cmd == "\\load" and len(rest) == 2:
                    try:
                        n = session.load_tsv(rest[0], rest[1])
                        print(f"{n} rows loaded into {rest[0]}", file=out)
                    except (SirError, OSError) as exc:
                        print(f"error: {exc}", file=err)
                else:
                    print(f"error: unknown command {stripped}; try \\routing on|off, \\load REL PATH, \\quit",
                          file=err)
                continue
            buffer += line
            try:
                complete = _statement_complete(buffer)
            except SirError:
                complete = ";" in line
            if complete:
                n, errors = execute_text(session, buffer, out, err, echo, first_index=count + 1,
                                         stop_on_error=False)
                count += n + errors
                buffer = ""
        if buffer.strip():
            execute_text(session, buffer, out, err, echo, first_index=count + 1, stop_on_error=False)
        save_session(session, config)
    return 0


def cmd_compile(args, config: SessionConfig, out: TextIO, err: TextIO) -> int:
    try:
        source = Path(args.script).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return 1
    session = open_session(config)
    catalog = session.catalog
    for i, chunk in enumerate(split_script(source), start=1):
        try:
            stmt = parse_statement(chunk)
            if isinstance(stmt, ast.CreateTable):
                compiled = compile_create(stmt, catalog, config.parentheses_mode)
                catalog = catalog.register(compiled.schema)
                for line in emit_standard_sql(compiled):
                    print(line, file=out)
            else:
                catalog = route(stmt, catalog, config.parentheses_mode).catalog
        except SirError as exc:
            print(f"error: statement {i}: {exc}", file=err)
            return 1
    return 0


def cmd_analyze(args, config: SessionConfig, out: TextIO, err: TextIO) -> int:
    session = open_session(config)
    for script in args.script or ():
        try:
            source = Path(script).read_text(encoding="utf-8")
        except OSError as exc:
            print(f"error: {exc}", file=err)
            return 1
        _, errors = execute_text(session, source, io.StringIO(), err, False)
        if errors:
            return 1
    schema = session.catalog.get(args.name)
    if schema is None:
        print(f"error: unknown relation {args.name}", file=err)
        return 1
    try:
        fds = [fd for text in args.fd for fd in FunctionalDependency.parse(text)] if args.fd else None
        report = check_normal_forms(schema, fds)
    except (SirError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return 1
    print(report.to_json() if args.json else report.to_text(), file=out)
    return 0


def _read_statement(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def cmd_metric(args, config: SessionConfig, out: TextIO, err: TextIO) -> int:
    try:
        a = _read_statement(args.a)
        b = _read_statement(args.b) if args.b else None
        base = _read_statement(args.baseline) if args.baseline else None
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return 1
    if base is not None and b is None:
        print("error: --baseline needs a second statement B", file=err)
        return 1
    pa = procedurality(a).p
    print(f"p = {pa}", file=out)
    if b is not None:
        print(f"p(B) = {procedurality(b).p}", file=out)
        d = delta(b, base) if base is not None else delta(a, b)
        print(f"delta = {d}", file=out)
        if d:
            print(f"ratio = {pa / d:g}", file=out)
    return 0


# argument parsing -------------------------------------------------------------


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes", "on")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=MODES, default=os.environ.get("SIRDB_MODE", STANDARD),
                        help="reading of parenthesized attributes in CREATE TABLE (env SIRDB_MODE)")
    common.add_argument("--catalog", default=os.environ.get("SIRDB_CATALOG"),
                        help="catalog JSON file, loaded if present and saved on exit (env SIRDB_CATALOG)")
    common.add_argument("--fixture", choices=sorted(FIXTURES), default=os.environ.get("SIRDB_FIXTURE"),
                        help="preload a bundled dataset (env SIRDB_FIXTURE)")
    common.add_argument("--echo-routing", action="store_true", default=_env_flag("SIRDB_ECHO_ROUTING"),
                        help="print routing notes and rewritten statements (env SIRDB_ECHO_ROUTING)")

    parser = argparse.ArgumentParser(prog="sirdb", description="Stored and inherited relations over an "
                                     "embedded relational engine.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("repl", parents=[common], help="interactive SQL shell")
    p = sub.add_parser("run", parents=[common], help="execute a SQL script")
    p.add_argument("script")
    p = sub.add_parser("compile", parents=[common], help="print the standard SQL a script compiles to")
    p.add_argument("script")
    p = sub.add_parser("analyze", parents=[common], help="2NF/3NF report, classic and amended")
    p.add_argument("name")
    p.add_argument("--fd", action="append", help="functional dependency 'A, B -> C' (repeatable)")
    p.add_argument("--script", action="append", help="SQL script run before the analysis (repeatable)")
    p.add_argument("--json", action="store_true")
    p = sub.add_parser("metric", help="procedurality p of statement A, and delta/ratio against B")
    p.add_argument("a", metavar="A")
    p.add_argument("b", metavar="B", nargs="?")
    p.add_argument("--baseline", help="measure delta as p(B) - p(BASELINE) instead of p(A) - p(B)")
    return parser


def main(argv: Optional[list[str]] = None, stdin: TextIO = None, stdout: TextIO = None,
         stderr: TextIO = None) -> int:
    stdin = stdin or sys.stdin
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    config = SessionConfig(
        parentheses_mode=getattr(args, "mode", STANDARD),
        catalog_path=getattr(args, "catalog", None),
        echo_routing=getattr(args, "echo_routing", False),
        fixture=getattr(args, "fixture", None),
    )
    try:
        if args.command == "repl":
            return cmd_repl(args, config, stdin, out, err)
        if args.command == "run":
            return cmd_run(args, config, out, err)
        if args.command == "compile":
            return cmd_compile(args, config, out, err)
        if args.command == "analyze":
            return cmd_analyze(args, config, out, err)
        return cmd_metric(args, config, out, err)
    except SirError as exc:
        print(f"error: {exc}", file=err)
        return 1


if __name__ == "__main__":
    sys.exit(main())
