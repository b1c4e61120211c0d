"""sirdb: stored and inherited relations on an embedded relational engine."""

from .catalog import Catalog, SirSchema
from .compiler import compile_create, emit_standard_sql
from .frontend import parse_script, parse_statement, render, tokenize
from .router import route, route_script
from .session import Session, SessionConfig

__version__ = "0.1.0"

__all__ = [
    "Catalog",
    "Session",
    "SessionConfig",
    "SirSchema",
    "compile_create",
    "emit_standard_sql",
    "parse_script",
    "parse_statement",
    "render",
    "route",
    "route_script",
    "tokenize",
]
