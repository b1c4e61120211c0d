"""SQL front end: tokenizer, parser and renderer."""

from . import ast
from .lexer import Token, TokenKind, reassemble, tokenize
from .parser import parse_script, parse_statement, split_script
from .render import render, render_ansi, render_value

__all__ = [
    "Token",
    "TokenKind",
    "ast",
    "parse_script",
    "parse_statement",
    "reassemble",
    "render",
    "render_ansi",
    "render_value",
    "split_script",
    "tokenize",
]
