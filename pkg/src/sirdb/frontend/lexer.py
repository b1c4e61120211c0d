"""Tokenizer for the supported SQL subset.

Identifiers are runs of letters, digits, ``_`` and ``#`` (``S#``, ``SP_``).
A run made only of digits is a number; ``.`` between two digit runs makes it
a real.  Whitespace and ``--`` comments are not tokens, but every token keeps
its offset so the original text can be reassembled exactly.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass


class TokenKind(enum.Enum):
    KEYWORD = "keyword"
    IDENTIFIER = "identifier"
    SYMBOL = "symbol"
    NUMBER = "number"
    STRING = "string"
    ERROR = "error"


KEYWORDS = frozenset(
    """
    ADD ALTER AND AS CHAR CREATE DELETE DROP FOREIGN FROM INSERT INT INTO JOIN
    KEY LEFT NULL ON OUTER PRIMARY REAL REFERENCES SELECT SET TABLE UPDATE
    VALUES VIEW WHERE
    """.split()
)

SYMBOLS = ("<=", ">=", "<>", "!=", "(", ")", ",", ";", ".", "=", "<", ">", "*", "-")

_TRIVIA = re.compile(r"(?:\s+|--[^\n]*)+")
_WORD = re.compile(r"[A-Za-z0-9_#]+")
_DIGITS = re.compile(r"[0-9]+")
_STRING = re.compile(r"'(?:[^']|'')*'")


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    line: int
    column: int
    offset: int

    @property
    def upper(self) -> str:
        return self.text.upper()

    def is_keyword(self, *words: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.upper in words

    def is_symbol(self, *symbols: str) -> bool:
        return self.kind is TokenKind.SYMBOL and self.text in symbols


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens; unknown characters become ERROR tokens."""
    tokens: list[Token] = []
    pos = 0
    line, line_start = 1, 0
    n = len(source)

    def advance_lines(start: int, end: int) -> None:
        nonlocal line, line_start
        count = source.count("\n", start, end)
        if count:
            line += count
            line_start = source.rindex("\n", start, end) + 1

    while pos < n:
        m = _TRIVIA.match(source, pos)
        if m:
            advance_lines(pos, m.end())
            pos = m.end()
            continue
        col = pos - line_start + 1
        ch = source[pos]
        if m := _WORD.match(source, pos):
            text = m.group()
            if _DIGITS.fullmatch(text):
                frac = _DIGITS.match(source, m.end() + 1) if source.startswith(".", m.end()) else None
                if frac and not _WORD.match(source, frac.end()):
                    text = source[pos:frac.end()]
                kind = TokenKind.NUMBER
            elif text.upper() in KEYWORDS:
                kind = TokenKind.KEYWORD
            else:
                kind = TokenKind.IDENTIFIER
        elif ch == "'":
            m = _STRING.match(source, pos)
            if m:
                text, kind = m.group(), TokenKind.STRING
            else:
                text, kind = source[pos:], TokenKind.ERROR
        else:
            sym = next((s for s in SYMBOLS if source.startswith(s, pos)), None)
            if sym is not None:
                text, kind = sym, TokenKind.SYMBOL
            else:
                text, kind = ch, TokenKind.ERROR
        tokens.append(Token(kind, text, line, col, pos))
        advance_lines(pos, pos + len(text))
        pos += len(text)
    return tokens


def reassemble(source: str, tokens: list[Token]) -> str:
    """Rebuild ``source`` from its tokens plus the gaps between them."""
    parts = []
    cursor = 0
    for tok in tokens:
        parts.append(source[cursor:tok.offset])
        parts.append(tok.text)
        cursor = tok.offset + len(tok.text)
    parts.append(source[cursor:])
    return "".join(parts)
