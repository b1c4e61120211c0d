"""Character-count procedurality of a statement.

A statement is reduced to the characters it cannot do without: its tokens,
with a single space only where two neighbouring tokens would otherwise fuse
(``CREATE TABLE`` keeps its space, ``SP_.S#,`` needs none), and no trailing
semicolon.  Layout and letter case therefore never change the score.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from ..frontend import tokenize


@dataclass(frozen=True)
class ProceduralityScore:
    text: str
    p: int


@lru_cache(maxsize=4096)
def _needs_space(a: str, b: str) -> bool:
    return [t.text for t in tokenize(a + b)] != [a, b]


def normalize(text: str) -> str:
    tokens = [t.text for t in tokenize(text)]
    while tokens and tokens[-1] == ";":
        tokens.pop()
    out = []
    for i, tok in enumerate(tokens):
        if i and _needs_space(tokens[i - 1], tok):
            out.append(" ")
        out.append(tok)
    return "".join(out)


def procedurality(text: str) -> ProceduralityScore:
    return ProceduralityScore(text, len(normalize(text)))


def delta(text: str, baseline: str) -> int:
    """Extra characters ``text`` costs over ``baseline``."""
    return procedurality(text).p - procedurality(baseline).p


def ratio(text: str, other: str) -> float:
    return procedurality(text).p / procedurality(other).p
