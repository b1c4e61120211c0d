"""Functional dependencies: closure, FK-derived dependencies, violation scanning."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ..catalog import SirSchema


@dataclass(frozen=True)
class FunctionalDependency:
    lhs: frozenset
    rhs: str

    def __post_init__(self):
        object.__setattr__(self, "lhs", frozenset(self.lhs))
        if not self.lhs:
            raise ValueError("a functional dependency needs a non-empty left-hand side")
        if self.rhs in self.lhs:
            raise ValueError(f"trivial dependency: {self.rhs} is on both sides")

    def __str__(self) -> str:
        return f"{', '.join(sorted(self.lhs))} -> {self.rhs}"

    @classmethod
    def parse(cls, text: str) -> list["FunctionalDependency"]:
        """``"S# -> SNAME, CITY"`` gives one dependency per right-hand attribute."""
        left, sep, right = text.partition("->")
        if not sep:
            raise ValueError(f"not a dependency: {text!r}")
        lhs = frozenset(a.strip() for a in left.split(",") if a.strip())
        return [cls(lhs, r.strip()) for r in right.split(",") if r.strip()]


def attribute_closure(attrs: Iterable[str], fds: Iterable[FunctionalDependency]) -> frozenset:
    closure = set(attrs)
    fds = list(fds)
    changed = True
    while changed:
        changed = False
        for fd in fds:
            if fd.rhs not in closure and fd.lhs <= closure:
                closure.add(fd.rhs)
                changed = True
    return frozenset(closure)


def derive_fds(schema: SirSchema) -> list[FunctionalDependency]:
    """``A -> x`` for every foreign key A and every attribute x inherited through it."""
    out = []
    for fk in schema.foreign_keys:
        lhs = frozenset(fk.local_attrs)
        for a in schema.inherited_attributes:
            if a.source and a.source.casefold() == fk.referenced_relation.casefold():
                out.append(FunctionalDependency(lhs, a.display))
    return out


def detect_fd_violations(relation, fd: FunctionalDependency) -> list[tuple[tuple, tuple]]:
    """Row pairs agreeing on ``fd.lhs`` but not on ``fd.rhs``.

    Rows with a NULL on either side are skipped: the dependency only binds
    tuples where both sides have a value.
    """
    lhs_idx = [relation.index(a) for a in sorted(fd.lhs)]
    rhs_idx = relation.index(fd.rhs)
    groups: dict[tuple, list[tuple]] = {}
    for row in relation.rows:
        key = tuple(row[i] for i in lhs_idx)
        if any(k is None for k in key) or row[rhs_idx] is None:
            continue
        groups.setdefault(key, []).append(row)
    witnesses = []
    for rows in groups.values():
        for i, a in enumerate(rows):
            for b in rows[i + 1:]:
                if a[rhs_idx] != b[rhs_idx]:
                    witnesses.append((a, b))
    return witnesses
