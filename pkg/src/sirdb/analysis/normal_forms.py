"""Classic and amended 2NF/3NF checks.

The classic verdicts treat every attribute as stored.  The amended verdicts
look only at the projection on stored attributes: both the attribute set and
the dependencies (projected through the full closure) are restricted to it.
Prime attributes are those of the declared primary key.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Iterable, Optional

from ..catalog import SirSchema
from ..errors import SirError
from .fds import FunctionalDependency, attribute_closure, derive_fds

PARTIAL = "partial"
TRANSITIVE = "transitive"
MAX_PROJECTED_ATTRIBUTES = 18


@dataclass(frozen=True)
class Violation:
    fd: FunctionalDependency
    kind: str
    attribute_kind: str

    def to_dict(self) -> dict:
        return {"fd": str(self.fd), "kind": self.kind, "attribute_kind": self.attribute_kind}


@dataclass(frozen=True)
class NormalFormReport:
    relation: str
    classic_2nf: bool
    amended_2nf: bool
    classic_3nf: bool
    amended_3nf: bool
    violations: tuple[Violation, ...] = field(default=())
    amended_violations: tuple[Violation, ...] = field(default=())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["violations"] = [v.to_dict() for v in self.violations]
        d["amended_violations"] = [v.to_dict() for v in self.amended_violations]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    def to_text(self) -> str:
        yn = lambda b: "yes" if b else "no"
        lines = [
            f"relation {self.relation}",
            f"  2NF  classic: {yn(self.classic_2nf):3}  amended: {yn(self.amended_2nf)}",
            f"  3NF  classic: {yn(self.classic_3nf):3}  amended: {yn(self.amended_3nf)}",
        ]
        for title, vs in (("classic", self.violations), ("amended", self.amended_violations)):
            for v in vs:
                lines.append(f"  {title} violation: {v.fd} ({v.kind}, {v.attribute_kind})")
        return "\n".join(lines)


def _analyse(attrs, key, kinds, fds) -> tuple[bool, bool, list[Violation]]:
    """(2NF, 3NF, violations) for ``attrs`` under ``fds`` with primary key ``key``."""
    attrs = frozenset(attrs)
    key = frozenset(key)
    violations = []
    partial_seen: set[tuple[frozenset, str]] = set()
    for size in range(1, len(key)):
        for subset in combinations(sorted(key), size):
            x = frozenset(subset)
            for a in sorted((attribute_closure(x, fds) & attrs) - x - key):
                if any(y < x and b == a for y, b in partial_seen):
                    continue
                partial_seen.add((x, a))
                violations.append(Violation(FunctionalDependency(x, a), PARTIAL, kinds[a]))
    second = not violations
    transitive = []
    for fd in fds:
        if fd.rhs in key or fd.rhs not in attrs or not fd.lhs <= attrs:
            continue
        if attribute_closure(fd.lhs, fds) >= attrs:
            continue
        if fd.lhs < key:
            continue  # already reported as partial
        transitive.append(Violation(fd, TRANSITIVE, kinds[fd.rhs]))
    third = second and not transitive
    return second, third, violations + transitive


def project_fds(fds, attrs: Iterable[str], onto: Iterable[str]) -> list[FunctionalDependency]:
    """Minimal-left-side dependencies holding within ``onto``, derived through all of ``fds``."""
    onto = sorted(set(onto))
    if len(onto) > MAX_PROJECTED_ATTRIBUTES:
        raise SirError(f"projection onto {len(onto)} attributes is too large to enumerate")
    target = frozenset(onto)
    found: list[FunctionalDependency] = []
    for size in range(1, len(onto)):
        for subset in combinations(onto, size):
            x = frozenset(subset)
            for a in sorted((attribute_closure(x, fds) & target) - x):
                if any(fd.rhs == a and fd.lhs < x for fd in found):
                    continue
                found.append(FunctionalDependency(x, a))
    return found


def _resolve_names(schema: SirSchema, fds) -> list[FunctionalDependency]:
    by_fold = {a.display.casefold(): a.display for a in schema.attributes}

    def name(n: str) -> str:
        try:
            return by_fold[n.casefold()]
        except KeyError:
            raise SirError(f"dependency names unknown attribute {n} of {schema.name}") from None

    return [FunctionalDependency(frozenset(name(x) for x in fd.lhs), name(fd.rhs)) for fd in fds]


def check_normal_forms(schema: SirSchema, fds: Optional[Iterable[FunctionalDependency]] = None) -> NormalFormReport:
    """Classic and amended verdicts; ``fds`` defaults to the foreign-key derived ones."""
    if not schema.primary_key:
        raise SirError(f"{schema.name} has no primary key")
    fds = _resolve_names(schema, derive_fds(schema) if fds is None else fds)
    attrs = [a.display for a in schema.attributes]
    kinds = {a.display: a.kind for a in schema.attributes}
    key = [schema.attribute(k).display for k in schema.primary_key]
    with_key = fds + [FunctionalDependency(frozenset(key), a) for a in attrs if a not in key]

    c2, c3, cv = _analyse(attrs, key, kinds, with_key)
    stored = [a.display for a in schema.stored_attributes]
    projected = project_fds(with_key, attrs, stored)
    a2, a3, av = _analyse(stored, key, kinds, projected)
    return NormalFormReport(schema.name, c2, a2, c3, a3, tuple(cv), tuple(av))
