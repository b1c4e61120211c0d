"""Schema metadata for stored, inherited and view relations, with JSON persistence.

A SIR named ``R`` lives inside the engine as the stored table ``R_`` (its
stored attributes only) plus the view ``R``.  The catalog keeps one entry per
visible name and derives the hidden stored schema on demand.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional

from .errors import (
    CatalogVersionError,
    DanglingReferenceError,
    DuplicateNameError,
    MalformedCatalogError,
    SqlSyntaxError,
    UnknownRelationError,
)
from .frontend import ast, parse_statement, render

FORMAT_VERSION = 1

STORED = "SA"
INHERITED = "IA"


def hidden_name(name: str) -> str:
    return name + "_"


@dataclass(frozen=True)
class Attribute:
    name: str
    kind: str = STORED
    qualifier: Optional[str] = None
    data_type: Optional[ast.DataType] = None
    # relation an inherited value is read from
    source: Optional[str] = None

    @property
    def display(self) -> str:
        return f"{self.qualifier}.{self.name}" if self.qualifier else self.name

    @property
    def stored(self) -> bool:
        return self.kind == STORED

    @property
    def ref(self) -> ast.ColumnRef:
        return ast.ColumnRef(self.name, self.qualifier)


@dataclass(frozen=True)
class ForeignKey:
    local_attrs: tuple[str, ...]
    referenced_relation: str
    referenced_key: tuple[str, ...]

    def __post_init__(self):
        if len(self.local_attrs) != len(self.referenced_key):
            raise ValueError("foreign key arity does not match the referenced key")

    @property
    def same_name_convention(self) -> bool:
        return all(ast.same_name(a, b) for a, b in zip(self.local_attrs, self.referenced_key))


@dataclass(frozen=True)
class SirSchema:
    """A relation schema; ``ie`` is set for SIRs, ``definition`` for plain views."""

    name: str
    attributes: tuple[Attribute, ...]
    primary_key: tuple[str, ...] = ()
    foreign_keys: tuple[ForeignKey, ...] = ()
    ie: Optional[ast.FromClause] = None
    definition: Optional[ast.Select] = None

    @property
    def kind(self) -> str:
        if self.definition is not None:
            return "view"
        return "sir" if self.ie is not None else "plain"

    @property
    def is_sir(self) -> bool:
        return self.ie is not None

    @property
    def hidden_name(self) -> Optional[str]:
        return hidden_name(self.name) if self.is_sir else None

    @property
    def stored_attributes(self) -> tuple[Attribute, ...]:
        return tuple(a for a in self.attributes if a.stored)

    @property
    def inherited_attributes(self) -> tuple[Attribute, ...]:
        return tuple(a for a in self.attributes if not a.stored)

    def attribute(self, ref: ast.ColumnRef | str) -> Optional[Attribute]:
        """Look an attribute up by proper name; unqualified names must be unique."""
        if isinstance(ref, str):
            qual, _, name = ref.rpartition(".")
            ref = ast.ColumnRef(name, qual or None)
        hits = [
            a for a in self.attributes
            if ast.same_name(a.name, ref.name)
            and (ref.qualifier is None or ast.same_name(a.qualifier, ref.qualifier))
        ]
        return hits[0] if len(hits) == 1 else None

    def stored_schema(self) -> "SirSchema":
        """Schema of the hidden stored relation ``R_``."""
        return SirSchema(hidden_name(self.name), self.stored_attributes, self.primary_key)

    def references(self) -> set[str]:
        """Names of other relations this schema depends on (casefolded)."""
        refs = {fk.referenced_relation.casefold() for fk in self.foreign_keys}
        if self.ie is not None:
            refs.update(j.right.casefold() for j in self.ie.joins)
        if self.definition is not None:
            refs.update(s.casefold() for s in self.definition.from_.sources)
        return refs


@dataclass(frozen=True)
class Resolution:
    schema: SirSchema
    target: str  # "view" | "stored"
    object_name: str
    hidden: bool = False


@dataclass(frozen=True)
class Catalog:
    """Immutable, insertion-ordered collection of relation schemas."""

    relations: tuple[SirSchema, ...] = field(default=())

    def __iter__(self) -> Iterator[SirSchema]:
        return iter(self.relations)

    def __len__(self) -> int:
        return len(self.relations)

    def __contains__(self, name: str) -> bool:
        return self.get(name) is not None

    def names(self) -> set[str]:
        """All visible and hidden names, casefolded."""
        out = set()
        for s in self.relations:
            out.add(s.name.casefold())
            if s.hidden_name:
                out.add(s.hidden_name.casefold())
        return out

    def get(self, name: str) -> Optional[SirSchema]:
        for s in self.relations:
            if ast.same_name(s.name, name):
                return s
        return None

    def owner_of_hidden(self, name: str) -> Optional[SirSchema]:
        for s in self.relations:
            if s.hidden_name and ast.same_name(s.hidden_name, name):
                return s
        return None

    def lookup(self, name: str) -> Optional[SirSchema]:
        """Schema answering to ``name``, hidden stored relations included."""
        schema = self.get(name)
        if schema is not None:
            return schema
        owner = self.owner_of_hidden(name)
        return owner.stored_schema() if owner is not None else None

    def resolve(self, name: str) -> Resolution:
        schema = self.get(name)
        if schema is not None:
            if schema.kind == "plain":
                return Resolution(schema, "stored", schema.name)
            return Resolution(schema, "view", schema.name)
        owner = self.owner_of_hidden(name)
        if owner is not None:
            return Resolution(owner.stored_schema(), "stored", owner.hidden_name, hidden=True)
        raise UnknownRelationError(f"unknown relation {name}")

    def register(self, schema: SirSchema) -> "Catalog":
        taken = self.names()
        for n in filter(None, (schema.name, schema.hidden_name)):
            if n.casefold() in taken:
                raise DuplicateNameError(f"relation name {n} is already in use")
        self._check_references(schema)
        return Catalog(self.relations + (schema,))

    def replace(self, schema: SirSchema) -> "Catalog":
        """Swap in a new definition for an existing name (used by ALTER)."""
        self._check_references(schema)
        out, found = [], False
        for s in self.relations:
            if ast.same_name(s.name, schema.name):
                out.append(schema)
                found = True
            else:
                out.append(s)
        if not found:
            raise UnknownRelationError(f"unknown relation {schema.name}")
        return Catalog(tuple(out))

    def remove(self, name: str) -> "Catalog":
        target = self.get(name)
        if target is None:
            raise UnknownRelationError(f"unknown relation {name}")
        dependents = [
            s.name for s in self.relations
            if s is not target and target.name.casefold() in s.references()
        ]
        if dependents:
            raise DanglingReferenceError(
                f"cannot drop {target.name}: still referenced by {', '.join(dependents)}"
            )
        return Catalog(tuple(s for s in self.relations if s is not target))

    def dependents_of(self, name: str) -> list[str]:
        return [s.name for s in self.relations if name.casefold() in s.references()]

    def _check_references(self, schema: SirSchema) -> None:
        own = {schema.name.casefold()}
        if schema.hidden_name:
            own.add(schema.hidden_name.casefold())
        if schema.ie is not None:
            if not ast.same_name(schema.ie.source, schema.hidden_name):
                raise DanglingReferenceError(
                    f"inheritance expression of {schema.name} must start from {schema.hidden_name}"
                )
            for j in schema.ie.joins:
                if j.right.casefold() in own or self.lookup(j.right) is None:
                    raise DanglingReferenceError(f"{schema.name} inherits from unknown relation {j.right}")
        for fk in schema.foreign_keys:
            if self.lookup(fk.referenced_relation) is None:
                raise DanglingReferenceError(
                    f"foreign key of {schema.name} references unknown relation {fk.referenced_relation}"
                )
        if schema.definition is not None:
            for src in schema.definition.from_.sources:
                if self.lookup(src) is None:
                    raise DanglingReferenceError(f"view {schema.name} reads unknown relation {src}")


# persistence ---------------------------------------------------------------


def _attr_to_json(a: Attribute) -> dict:
    out: dict = {"name": a.name}
    if a.qualifier:
        out["qualifier"] = a.qualifier
    out["kind"] = a.kind
    if a.data_type is not None:
        out["type"] = a.data_type.name
        if a.data_type.length is not None:
            out["length"] = a.data_type.length
    if a.source:
        out["source"] = a.source
    return out


def _schema_to_json(s: SirSchema) -> dict:
    out: dict = {"name": s.name}
    if s.hidden_name:
        out["hidden_name"] = s.hidden_name
    out["attributes"] = [_attr_to_json(a) for a in s.attributes]
    out["primary_key"] = list(s.primary_key)
    out["foreign_keys"] = [
        {"attrs": list(fk.local_attrs), "references": fk.referenced_relation, "key": list(fk.referenced_key)}
        for fk in s.foreign_keys
    ]
    if s.ie is not None:
        out["ie"] = {
            "base": s.ie.source,
            "joins": [{"right": j.right, "on": [str(j.left_col), str(j.right_col)]} for j in s.ie.joins],
        }
    if s.definition is not None:
        out["view"] = render(s.definition)
    return out


def to_json(catalog: Catalog) -> str:
    doc = {"version": FORMAT_VERSION, "relations": [_schema_to_json(s) for s in catalog]}
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _colref(text: str) -> ast.ColumnRef:
    qual, _, name = text.rpartition(".")
    if not name:
        raise MalformedCatalogError(f"bad column reference {text!r}")
    return ast.ColumnRef(name, qual or None)


def _schema_from_json(d: dict) -> SirSchema:
    attrs = []
    for a in d["attributes"]:
        kind = a["kind"]
        if kind not in (STORED, INHERITED):
            raise MalformedCatalogError(f"unknown attribute kind {kind!r}")
        dt = ast.DataType(a["type"], a.get("length")) if "type" in a else None
        attrs.append(Attribute(a["name"], kind, a.get("qualifier"), dt, a.get("source")))
    fks = tuple(
        ForeignKey(tuple(fk["attrs"]), fk["references"], tuple(fk["key"])) for fk in d.get("foreign_keys", [])
    )
    ie = None
    if "ie" in d:
        joins = []
        for j in d["ie"]["joins"]:
            left, right = j["on"]
            joins.append(ast.JoinClause(j["right"], _colref(left), _colref(right)))
        ie = ast.FromClause(d["ie"]["base"], tuple(joins))
    definition = None
    if "view" in d:
        definition = parse_statement(d["view"])
        if not isinstance(definition, ast.Select):
            raise MalformedCatalogError(f"view {d['name']} is not a SELECT")
    schema = SirSchema(d["name"], tuple(attrs), tuple(d["primary_key"]), fks, ie, definition)
    if d.get("hidden_name") != schema.hidden_name:
        raise MalformedCatalogError(f"hidden name of {schema.name} does not follow the R_ rule")
    return schema


def from_json(text: str) -> Catalog:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedCatalogError(f"catalog file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "version" not in doc:
        raise MalformedCatalogError("catalog file has no version field")
    if doc["version"] != FORMAT_VERSION:
        raise CatalogVersionError(f"unsupported catalog format version {doc['version']!r}")
    catalog = Catalog()
    try:
        for entry in doc["relations"]:
            catalog = catalog.register(_schema_from_json(entry))
    except (KeyError, TypeError, ValueError, SqlSyntaxError) as exc:
        raise MalformedCatalogError(f"malformed catalog entry: {exc}") from exc
    return catalog


def save(catalog: Catalog, path: str | os.PathLike) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(to_json(catalog), encoding="utf-8")
    os.replace(tmp, path)


def load(path: str | os.PathLike) -> Catalog:
    return from_json(Path(path).read_text(encoding="utf-8"))
