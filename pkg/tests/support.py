"""Independent oracles and random generators shared by the test suites.

Nothing here imports the engine, compiler or analysis code it is used to
check; the oracles work on plain lists and dicts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

DATA = Path(__file__).parent / "data"

STATEMENTS = ("1", "3", "4", "5", "6", "7", "8")


def statement_text(n: str) -> str:
    return (DATA / f"stmt{n}.sql").read_text(encoding="utf-8").strip()


# oracles ----------------------------------------------------------------------


def nested_loop_left_join(left: list[tuple], right: list[tuple], li: int, ri: int, width: int) -> list[tuple]:
    """Textbook LEFT OUTER JOIN on left[li] = right[ri]; NULL matches nothing; ``width`` = right arity."""
    out = []
    for lrow in left:
        hits = [lrow + rrow for rrow in right if lrow[li] is not None and lrow[li] == rrow[ri]]
        out.extend(hits or [lrow + (None,) * width])
    return out


def closure_oracle(attrs: frozenset, fds: list[tuple[frozenset, str]], universe: frozenset) -> frozenset:
    """X+ through two-tuple relations: A is in X+ iff every FD-closed agreement set containing X has A."""
    result = set(universe)
    rest = sorted(universe - attrs)
    for size in range(len(rest) + 1):
        for extra in combinations(rest, size):
            agree = attrs | frozenset(extra)
            if all(rhs in agree for lhs, rhs in fds if lhs <= agree):
                result &= agree
    return frozenset(result)


def fd_violation_pairs(rows: list[dict], lhs: tuple[str, ...], rhs: str) -> set[tuple[int, int]]:
    """All row index pairs agreeing on lhs but holding two different rhs values.

    NULLs on either side bind nothing.
    """
    pairs = set()
    for i, j in combinations(range(len(rows)), 2):
        a, b = rows[i], rows[j]
        if any(a[x] is None or b[x] is None for x in lhs) or a[rhs] is None or b[rhs] is None:
            continue
        if all(a[x] == b[x] for x in lhs) and a[rhs] != b[rhs]:
            pairs.add((i, j))
    return pairs


def normal_forms_oracle(attrs: list[str], key: list[str], fds) -> tuple[bool, bool]:
    """(2NF, 3NF) by enumerating every left-hand side; prime means primary-key attribute."""
    universe = frozenset(attrs)
    keyset = frozenset(key)
    nonprime = universe - keyset
    second = True
    for size in range(1, len(key)):
        for part in combinations(sorted(keyset), size):
            if closure_oracle(frozenset(part), fds, universe) & nonprime:
                second = False
    third = second
    for size in range(1, len(attrs)):
        for lhs in combinations(sorted(universe), size):
            x = frozenset(lhs)
            cl = closure_oracle(x, fds, universe)
            if cl != universe and (cl - x) & nonprime:
                third = False
    return second, third


# random SIR schemas -----------------------------------------------------------


@dataclass
class RelSpec:
    name: str
    key: str
    # (name, sql type) in declaration order, key first
    columns: list[tuple[str, str]]
    rows: list[tuple] = field(default_factory=list)


@dataclass
class SirSpec:
    name: str
    key: str
    stored: list[tuple[str, str]]
    # stored FK column -> referenced relation
    fks: dict[str, str]
    # (referenced relation, attribute) pairs in declared order
    inherited: list[tuple[str, str]]
    rows: list[tuple] = field(default_factory=list)

    @property
    def hidden(self) -> str:
        return self.name + "_"


@dataclass
class RandomSchema:
    referenced: list[RelSpec]
    sir: SirSpec

    def ddl(self) -> list[str]:
        out = []
        for r in self.referenced:
            cols = ", ".join(f"{n} {t}" for n, t in r.columns)
            out.append(f"Create Table {r.name} ({cols} Primary Key ({r.key}))")
        s = self.sir
        attrs = [f"{n} {t}" for n, t in s.stored]
        attrs += [f"{rel}.{a}" for rel, a in s.inherited]
        joins = " ".join(
            f"Left Join {rel} On ({s.hidden}.{col} = {rel}.{self.ref(rel).key})" for col, rel in s.fks.items()
        )
        out.append(f"Create Table {s.name} ({', '.join(attrs)} From {s.hidden} {joins} Primary Key ({s.key}))")
        return out

    def ref(self, name: str) -> RelSpec:
        return next(r for r in self.referenced if r.name == name)

    def expected_view_rows(self) -> list[tuple]:
        """SIR rows by dictionary lookup: stored values, then each IA read through its FK."""
        s = self.sir
        stored_names = [n for n, _ in s.stored]
        fk_for = {rel: col for col, rel in s.fks.items()}
        index = {
            r.name: {row[0]: dict(zip([n for n, _ in r.columns], row)) for row in r.rows}
            for r in self.referenced
        }
        out = []
        for row in s.rows:
            sa = dict(zip(stored_names, row))
            values = list(row)
            for rel, attr in s.inherited:
                target = index[rel].get(sa[fk_for[rel]])
                values.append(None if target is None else target[attr])
            out.append(tuple(values))
        return out

    @property
    def view_labels(self) -> list[str]:
        return [n for n, _ in self.sir.stored] + [a for _, a in self.sir.inherited]


def _value(rng: random.Random, sql_type: str):
    if sql_type == "INT":
        return rng.randint(-3, 9)
    if sql_type == "REAL":
        return rng.choice([0.5, 1.0, 2.25, -1.5])
    return rng.choice(["a", "b", "c", "dd", "x y", "O'Hara"])


def random_schema(rng: random.Random) -> RandomSchema:
    """Up to 3 referenced relations plus one SIR; every relation has at most 8 attributes."""
    n_ref = rng.randint(1, 3)
    referenced = []
    for i in range(n_ref):
        name = f"F{i}"
        key_type = rng.choice(["INT", "CHAR 4"])
        cols = [(f"K{i}", key_type)]
        for j in range(rng.randint(1, 5)):
            cols.append((f"A{i}{j}", rng.choice(["INT", "CHAR 6", "REAL"])))
        keys = rng.sample(range(12), rng.randint(0, 8))
        rows = []
        for k in keys:
            key = k if key_type == "INT" else f"k{k}"
            rest = tuple(None if rng.random() < 0.15 else _value(rng, t) for _, t in cols[1:])
            rows.append((key,) + rest)
        referenced.append(RelSpec(name, f"K{i}", cols, rows))

    stored = [("ID", "INT")]
    fks = {}
    for r in referenced:
        if rng.random() < 0.85 or not fks:
            col = f"FK_{r.name}"
            stored.append((col, r.columns[0][1]))
            fks[col] = r.name
    budget = 8 - len(stored)
    for j in range(rng.randint(0, min(2, budget - 1))):
        stored.append((f"V{j}", rng.choice(["INT", "CHAR 6"])))
    budget = 8 - len(stored)
    candidates = [(r.name, n) for r in referenced if r.name in fks.values() for n, _ in r.columns[1:]]
    inherited = rng.sample(candidates, rng.randint(1, min(budget, len(candidates))))
    inherited.sort(key=candidates.index)
    sir = SirSpec("R", "ID", stored, fks, inherited)

    ids = rng.sample(range(40), rng.randint(0, 20))
    for i in ids:
        row = [i]
        for name, t in stored[1:]:
            if name in fks:
                target = next(r for r in referenced if r.name == fks[name])
                pool = [row_[0] for row_ in target.rows] + [None, 99 if t == "INT" else "zz"]
                row.append(rng.choice(pool))
            else:
                row.append(None if rng.random() < 0.2 else _value(rng, t))
        sir.rows.append(tuple(row))
    return RandomSchema(referenced, sir)


def sql_literal(v) -> str:
    if v is None:
        return "NULL"
    if isinstance(v, str):
        return "'" + v.replace("'", "''") + "'"
    return repr(v)


def insert_sql(table: str, names: list[str], row: tuple) -> str:
    return f"Insert Into {table} ({', '.join(names)}) Values ({', '.join(sql_literal(v) for v in row)})"
