"""Triples on the level sets x^2 + y^2 + z^2 - xyz - 2 = k over F_p and their orbits."""

from __future__ import annotations

import os
from collections import deque
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .ff import check_modulus, sqrt_mod
from .sl2 import InvariantViolation, TooLarge

Triple = tuple[int, int, int]

CLASS_ORDER = (
    "Origin",
    "Dihedral",
    "A4",
    "S4",
    "A5_72",
    "A5_40a",
    "A5_40b",
    "Cage",
    "SingularLevel",
)
TABLE_SIZES = {
    "Origin": 1,
    "Dihedral": 6,
    "A4": 16,
    "S4": 36,
    "A5_72": 72,
    "A5_40a": 40,
    "A5_40b": 40,
}
EXCEPTIONAL_CLASSES = frozenset(TABLE_SIZES)

DEFAULT_MAX_P = 3000


class SizeMismatch(RuntimeError):
    """An exceptional orbit did not have its tabulated size."""


def max_p() -> int:
    return int(os.environ.get("MARKOFF_MAX_P", DEFAULT_MAX_P))


def _check_budget(p: int) -> None:
    check_modulus(p)
    if p > max_p():
        raise TooLarge(f"p={p} exceeds the enumeration budget ({max_p()}; set MARKOFF_MAX_P)")


def level(t: Triple, p: int) -> int:
    x, y, z = t
    return (x * x + y * y + z * z - x * y * z - 2) % p


def move_r(t: Triple, p: int) -> Triple:
    return t[1], t[0], t[2]


def move_s(t: Triple, p: int) -> Triple:
    return t[0], t[2], t[1]


def move_t(t: Triple, p: int) -> Triple:
    """Vieta involution in the last coordinate."""
    x, y, z = t
    return x, y, (x * y - z) % p


def moves(t: Triple, p: int) -> tuple[Triple, Triple, Triple]:
    return move_r(t, p), move_s(t, p), move_t(t, p)


def enumerate_level(p: int, k: int) -> set[Triple]:
    _check_budget(p)
    x, y, z = kernels.decode(kernels.level_codes(p, k), p)
    return set(zip(x.tolist(), y.tolist(), z.tolist()))


@dataclass(frozen=True)
class OrbitRecord:
    representative: Triple
    size: int
    klass: Optional[str] = None
    # some member has at least two non-zero coordinates
    two_nonzero: bool = True

    def sort_key(self):
        return (CLASS_ORDER.index(self.klass) if self.klass else len(CLASS_ORDER), self.representative)


def orbit_members(t: Triple, p: int, limit: Optional[int] = None) -> set[Triple]:
    """Breadth-first closure of a triple under r, s and the Vieta move."""
    t = tuple(v % p for v in t)
    seen = {t}
    queue = deque([t])
    while queue:
        cur = queue.popleft()
        for nxt in moves(cur, p):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
                if limit is not None and len(seen) > limit:
                    raise TooLarge(f"orbit of {t} exceeds {limit} triples")
    return seen


def _has_two_nonzero(members) -> bool:
    return any(sum(1 for v in m if v) >= 2 for m in members)


def orbit_of(t: Triple, p: int, limit: Optional[int] = None) -> OrbitRecord:
    members = orbit_members(t, p, limit)
    return OrbitRecord(min(members), len(members), None, _has_two_nonzero(members))


def table_generators(p: int) -> list[tuple[str, Triple]]:
    """Admissible generators of the exceptional-orbit table at p (all levels).

    The dihedral row ``(t, 0, 0)`` depends on the level and is added by
    :func:`exceptional_set`.
    """
    check_modulus(p)
    rows: list[tuple[str, Triple]] = [("Origin", (0, 0, 0)), ("A4", (1, 1, 0))]
    r2 = sqrt_mod(2, p)
    if r2 is not None:
        rows.append(("S4", (r2, 1, 0)))
    r5 = sqrt_mod(5, p)
    if r5 is not None:
        half = pow(2, -1, p)
        phi = (1 + r5) * half % p
        psi = (1 - r5) * half % p
        rows.append(("A5_72", (phi, psi, 0)))
        forty = sorted([(phi, 1, 0), (psi, 1, 0)], key=lambda g: level(g, p))
        rows.append(("A5_40a", forty[0]))
        rows.append(("A5_40b", forty[1]))
    return rows


def exceptional_set(p: int, k: int) -> list[OrbitRecord]:
    """Exceptional orbits at level k with their tabulated sizes verified."""
    check_modulus(p)
    k %= p
    gens = [(cls, g) for cls, g in table_generators(p) if level(g, p) == k]
    t = sqrt_mod(k + 2, p)
    if t is not None and t != 0:
        gens.append(("Dihedral", (t, 0, 0)))
    records = []
    for cls, g in gens:
        rec = orbit_of(g, p, limit=max(TABLE_SIZES.values()))
        if rec.size != TABLE_SIZES[cls]:
            raise SizeMismatch(f"{cls} orbit of {g} mod {p} has size {rec.size}, expected {TABLE_SIZES[cls]}")
        records.append(OrbitRecord(rec.representative, rec.size, cls, rec.two_nonzero))
    records.sort(key=OrbitRecord.sort_key)
    return records


@dataclass
class LevelReport:
    p: int
    k: int
    total: int
    orbits: list[OrbitRecord] = field(default_factory=list)
    exceptional_total: int = 0
    strong_approx_ok: bool = False
    count_formula_ok: bool = False
    exceptional_match: bool = True

    @property
    def cage_orbits(self) -> list[OrbitRecord]:
        return [o for o in self.orbits if o.klass == "Cage"]

    @property
    def cage_size(self) -> int:
        return sum(o.size for o in self.cage_orbits)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["orbits"] = [
            {
                "class": o.klass,
                "representative": list(o.representative),
                "size": o.size,
                "two_nonzero": o.two_nonzero,
            }
            for o in self.orbits
        ]
        return d


def decompose_level(p: int, k: int) -> LevelReport:
    """Split a level into orbits and tag them against the exceptional table."""
    from .analytics import count_formula

    _check_budget(p)
    k %= p
    codes = kernels.level_codes(p, k)
    labels = kernels.orbit_labels(codes, p)
    x, y, z = kernels.decode(codes, p)
    # lex-min (x, y, z) per orbit
    lex = (x * p + y) * p + z
    n = codes.shape[0]
    best = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(best, labels, lex)
    nonzero = (x != 0).astype(np.int64) + (y != 0) + (z != 0)
    two = np.zeros(n, dtype=bool)
    np.logical_or.at(two, labels, nonzero >= 2)
    roots, sizes = np.unique(labels, return_counts=True)

    orbit_at = {}
    for root, size in zip(roots.tolist(), sizes.tolist()):
        key = int(best[root])
        rep = (key // (p * p), (key // p) % p, key % p)
        orbit_at[root] = OrbitRecord(rep, size, None, bool(two[root]))

    exceptional = exceptional_set(p, k)
    tags: dict[int, str] = {}
    match = True
    for rec in exceptional:
        code = kernels.encode(*rec.representative, p)
        j = int(np.searchsorted(codes, code))
        if j >= n or codes[j] != code:
            raise InvariantViolation(f"exceptional generator {rec.representative} not on level {k}")
        root = int(labels[j])
        if root in tags or orbit_at[root].size != rec.size:
            match = False
        tags.setdefault(root, rec.klass)

    orbits = []
    for root, rec in orbit_at.items():
        if k == 2:
            cls = "SingularLevel"
        else:
            cls = tags.get(root, "Cage")
        orbits.append(OrbitRecord(rec.representative, rec.size, cls, rec.two_nonzero))
    orbits.sort(key=OrbitRecord.sort_key)

    report = LevelReport(p=p, k=k, total=int(n), orbits=orbits, exceptional_match=match)
    report.exceptional_total = sum(o.size for o in orbits if o.klass != "Cage")
    n_cage = sum(1 for o in orbits if o.klass == "Cage")
    report.strong_approx_ok = k != 2 and n_cage <= 1 and match
    report.count_formula_ok = report.total == count_formula(p, k)
    return report
