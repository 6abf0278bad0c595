"""Finite topological spaces on points 0..n-1.

Subsets are bitmasks (bit x set means point x is in the set), so interiors and
closures are a handful of word operations.  Every finite topology is
determined by its minimal neighbourhoods: the family of opens is exactly the
family of sets that contain the minimal neighbourhood of each of their points.
Validation, interior and closure all route through that table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence


def mask_from_points(points: Iterable[int], n: int) -> int:
    m = 0
    for x in points:
        if not 0 <= x < n:
            raise ValueError(f"point {x} outside 0..{n - 1}")
        m |= 1 << x
    return m


def points_from_mask(mask: int) -> list[int]:
    out = []
    x = 0
    while mask:
        if mask & 1:
            out.append(x)
        mask >>= 1
        x += 1
    return out


def full_mask(n: int) -> int:
    return (1 << n) - 1


def iter_points(mask: int) -> Iterator[int]:
    x = 0
    while mask:
        if mask & 1:
            yield x
        mask >>= 1
        x += 1


@dataclass(frozen=True)
class TopoSpace:
    n: int
    opens: frozenset[int]
    _min_nbhd: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "opens", frozenset(self.opens))
        if self.n < 0:
            raise ValueError("need a nonnegative number of points")
        full = full_mask(self.n)
        for o in self.opens:
            if o & ~full:
                raise ValueError(f"open set {points_from_mask(o)} outside the carrier")
        if full not in self.opens:
            raise ValueError("the whole carrier must be open")
        table = []
        for x in range(self.n):
            m = full
            for o in self.opens:
                if o >> x & 1:
                    m &= o
            table.append(m)
        object.__setattr__(self, "_min_nbhd", tuple(table))
        # A finite family is a topology iff it is exactly the up-closed family
        # of its own minimal-neighbourhood table.  Members are up-closed by
        # construction, so the only possible defect is a missing up-closed set;
        # name it by a pairwise witness when one exists.
        for a in range(1 << self.n):
            if a in self.opens:
                continue
            if all(table[x] & ~a == 0 for x in iter_points(a)):
                raise ValueError(self._missing_set_message(a))

    def _missing_set_message(self, a: int) -> str:
        if a == 0:
            return "the empty set must be open"
        for u, v in itertools.combinations(self.opens, 2):
            if u & v == a:
                return (
                    f"not closed under intersection: {points_from_mask(u)} and "
                    f"{points_from_mask(v)} are open but {points_from_mask(a)} is missing"
                )
        for u, v in itertools.combinations(self.opens, 2):
            if u | v == a:
                return (
                    f"not closed under union: {points_from_mask(u)} and "
                    f"{points_from_mask(v)} are open but {points_from_mask(a)} is missing"
                )
        return (
            f"not a topology: {points_from_mask(a)} is a union of minimal "
            "neighbourhoods but is missing"
        )

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_opens(cls, n: int, sets: Iterable[Iterable[int]]) -> "TopoSpace":
        return cls(n, frozenset(mask_from_points(s, n) for s in sets))

    @classmethod
    def from_subbasis(cls, n: int, sets: Iterable[Iterable[int]]) -> "TopoSpace":
        """Smallest topology containing the given sets."""
        masks = [mask_from_points(s, n) for s in sets]
        full = full_mask(n)
        table = []
        for x in range(n):
            m = full
            for s in masks:
                if s >> x & 1:
                    m &= s
            table.append(m)
        opens = frozenset(
            a for a in range(1 << n) if all(table[x] & ~a == 0 for x in iter_points(a))
        )
        return cls(n, opens)

    @classmethod
    def from_preorder(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "TopoSpace":
        """Opens are the up-closed sets.  The relation must be given reflexive
        and transitive; anything else is rejected."""
        up = [1 << x for x in range(n)]
        seen = set()
        for x, y in pairs:
            if not (0 <= x < n and 0 <= y < n):
                raise ValueError(f"pair ({x}, {y}) outside the carrier")
            up[x] |= 1 << y
            seen.add((x, y))
        for x in range(n):
            if (x, x) not in seen:
                raise ValueError(f"relation is not a preorder: missing reflexive pair ({x}, {x})")
        for x in range(n):
            for y in iter_points(up[x]):
                if up[y] & ~up[x]:
                    z = next(iter_points(up[y] & ~up[x]))
                    raise ValueError(
                        f"relation is not a preorder: {x}<={y} and {y}<={z} but not {x}<={z}"
                    )
        opens = frozenset(
            a for a in range(1 << n) if all(up[x] & ~a == 0 for x in iter_points(a))
        )
        return cls(n, opens)

    @classmethod
    def discrete(cls, n: int) -> "TopoSpace":
        return cls(n, frozenset(range(1 << n)))

    @classmethod
    def indiscrete(cls, n: int) -> "TopoSpace":
        return cls(n, frozenset({0, full_mask(n)}))

    # -- queries ---------------------------------------------------------------

    @property
    def full(self) -> int:
        return full_mask(self.n)

    def is_open(self, a: int) -> bool:
        return a in self.opens

    def min_nbhd(self, x: int) -> int:
        return self._min_nbhd[x]

    def interior(self, a: int) -> int:
        """Largest open subset: the points whose minimal neighbourhood fits."""
        m = 0
        for x in range(self.n):
            if self._min_nbhd[x] & ~a == 0:
                m |= 1 << x
        return m

    def closure(self, a: int) -> int:
        m = 0
        for x in range(self.n):
            if self._min_nbhd[x] & a:
                m |= 1 << x
        return m

    def opens_sorted(self) -> list[int]:
        """Canonical listing: by cardinality, then lexicographic on elements."""
        return sorted(self.opens, key=lambda o: (o.bit_count(), o))

    def specialization(self) -> list[tuple[int, int]]:
        """The preorder recovering this topology: x <= y iff y is in every
        open around x."""
        return [
            (x, y)
            for x in range(self.n)
            for y in iter_points(self._min_nbhd[x])
        ]

    # -- JSON -------------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "points": self.n,
            "opens": [points_from_mask(o) for o in self.opens_sorted()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TopoSpace":
        n = obj["points"]
        keys = [k for k in ("opens", "subbasis", "preorder") if k in obj]
        if len(keys) != 1:
            raise ValueError("topology needs exactly one of opens/subbasis/preorder")
        if keys[0] == "opens":
            return cls.from_opens(n, obj["opens"])
        if keys[0] == "subbasis":
            return cls.from_subbasis(n, obj["subbasis"])
        return cls.from_preorder(n, [tuple(p) for p in obj["preorder"]])


# --- exhaustive enumerations ---------------------------------------------------


def all_preorders(n: int) -> Iterator[tuple[int, ...]]:
    """All preorders on n labeled points as up-set tables, deterministic order."""
    pairs = [(x, y) for x in range(n) for y in range(n) if x != y]
    for bits in range(1 << len(pairs)):
        up = [1 << x for x in range(n)]
        for i, (x, y) in enumerate(pairs):
            if bits >> i & 1:
                up[x] |= 1 << y
        if all(
            up[y] & ~up[x] == 0 for x in range(n) for y in iter_points(up[x])
        ):
            yield tuple(up)


def all_topologies(n: int) -> Iterator[TopoSpace]:
    """All topologies on n labeled points, via the preorder correspondence."""
    for up in all_preorders(n):
        opens = frozenset(
            a for a in range(1 << n) if all(up[x] & ~a == 0 for x in iter_points(a))
        )
        yield TopoSpace(n, opens)


def all_functions(n: int) -> Iterator[tuple[int, ...]]:
    """All self-maps on n points, deterministic order."""
    return itertools.product(range(n), repeat=n)
