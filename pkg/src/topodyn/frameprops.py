"""Frame-property deciders and the matching countermodel builders.

Continuity of a program map is equivalent to validity of the scheme
``O[prog] box p -> box O[prog] p`` over all valuations of p; openness matches
``box O[prog] p -> O[prog] box p``.  The deciders compute the semantic
property two ways (preimage criterion and minimal-neighbourhood criterion)
and insist the routes agree; the builders turn a semantic failure into an
explicit refuting valuation and point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .formula import Atom, Atomic, Formula, Implies, Int, Next
from .models import DTModel, PDLModel, image
from .topology import TopoSpace, iter_points, points_from_mask

CONTINUITY = "continuity"
OPENNESS = "openness"
SERIALITY = "seriality"

_P = Atom("p")


def scheme_formula(kind: str, prog: str = "pi") -> Formula:
    step = Atomic(prog)
    if kind == CONTINUITY:
        return Implies(Next(step, Int(_P)), Int(Next(step, _P)))
    if kind == OPENNESS:
        return Implies(Int(Next(step, _P)), Next(step, Int(_P)))
    raise ValueError(f"unknown scheme kind: {kind!r}")


@dataclass(frozen=True)
class FrameWitness:
    program: str | None = None
    point: int | None = None
    open_set: int | None = None
    valuation: int | None = None

    def to_json(self) -> dict:
        out: dict = {}
        if self.program is not None:
            out["program"] = self.program
        if self.point is not None:
            out["point"] = self.point
        if self.open_set is not None:
            out["open_set"] = points_from_mask(self.open_set)
        if self.valuation is not None:
            out["valuation"] = points_from_mask(self.valuation)
        return out


@dataclass(frozen=True)
class FrameReport:
    prop: str
    holds: bool
    witness: FrameWitness | None = None

    def to_json(self) -> dict:
        out: dict = {"property": self.prop, "holds": self.holds}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def _sorted_opens(space: TopoSpace) -> list[int]:
    return space.opens_sorted()


def is_continuous(space: TopoSpace, fn: Sequence[int]) -> FrameReport:
    """Preimage of every open is open; cross-checked against the pointwise
    minimal-neighbourhood criterion."""
    witness = None
    for v in _sorted_opens(space):
        pre = _total_preimage(fn, v, space.n)
        if not space.is_open(pre):
            bad = pre & ~space.interior(pre)
            witness = FrameWitness(point=next(iter_points(bad)), open_set=v)
            break
    pointwise = all(
        image(fn, space.min_nbhd(x)) & ~space.min_nbhd(fn[x]) == 0
        for x in range(space.n)
    )
    if pointwise != (witness is None):
        raise AssertionError("continuity criteria disagree; decider bug")
    return FrameReport(CONTINUITY, witness is None, witness)


def is_open_map(space: TopoSpace, fn: Sequence[Optional[int]]) -> FrameReport:
    """Image of every open is open.  Handles partial maps, so subset-model
    validation can share it."""
    witness = None
    for u in _sorted_opens(space):
        img = image(fn, u)
        if not space.is_open(img):
            witness = FrameWitness(open_set=u)
            break
    # minimal neighbourhoods generate all opens, so checking them suffices
    pointwise = all(
        space.is_open(image(fn, space.min_nbhd(x))) for x in range(space.n)
    )
    if pointwise != (witness is None):
        raise AssertionError("openness criteria disagree; decider bug")
    return FrameReport(OPENNESS, witness is None, witness)


def is_serial(model: PDLModel) -> FrameReport:
    for name in model.alphabet:
        for x, succ in enumerate(model.rel[name]):
            if succ == 0:
                return FrameReport(SERIALITY, False, FrameWitness(program=name, point=x))
    return FrameReport(SERIALITY, True)


def validates_scheme(space: TopoSpace, fn: Sequence[int], kind: str) -> FrameReport:
    """Is the interaction scheme valid over every valuation of p?"""
    from .checker import eval_dtl

    target = scheme_formula(kind)
    for v in range(1 << space.n):
        model = DTModel(space=space, alphabet=("pi",), fn={"pi": tuple(fn)}, val={"p": v})
        ext = eval_dtl(model, target)
        if ext != space.full:
            x = next(iter_points(space.full & ~ext))
            return FrameReport(kind, False, FrameWitness(point=x, valuation=v))
    return FrameReport(kind, True)


def _total_preimage(fn: Sequence[int], v: int, n: int) -> int:
    m = 0
    for x in range(n):
        if v >> fn[x] & 1:
            m |= 1 << x
    return m


def build_continuity_countermodel(
    space: TopoSpace, fn: Sequence[int]
) -> Optional[tuple[int, int]]:
    """For a discontinuous map, produce (valuation of p, point) refuting
    ``O[pi] box p -> box O[pi] p``.

    Recipe: take the smallest open v whose preimage a is not open and a point
    x of a outside int(a); with p true exactly on v, x satisfies the
    antecedent but not the consequent.  Returns None for continuous maps.
    """
    for v in _sorted_opens(space):
        a = _total_preimage(fn, v, space.n)
        if not space.is_open(a):
            x = next(iter_points(a & ~space.interior(a)))
            return v, x
    return None


def build_openness_countermodel(
    space: TopoSpace, fn: Sequence[int]
) -> Optional[tuple[int, int]]:
    """For a non-open map, produce (valuation of p, point) refuting
    ``box O[pi] p -> O[pi] box p``.

    Recipe: take the smallest open u with non-open image a and a point x of u
    sent into a \\ int(a); with p true exactly on a, x satisfies the
    antecedent but not the consequent.  Returns None for open maps.
    """
    for u in _sorted_opens(space):
        a = image(fn, u)
        if not space.is_open(a):
            bad = a & ~space.interior(a)
            x = next(x for x in iter_points(u) if bad >> fn[x] & 1)
            return a, x
    return None
