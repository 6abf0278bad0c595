"""Model classes: relational, dynamic-topological and subset-space.

All three share bitmask valuations.  Program interpretations are stored per
atomic program; sequential compositions and test programs are interpreted on
demand by ``program_function``.  ``validate`` returns violations rather than
raising so callers can report several problems at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from .formula import (
    Atomic,
    Program,
    Seq,
    Test,
    format_program,
    formula_from_json,
    formula_to_json,
)
from .topology import (
    TopoSpace,
    full_mask,
    iter_points,
    mask_from_points,
    points_from_mask,
)


@dataclass(frozen=True, eq=False)
class PDLModel:
    n: int
    alphabet: tuple[str, ...]
    rel: Mapping[str, tuple[int, ...]]  # program name -> successor mask per point
    val: Mapping[str, int]
    serial_flag: bool = False


@dataclass(frozen=True, eq=False)
class DTModel:
    space: TopoSpace
    alphabet: tuple[str, ...]
    fn: Mapping[str, tuple[Optional[int], ...]]  # total when valid
    val: Mapping[str, int]

    @property
    def n(self) -> int:
        return self.space.n


@dataclass(frozen=True, eq=False)
class SubsetModel:
    space: TopoSpace
    alphabet: tuple[str, ...]
    pfn: Mapping[str, tuple[Optional[int], ...]]  # None marks undefined
    val: Mapping[str, int]

    @property
    def n(self) -> int:
        return self.space.n


Model = Union[PDLModel, DTModel, SubsetModel]


@dataclass(frozen=True)
class Scenario:
    x: int
    u: int  # open bitmask containing x

    def to_json(self) -> dict:
        return {"x": self.x, "u": points_from_mask(self.u)}


@dataclass(frozen=True)
class Violation:
    kind: str
    program: str | None = None
    point: int | None = None
    subset: int | None = None
    detail: str = ""

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.program is not None:
            out["program"] = self.program
        if self.point is not None:
            out["point"] = self.point
        if self.subset is not None:
            out["subset"] = points_from_mask(self.subset)
        if self.detail:
            out["detail"] = self.detail
        return out


def _check_valuation(val: Mapping[str, int], n: int) -> list[Violation]:
    full = full_mask(n)
    return [
        Violation("ValuationOutOfRange", detail=f"atom {a}")
        for a, m in val.items()
        if m & ~full
    ]


def _check_alphabet(alphabet: Sequence[str], table: Mapping[str, object]) -> list[Violation]:
    out = []
    for name in alphabet:
        if name not in table:
            out.append(Violation("MissingProgram", program=name))
    for name in table:
        if name not in alphabet:
            out.append(Violation("UnknownProgram", program=name))
    return out


def validate(model: Model) -> list[Violation]:
    """Structural invariants; empty list means the model is well formed."""
    if isinstance(model, PDLModel):
        out = _check_valuation(model.val, model.n)
        out += _check_alphabet(model.alphabet, model.rel)
        full = full_mask(model.n)
        for name in model.alphabet:
            succ = model.rel.get(name)
            if succ is None:
                continue
            if len(succ) != model.n:
                out.append(Violation("BadLength", program=name))
                continue
            for x, m in enumerate(succ):
                if m & ~full:
                    out.append(Violation("SuccessorOutOfRange", program=name, point=x))
                if model.serial_flag and m == 0:
                    out.append(Violation("SerialityFailure", program=name, point=x))
        return out

    if isinstance(model, DTModel):
        out = _check_valuation(model.val, model.n)
        out += _check_alphabet(model.alphabet, model.fn)
        for name in model.alphabet:
            fn = model.fn.get(name)
            if fn is None:
                continue
            if len(fn) != model.n:
                out.append(Violation("BadLength", program=name))
                continue
            for x, y in enumerate(fn):
                if y is None:
                    out.append(Violation("TotalityFailure", program=name, point=x))
                elif not 0 <= y < model.n:
                    out.append(Violation("ValueOutOfRange", program=name, point=x))
        return out

    if isinstance(model, SubsetModel):
        out = _check_valuation(model.val, model.n)
        out += _check_alphabet(model.alphabet, model.pfn)
        for name in model.alphabet:
            fn = model.pfn.get(name)
            if fn is None:
                continue
            if len(fn) != model.n:
                out.append(Violation("BadLength", program=name))
                continue
            bad = False
            for x, y in enumerate(fn):
                if y is not None and not 0 <= y < model.n:
                    out.append(Violation("ValueOutOfRange", program=name, point=x))
                    bad = True
            if bad:
                continue
            # partial maps must send opens to opens
            for u in model.space.opens_sorted():
                if not model.space.is_open(image(fn, u)):
                    out.append(Violation("OpennessFailure", program=name, subset=u))
                    break
        return out

    raise TypeError(f"not a model: {model!r}")


def validate_scenario(model: SubsetModel, s: Scenario) -> None:
    if not model.space.is_open(s.u):
        raise ValueError(f"scenario set {points_from_mask(s.u)} is not open")
    if not s.u >> s.x & 1:
        raise ValueError(f"scenario point {s.x} is not in {points_from_mask(s.u)}")


def image(fn: Sequence[Optional[int]], u: int) -> int:
    m = 0
    for x in iter_points(u):
        y = fn[x]
        if y is not None:
            m |= 1 << y
    return m


def compose(first: Sequence[Optional[int]], second: Sequence[Optional[int]]) -> tuple[Optional[int], ...]:
    """Run ``first``, then ``second``; undefinedness propagates."""
    return tuple(
        second[y] if (y := first[x]) is not None else None for x in range(len(first))
    )


def program_function(model: Union[DTModel, SubsetModel], prog: Program) -> tuple[Optional[int], ...]:
    """Interpret a program expression as a (partial) map on points.

    Sequencing composes left to right: the seq map is the second map after the
    first.  Test programs restrict the identity to the interior of the body's
    extension and are only meaningful on subset models.
    """
    if isinstance(prog, Atomic):
        table = model.fn if isinstance(model, DTModel) else model.pfn
        try:
            return tuple(table[prog.name])
        except KeyError:
            raise ValueError(f"unknown program {prog.name!r}") from None
    if isinstance(prog, Seq):
        return compose(
            program_function(model, prog.left), program_function(model, prog.right)
        )
    if isinstance(prog, Test):
        if not isinstance(model, SubsetModel):
            raise ValueError(
                f"test program {format_program(prog)} needs a subset-space model"
            )
        from .checker import state_extension

        guard = model.space.interior(state_extension(model, prog.body))
        return tuple(x if guard >> x & 1 else None for x in range(model.n))
    raise TypeError(f"not a program: {prog!r}")


# --- JSON ----------------------------------------------------------------------


def _val_to_json(val: Mapping[str, int]) -> dict:
    return {a: points_from_mask(m) for a, m in sorted(val.items())}


def _val_from_json(obj: Mapping[str, list], n: int) -> dict[str, int]:
    return {a: mask_from_points(pts, n) for a, pts in obj.items()}


def model_to_json(model: Model) -> dict:
    if isinstance(model, PDLModel):
        return {
            "type": "pdl",
            "points": model.n,
            "serial": model.serial_flag,
            "programs": {
                name: {"rel": [[x, y] for x in range(model.n) for y in iter_points(model.rel[name][x])]}
                for name in model.alphabet
            },
            "valuation": _val_to_json(model.val),
        }
    if isinstance(model, DTModel):
        return {
            "type": "dtl",
            "space": model.space.to_json(),
            "programs": {name: {"map": list(model.fn[name])} for name in model.alphabet},
            "valuation": _val_to_json(model.val),
        }
    if isinstance(model, SubsetModel):
        return {
            "type": "subset",
            "space": model.space.to_json(),
            "programs": {name: {"map": list(model.pfn[name])} for name in model.alphabet},
            "valuation": _val_to_json(model.val),
        }
    raise TypeError(f"not a model: {model!r}")


def model_from_json(obj: dict) -> Model:
    kind = obj.get("type")
    programs = obj.get("programs", {})
    alphabet = tuple(programs)  # document order, so round trips are exact
    if kind == "pdl":
        n = obj["points"]
        rel = {}
        for name, spec in programs.items():
            succ = [0] * n
            for x, y in spec["rel"]:
                if not (0 <= x < n and 0 <= y < n):
                    raise ValueError(f"edge ({x}, {y}) outside 0..{n - 1}")
                succ[x] |= 1 << y
            rel[name] = tuple(succ)
        return PDLModel(
            n=n,
            alphabet=alphabet,
            rel=rel,
            val=_val_from_json(obj.get("valuation", {}), n),
            serial_flag=bool(obj.get("serial", False)),
        )
    if kind in ("dtl", "subset"):
        space = TopoSpace.from_json(obj["space"])
        maps = {name: tuple(spec["map"]) for name, spec in programs.items()}
        for name, fn in maps.items():
            if len(fn) != space.n:
                raise ValueError(f"program {name!r} map has wrong length")
        val = _val_from_json(obj.get("valuation", {}), space.n)
        if kind == "dtl":
            return DTModel(space=space, alphabet=alphabet, fn=maps, val=val)
        return SubsetModel(space=space, alphabet=alphabet, pfn=maps, val=val)
    raise ValueError(f"unknown model type: {kind!r}")
