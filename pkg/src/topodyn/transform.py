"""Bounded execution-network spaces for serial relational models.

A depth-d network over a model assigns a state to every program word of
length at most d so that each one-step extension follows the corresponding
relation.  Stratum d carries the partition topology whose cells group
networks by their root state; the shift along a program sends a network to
the subtree under that program, landing one stratum down.  Truth of a
relational formula at a state then matches truth at every network rooted
there, with the relational modalities read through closure/interior of shift
preimages, which on a partition boil down to exists/forall over cell mates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .formula import (
    And,
    Atom,
    Atomic,
    BoxPdl,
    Diamond,
    Formula,
    Iff,
    Implies,
    Language,
    Not,
    Or,
    Top,
    format_formula,
    in_language,
    modal_depth,
)
from .models import PDLModel
from .topology import iter_points, points_from_mask


class NonSerialModel(ValueError):
    pass


class BudgetExceeded(ValueError):
    pass


class DepthExceeded(ValueError):
    pass


@dataclass(frozen=True)
class BoundedNetwork:
    root: int
    children: tuple["BoundedNetwork", ...]  # one per program, alphabet order

    @property
    def depth(self) -> int:
        return 0 if not self.children else 1 + self.children[0].depth

    def label(self, word: Sequence[int]) -> int:
        """State assigned to a program word, given as alphabet indices."""
        node = self
        for i in word:
            node = node.children[i]
        return node.root

    def to_json(self, alphabet: Sequence[str]) -> dict:
        out: dict = {"root": self.root}
        if self.children:
            out["children"] = {
                name: child.to_json(alphabet)
                for name, child in zip(alphabet, self.children)
            }
        return out


@dataclass(eq=False)
class NetworkSpace:
    source: PDLModel
    depth: int
    strata: tuple[tuple[BoundedNetwork, ...], ...]
    # derived lookup tables, filled in __post_init__
    index: tuple[dict[BoundedNetwork, int], ...] = field(init=False, repr=False)
    shift_index: tuple[tuple[tuple[int, ...], ...], ...] = field(init=False, repr=False)
    cells: tuple[dict[int, int], ...] = field(init=False, repr=False)
    root_mask: tuple[dict[int, int], ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.index = tuple(
            {net: i for i, net in enumerate(stratum)} for stratum in self.strata
        )
        shift = []
        for d, stratum in enumerate(self.strata):
            if d == 0:
                shift.append(())
                continue
            below = self.index[d - 1]
            shift.append(
                tuple(
                    tuple(below[net.children[p]] for p in range(len(self.source.alphabet)))
                    for net in stratum
                )
            )
        self.shift_index = tuple(shift)
        cells = []
        roots = []
        for stratum in self.strata:
            by_root: dict[int, int] = {}
            for i, net in enumerate(stratum):
                by_root[net.root] = by_root.get(net.root, 0) | (1 << i)
            cells.append(by_root)
            roots.append(dict(by_root))
        self.cells = tuple(cells)
        self.root_mask = tuple(roots)

    def stratum_sizes(self) -> list[int]:
        return [len(s) for s in self.strata]

    def shift(self, d: int, prog_index: int, i: int) -> int:
        """Index in stratum d-1 of the shift of network i of stratum d."""
        return self.shift_index[d][i][prog_index]


def stratum_counts(model: PDLModel, depth: int) -> list[list[int]]:
    """Network counts by (depth, root) from the product recurrence."""
    _require_serial(model)
    counts = [[1] * model.n]
    for _ in range(depth):
        prev = counts[-1]
        row = []
        for x in range(model.n):
            total = 1
            for name in model.alphabet:
                total *= sum(prev[y] for y in iter_points(model.rel[name][x]))
            row.append(total)
        counts.append(row)
    return counts


def _require_serial(model: PDLModel) -> None:
    for name in model.alphabet:
        for x, succ in enumerate(model.rel[name]):
            if succ == 0:
                raise NonSerialModel(
                    f"program {name!r} has no successor at state {x}; "
                    "networks need a serial model"
                )


def build_network_space(model: PDLModel, depth: int, budget: int = 100_000) -> NetworkSpace:
    """Enumerate all bounded networks up to the given depth.

    Raises BudgetExceeded (with the computed size) before enumerating if any
    stratum would outgrow the budget.
    """
    counts = stratum_counts(model, depth)
    for d, row in enumerate(counts):
        size = sum(row)
        if size > budget:
            raise BudgetExceeded(
                f"stratum {d} holds {size} networks, over the budget of {budget}"
            )
    strata: list[tuple[BoundedNetwork, ...]] = [
        tuple(BoundedNetwork(x, ()) for x in range(model.n))
    ]
    for d in range(1, depth + 1):
        below = strata[d - 1]
        by_root: dict[int, list[BoundedNetwork]] = {}
        for net in below:
            by_root.setdefault(net.root, []).append(net)
        stratum: list[BoundedNetwork] = []
        for x in range(model.n):
            option_lists = []
            for name in model.alphabet:
                opts: list[BoundedNetwork] = []
                for y in iter_points(model.rel[name][x]):
                    opts.extend(by_root[y])
                option_lists.append(opts)
            for children in itertools.product(*option_lists):
                stratum.append(BoundedNetwork(x, children))
        strata.append(tuple(stratum))
    return NetworkSpace(source=model, depth=depth, strata=tuple(strata))


def network_extension(space: NetworkSpace, f: Formula, d: int) -> int:
    """Bitmask over stratum d of the networks satisfying f.

    Needs modal_depth(f) <= d: each relational modality consumes one stratum.
    """
    if modal_depth(f) > d:
        raise DepthExceeded(
            f"formula needs depth {modal_depth(f)} but stratum {d} was requested"
        )
    memo: dict[tuple[Formula, int], int] = {}

    def ext(g: Formula, d: int) -> int:
        key = (g, d)
        got = memo.get(key)
        if got is not None:
            return got
        stratum = space.strata[d]
        full = (1 << len(stratum)) - 1
        if isinstance(g, Atom):
            v = space.source.val.get(g.name, 0)
            m = 0
            for x in iter_points(v):
                m |= space.root_mask[d].get(x, 0)
        elif isinstance(g, Top):
            m = full
        elif isinstance(g, Not):
            m = full & ~ext(g.body, d)
        elif isinstance(g, And):
            m = ext(g.left, d) & ext(g.right, d)
        elif isinstance(g, Or):
            m = ext(g.left, d) | ext(g.right, d)
        elif isinstance(g, Implies):
            m = (full & ~ext(g.left, d)) | ext(g.right, d)
        elif isinstance(g, Iff):
            m = full & ~(ext(g.left, d) ^ ext(g.right, d))
        elif isinstance(g, (Diamond, BoxPdl)):
            if not isinstance(g.prog, Atomic):
                raise ValueError(
                    f"network semantics treats programs as atomic: {format_formula(g)}"
                )
            p = space.source.alphabet.index(g.prog.name)
            body = ext(g.body, d - 1)
            shifts = space.shift_index[d]
            m = 0
            # closure/interior of a shift preimage on a partition topology:
            # a cell passes if some (dually, every) member shifts into the body
            for cell in space.cells[d].values():
                members = list(iter_points(cell))
                hits = sum(1 for i in members if body >> shifts[i][p] & 1)
                passed = hits > 0 if isinstance(g, Diamond) else hits == len(members)
                if passed:
                    m |= cell
        else:
            raise ValueError(f"no network semantics for {format_formula(g)}")
        memo[key] = m
        return m

    return ext(f, d)


def eval_network(space: NetworkSpace, f: Formula, net: BoundedNetwork) -> bool:
    d = net.depth
    i = space.index[d].get(net)
    if i is None:
        raise ValueError("network does not belong to this space")
    return bool(network_extension(space, f, d) >> i & 1)


def check_shift_openness(space: NetworkSpace) -> list[dict]:
    """Shift images of basis cells must be unions of cells one stratum down:
    the image of the cell of root x is exactly the union of the cells of the
    relational successors of x."""
    failures = []
    for d in range(1, space.depth + 1):
        shifts = space.shift_index[d]
        for p, name in enumerate(space.source.alphabet):
            for x, cell in space.cells[d].items():
                got = 0
                for i in iter_points(cell):
                    got |= 1 << shifts[i][p]
                want = 0
                for y in iter_points(space.source.rel[name][x]):
                    want |= space.root_mask[d - 1].get(y, 0)
                if got != want:
                    failures.append(
                        {"depth": d, "program": name, "root": x}
                    )
    return failures


@dataclass(frozen=True)
class PreservationReport:
    checked: int
    disagreements: tuple[dict, ...]

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def to_json(self) -> dict:
        return {
            "checked": self.checked,
            "ok": self.ok,
            "disagreements": list(self.disagreements),
        }


def check_truth_preservation(
    model: PDLModel, formulas: Iterable[Formula], depth: int, budget: int = 100_000
) -> PreservationReport:
    """Compare source truth with network truth at every deepest-stratum
    network, for each formula."""
    from .checker import eval_pdl_relational

    space = build_network_space(model, depth, budget)
    checked = 0
    disagreements: list[dict] = []
    for f in formulas:
        if not in_language(f, Language.PDL):
            raise ValueError(f"networks interpret relational formulas only: {format_formula(f)}")
        if modal_depth(f) > depth:
            raise DepthExceeded(
                f"formula {format_formula(f)} needs depth {modal_depth(f)}, space has {depth}"
            )
        source_ext = eval_pdl_relational(model, f)
        net_ext = network_extension(space, f, depth)
        for i, net in enumerate(space.strata[depth]):
            checked += 1
            src = bool(source_ext >> net.root & 1)
            lifted = bool(net_ext >> i & 1)
            if src != lifted:
                disagreements.append(
                    {
                        "formula": format_formula(f),
                        "root": net.root,
                        "network": net.to_json(model.alphabet),
                        "source": src,
                        "network_truth": lifted,
                    }
                )
    return PreservationReport(checked=checked, disagreements=tuple(disagreements))


def network_space_to_json(space: NetworkSpace) -> dict:
    """Emit the space as a subset-space model JSON: points are all networks,
    opens are generated by the root cells, shifts are partial maps, undefined
    on stratum 0."""
    model = space.source
    offsets = []
    total = 0
    for stratum in space.strata:
        offsets.append(total)
        total += len(stratum)
    cells = []
    for d in range(space.depth + 1):
        for x in sorted(space.cells[d]):
            cells.append(
                [offsets[d] + i for i in iter_points(space.cells[d][x])]
            )
    maps: dict[str, list] = {}
    for p, name in enumerate(model.alphabet):
        table: list[int | None] = [None] * total
        for d in range(1, space.depth + 1):
            for i in range(len(space.strata[d])):
                table[offsets[d] + i] = offsets[d - 1] + space.shift_index[d][i][p]
        maps[name] = table
    valuation = {}
    for atom, v in sorted(model.val.items()):
        pts = []
        for d in range(space.depth + 1):
            for x in iter_points(v):
                pts.extend(offsets[d] + i for i in iter_points(space.cells[d].get(x, 0)))
        valuation[atom] = sorted(pts)
    return {
        "type": "subset",
        "space": {"points": total, "subbasis": cells},
        "programs": {name: {"map": maps[name]} for name in model.alphabet},
        "valuation": valuation,
        "strata": [
            {
                "depth": d,
                "points": list(range(offsets[d], offsets[d] + len(space.strata[d]))),
                "networks": [net.to_json(model.alphabet) for net in space.strata[d]],
            }
            for d in range(space.depth + 1)
        ],
        "source_points": model.n,
    }
