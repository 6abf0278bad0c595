"""Model checkers for the three semantics.

Relational: ``<prog>`` is existential preimage along the program relation.

Dynamic-topological: programs are total maps, ``O[prog]`` is preimage,
``box``/``dia`` are interior/closure, and the relational modalities are read
through the embedding ``<prog> f == dia O[prog] f``, so their extensions are
the closure (dually, interior) of the preimage of the body's extension.

Subset-space: truth sits at scenarios (x, U).  Knowledge quantifies over U,
interior is taken in the ambient space, and ``O[prog]`` moves the whole
scenario along a partial open map.  Extensions are memoized per (formula,
open) pair, which keeps batch sweeps linear.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .formula import (
    And,
    Atom,
    BoxPdl,
    Cl,
    Diamond,
    Formula,
    FragmentViolation,
    Iff,
    Implies,
    Int,
    KHat,
    Know,
    Language,
    Next,
    Not,
    Or,
    Program,
    Top,
    format_formula,
    in_language,
)
from .models import (
    DTModel,
    PDLModel,
    Scenario,
    SubsetModel,
    image,
    program_function,
    validate_scenario,
)
from .formula import Atomic, Seq, Test


def translate_pdl(f: Formula) -> Formula:
    """Embed the relational language: <prog> becomes dia O[prog], [prog]
    becomes box O[prog]."""
    if isinstance(f, (Atom, Top)):
        return f
    if isinstance(f, Not):
        return Not(translate_pdl(f.body))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(translate_pdl(f.left), translate_pdl(f.right))
    if isinstance(f, Diamond):
        return Cl(Next(f.prog, translate_pdl(f.body)))
    if isinstance(f, BoxPdl):
        return Int(Next(f.prog, translate_pdl(f.body)))
    raise ValueError(f"not a relational-language formula: {format_formula(f)}")


def eval_pdl_relational(model: PDLModel, f: Formula) -> int:
    """Extension of f as a bitmask.  Sequencing composes relations."""
    succ_cache: dict[Program, tuple[int, ...]] = {}

    def succ(prog: Program) -> tuple[int, ...]:
        got = succ_cache.get(prog)
        if got is not None:
            return got
        if isinstance(prog, Atomic):
            try:
                table = model.rel[prog.name]
            except KeyError:
                raise ValueError(f"unknown program {prog.name!r}") from None
        elif isinstance(prog, Seq):
            first, second = succ(prog.left), succ(prog.right)
            table = tuple(
                _union_over(second, first[x]) for x in range(model.n)
            )
        else:
            raise ValueError("test programs have no relational interpretation")
        succ_cache[prog] = table
        return table

    full = (1 << model.n) - 1
    memo: dict[Formula, int] = {}

    def ext(g: Formula) -> int:
        got = memo.get(g)
        if got is not None:
            return got
        if isinstance(g, Atom):
            m = model.val.get(g.name, 0)
        elif isinstance(g, Top):
            m = full
        elif isinstance(g, Not):
            m = full & ~ext(g.body)
        elif isinstance(g, And):
            m = ext(g.left) & ext(g.right)
        elif isinstance(g, Or):
            m = ext(g.left) | ext(g.right)
        elif isinstance(g, Implies):
            m = (full & ~ext(g.left)) | ext(g.right)
        elif isinstance(g, Iff):
            m = full & ~(ext(g.left) ^ ext(g.right))
        elif isinstance(g, Diamond):
            body, table = ext(g.body), succ(g.prog)
            m = 0
            for x in range(model.n):
                if table[x] & body:
                    m |= 1 << x
        elif isinstance(g, BoxPdl):
            body, table = ext(g.body), succ(g.prog)
            m = 0
            for x in range(model.n):
                if table[x] & ~body == 0:
                    m |= 1 << x
        else:
            raise ValueError(
                f"no relational semantics for {format_formula(g)}"
            )
        memo[g] = m
        return m

    return ext(f)


def _union_over(table: Sequence[int], mask: int) -> int:
    m = 0
    x = 0
    while mask:
        if mask & 1:
            m |= table[x]
        mask >>= 1
        x += 1
    return m


def _preimage(fn: Sequence[Optional[int]], body: int, n: int) -> int:
    m = 0
    for x in range(n):
        y = fn[x]
        if y is not None and body >> y & 1:
            m |= 1 << x
    return m


def eval_dtl(model: DTModel, f: Formula) -> int:
    """Extension of f on a dynamic-topological model.

    Accepts the relational language (through the embedding) and the box/next
    language; knowledge and test programs are rejected.
    """
    space = model.space
    full = space.full
    fn_cache: dict[Program, tuple[Optional[int], ...]] = {}

    def fn_for(prog: Program) -> tuple[Optional[int], ...]:
        got = fn_cache.get(prog)
        if got is None:
            got = fn_cache[prog] = program_function(model, prog)
        return got

    memo: dict[Formula, int] = {}

    def ext(g: Formula) -> int:
        got = memo.get(g)
        if got is not None:
            return got
        if isinstance(g, Atom):
            m = model.val.get(g.name, 0)
        elif isinstance(g, Top):
            m = full
        elif isinstance(g, Not):
            m = full & ~ext(g.body)
        elif isinstance(g, And):
            m = ext(g.left) & ext(g.right)
        elif isinstance(g, Or):
            m = ext(g.left) | ext(g.right)
        elif isinstance(g, Implies):
            m = (full & ~ext(g.left)) | ext(g.right)
        elif isinstance(g, Iff):
            m = full & ~(ext(g.left) ^ ext(g.right))
        elif isinstance(g, Int):
            m = space.interior(ext(g.body))
        elif isinstance(g, Cl):
            m = space.closure(ext(g.body))
        elif isinstance(g, Next):
            m = _preimage(fn_for(g.prog), ext(g.body), model.n)
        elif isinstance(g, Diamond):
            m = space.closure(_preimage(fn_for(g.prog), ext(g.body), model.n))
        elif isinstance(g, BoxPdl):
            m = space.interior(_preimage(fn_for(g.prog), ext(g.body), model.n))
        elif isinstance(g, (Know, KHat)):
            raise FragmentViolation(
                f"knowledge needs subset-space semantics: {format_formula(g)}"
            )
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = m
        return m

    return ext(f)


class SubsetEvaluator:
    """Relativized extensions on one subset-space model, memoized.

    ``extension(f, u)`` returns the set of points of the open u at which f
    holds in scenario (., u).  Keeping one evaluator alive across many queries
    on the same model shares the memo.
    """

    def __init__(self, model: SubsetModel):
        self.model = model
        self.space = model.space
        self._memo: dict[tuple[Formula, int], int] = {}
        self._fns: dict[Program, tuple[Optional[int], ...]] = {}

    def _fn(self, prog: Program) -> tuple[Optional[int], ...]:
        got = self._fns.get(prog)
        if got is None:
            got = self._fns[prog] = program_function(self.model, prog)
        return got

    def extension(self, f: Formula, u: int) -> int:
        key = (f, u)
        got = self._memo.get(key)
        if got is not None:
            return got
        m = self._compute(f, u)
        self._memo[key] = m
        return m

    def _compute(self, f: Formula, u: int) -> int:
        if isinstance(f, Atom):
            return self.model.val.get(f.name, 0) & u
        if isinstance(f, Top):
            return u
        if isinstance(f, Not):
            return u & ~self.extension(f.body, u)
        if isinstance(f, And):
            return self.extension(f.left, u) & self.extension(f.right, u)
        if isinstance(f, Or):
            return self.extension(f.left, u) | self.extension(f.right, u)
        if isinstance(f, Implies):
            return (u & ~self.extension(f.left, u)) | self.extension(f.right, u)
        if isinstance(f, Iff):
            return u & ~(self.extension(f.left, u) ^ self.extension(f.right, u))
        if isinstance(f, Know):
            # knowledge is truth throughout the scenario set
            return u if self.extension(f.body, u) == u else 0
        if isinstance(f, KHat):
            return u if self.extension(f.body, u) != 0 else 0
        if isinstance(f, Int):
            return self.space.interior(self.extension(f.body, u))
        if isinstance(f, Cl):
            return u & ~self.space.interior(u & ~self.extension(f.body, u))
        if isinstance(f, Next):
            fn = self._fn(f.prog)
            v = image(fn, u)
            body = self.extension(f.body, v)
            m = 0
            for x in range(self.model.n):
                if u >> x & 1:
                    y = fn[x]
                    if y is not None and body >> y & 1:
                        m |= 1 << x
            return m
        if isinstance(f, (Diamond, BoxPdl)):
            raise ValueError(
                f"relational modalities are not defined on subset-space models: "
                f"{format_formula(f)}"
            )
        raise TypeError(f"not a formula: {f!r}")

    def truth(self, f: Formula, s: Scenario) -> bool:
        validate_scenario(self.model, s)
        return bool(self.extension(f, s.u) >> s.x & 1)


def eval_subset(model: SubsetModel, f: Formula, s: Scenario) -> bool:
    return SubsetEvaluator(model).truth(f, s)


def state_extension(model: SubsetModel, f: Formula) -> int:
    """Scenario-set-independent extension of a box/next-fragment formula.

    Inside the fragment the truth of f at (x, U) does not depend on U, so the
    extension relative to the whole carrier serves as an absolute one.
    """
    if not in_language(f, Language.BOX_NEXT):
        raise FragmentViolation(
            f"state extensions exist only in the box/next fragment: {format_formula(f)}"
        )
    return SubsetEvaluator(model).extension(f, model.space.full)
