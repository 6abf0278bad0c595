"""Seeded model generators, soundness audits and countermodel search.

Generation is deterministic per (seed, index): the same config yields the
same stream of models, so audit reports are reproducible bit for bit.
Constrained classes (open or continuous maps) rejection-sample up to a cap
and then fall back to constructive families rather than spinning forever.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from . import checker
from .formula import (
    And,
    Atom,
    Atomic,
    BoxPdl,
    Cl,
    Diamond,
    Formula,
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
    Seq,
    Test,
    Top,
    atoms as formula_atoms,
    format_formula,
    program_names,
)
from .frameprops import is_continuous, is_open_map
from .models import (
    DTModel,
    Model,
    PDLModel,
    Scenario,
    SubsetModel,
    model_to_json,
    points_from_mask,
)
from .proofkit import ProofSystem, get_system, instantiate_scheme
from .topology import TopoSpace, all_functions, all_topologies, iter_points

MODEL_CLASSES = ("pdl_serial", "dtl", "dtl_open", "dtl_continuous", "subset")

_DEFAULT_CLASS = {"SPDL0": "dtl", "SPDL0_SEQ": "dtl_open", "DTEL": "subset"}

_PROGRAM_NAMES = ("a", "b", "c", "d", "e")


class GenerationExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class GenConfig:
    seed: int
    max_points: int = 4
    num_programs: int = 2
    model_class: Optional[str] = None  # None lets audit pick by system
    atoms: tuple[str, ...] = ("p", "q", "r")
    max_attempts: int = 10_000


def _derived_rng(seed: int, *salt: int) -> random.Random:
    # splitmix-style mixing so per-trial streams are independent of ordering
    x = seed & 0xFFFFFFFFFFFFFFFF
    for s in salt:
        x = (x + 0x9E3779B97F4A7C15 + s) & 0xFFFFFFFFFFFFFFFF
        x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
        x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
        x ^= x >> 31
    return random.Random(x)


# --- random pieces -----------------------------------------------------------


def _gen_space(rng: random.Random, n: int) -> TopoSpace:
    """Random preorder: a DAG on a shuffled order, transitively closed."""
    up = [1 << x for x in range(n)]
    order = list(range(n))
    rng.shuffle(order)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.35:
                up[order[i]] |= 1 << order[j]
    for _ in range(n):  # closure by repeated squaring would be overkill here
        for x in range(n):
            m = up[x]
            for y in iter_points(m):
                m |= up[y]
            up[x] = m
    pairs = [(x, y) for x in range(n) for y in iter_points(up[x])]
    return TopoSpace.from_preorder(n, pairs)


def _gen_valuation(rng: random.Random, n: int, names: Sequence[str]) -> dict[str, int]:
    return {a: rng.getrandbits(n) for a in names}


def _gen_total_map(rng: random.Random, n: int) -> tuple[int, ...]:
    return tuple(rng.randrange(n) for _ in range(n))


def _gen_serial_successors(rng: random.Random, n: int) -> tuple[int, ...]:
    # successor sets biased small, to keep derived network strata desk-sized
    weights = [8.0, 4.0, 1.5, 0.5][:n] or [1.0]
    sizes = list(range(1, len(weights) + 1))
    out = []
    for _ in range(n):
        k = rng.choices(sizes, weights=weights)[0]
        m = 0
        for y in rng.sample(range(n), k):
            m |= 1 << y
        out.append(m)
    return tuple(out)


def _gen_constrained_map(
    rng: random.Random, space: TopoSpace, wanted: str, cap: int
) -> tuple[int, ...]:
    check = is_open_map if wanted == "open" else is_continuous
    for _ in range(cap):
        fn = _gen_total_map(rng, space.n)
        if check(space, fn).holds:
            return fn
    # constructive fallback: the identity always qualifies, as do constant
    # maps to an open singleton (open case) or to any point (continuous case)
    candidates: list[tuple[int, ...]] = [tuple(range(space.n))]
    for y in range(space.n):
        const = tuple(y for _ in range(space.n))
        if wanted == "continuous" or space.is_open(1 << y):
            candidates.append(const)
    if not candidates:
        raise GenerationExhausted(f"no {wanted} map found within {cap} attempts")
    return rng.choice(candidates)


def gen_model(cfg: GenConfig, index: int = 0) -> Model:
    """Deterministic model stream: same config and index, same model."""
    model_class = cfg.model_class or "dtl"
    if model_class not in MODEL_CLASSES:
        raise ValueError(f"unknown model class {model_class!r}")
    rng = _derived_rng(cfg.seed, index)
    n = rng.randint(1, cfg.max_points)
    alphabet = _PROGRAM_NAMES[: cfg.num_programs]
    val = None

    if model_class == "pdl_serial":
        rel = {name: _gen_serial_successors(rng, n) for name in alphabet}
        val = _gen_valuation(rng, n, cfg.atoms)
        return PDLModel(n=n, alphabet=alphabet, rel=rel, val=val, serial_flag=True)

    space = _gen_space(rng, n)
    if model_class == "dtl":
        fn = {name: _gen_total_map(rng, n) for name in alphabet}
        return DTModel(space, alphabet, fn, _gen_valuation(rng, n, cfg.atoms))
    if model_class in ("dtl_open", "dtl_continuous"):
        wanted = "open" if model_class == "dtl_open" else "continuous"
        fn = {
            name: _gen_constrained_map(rng, space, wanted, cfg.max_attempts)
            for name in alphabet
        }
        return DTModel(space, alphabet, fn, _gen_valuation(rng, n, cfg.atoms))

    # subset: an open total map restricted to an open domain stays open
    opens = space.opens_sorted()
    pfn = {}
    for name in alphabet:
        total = _gen_constrained_map(rng, space, "open", cfg.max_attempts)
        dom = rng.choice(opens)
        pfn[name] = tuple(total[x] if dom >> x & 1 else None for x in range(n))
    return SubsetModel(space, alphabet, pfn, _gen_valuation(rng, n, cfg.atoms))


# --- random formulas -----------------------------------------------------------


def gen_formula(
    rng: random.Random,
    atom_names: Sequence[str],
    programs: Sequence[str],
    modal_budget: int = 3,
    size_budget: int = 6,
    lang: Language = Language.PDL,
    allow_seq: bool = True,
    allow_tests: bool = False,
) -> Formula:
    """Grammar-stratified sampler; modal depth never exceeds modal_budget."""
    if size_budget <= 0 or (rng.random() < 0.18 and size_budget < 4):
        return Top() if rng.random() < 0.08 else Atom(rng.choice(list(atom_names)))

    def sub(mb: int = modal_budget) -> Formula:
        return gen_formula(
            rng, atom_names, programs, mb, size_budget - 1, lang, allow_seq, allow_tests
        )

    def pick_program(budget: int) -> tuple[Program, int]:
        if allow_seq and budget >= 2 and len(programs) > 0 and rng.random() < 0.25:
            return Seq(Atomic(rng.choice(list(programs))), Atomic(rng.choice(list(programs)))), 2
        if (
            allow_tests
            and lang is not Language.PDL
            and budget >= 1
            and rng.random() < 0.15
        ):
            body = gen_formula(
                rng,
                atom_names,
                programs,
                modal_budget - 1,
                size_budget // 2,
                Language.BOX_NEXT,
                allow_seq,
                allow_tests,
            )
            from .formula import modal_depth

            return Test(body), max(modal_depth(body), 1)
        return Atomic(rng.choice(list(programs))), 1

    choices: list[tuple[str, float]] = [
        ("atom", 2.0),
        ("not", 1.5),
        ("and", 1.5),
        ("or", 1.2),
        ("implies", 1.2),
        ("iff", 0.6),
    ]
    if modal_budget >= 1 and programs:
        if lang is Language.PDL:
            choices += [("dia_pdl", 2.0), ("box_pdl", 2.0)]
        else:
            choices += [("next", 2.2)]
    if lang is not Language.PDL:
        choices += [("int", 1.2), ("cl", 1.2)]
        if lang is Language.K_BOX_NEXT:
            choices += [("know", 1.2), ("khat", 0.8)]

    kind = rng.choices([c for c, _ in choices], weights=[w for _, w in choices])[0]
    if kind == "atom":
        return Top() if rng.random() < 0.08 else Atom(rng.choice(list(atom_names)))
    if kind == "not":
        return Not(sub())
    if kind == "and":
        return And(sub(), sub())
    if kind == "or":
        return Or(sub(), sub())
    if kind == "implies":
        return Implies(sub(), sub())
    if kind == "iff":
        return Iff(sub(), sub())
    if kind == "int":
        return Int(sub())
    if kind == "cl":
        return Cl(sub())
    if kind == "know":
        return Know(sub())
    if kind == "khat":
        return KHat(sub())
    prog, cost = pick_program(modal_budget)
    body = gen_formula(
        rng,
        atom_names,
        programs,
        modal_budget - cost,
        size_budget - 1,
        lang,
        allow_seq,
        allow_tests,
    )
    if kind == "dia_pdl":
        return Diamond(prog, body)
    if kind == "box_pdl":
        return BoxPdl(prog, body)
    return Next(prog, body)


# --- audits ---------------------------------------------------------------------

_CPL_TEMPLATES = (
    Implies(Atom("p"), Atom("p")),
    Implies(Atom("p"), Implies(Atom("q"), Atom("p"))),
    Implies(And(Atom("p"), Atom("q")), Atom("p")),
    Or(Atom("p"), Not(Atom("p"))),
    Iff(Not(Not(Atom("p"))), Atom("p")),
    Implies(Implies(Atom("p"), Atom("q")), Implies(Implies(Atom("q"), Atom("r")), Implies(Atom("p"), Atom("r")))),
)


@dataclass(frozen=True)
class AuditViolation:
    trial: int
    scheme: str
    formula: str
    model: dict
    point: int | None = None
    scenario: dict | None = None

    def to_json(self) -> dict:
        out: dict = {
            "trial": self.trial,
            "scheme": self.scheme,
            "formula": self.formula,
            "model": self.model,
        }
        if self.point is not None:
            out["point"] = self.point
        if self.scenario is not None:
            out["scenario"] = self.scenario
        return out


@dataclass
class AuditReport:
    system: str
    model_class: str
    trials: int
    instances: int
    checked: int
    violations: list[AuditViolation]
    elapsed: float

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self, include_elapsed: bool = False) -> dict:
        # elapsed is wall clock; leaving it out keeps equal-seed runs byte-identical
        out = {
            "system": self.system,
            "model_class": self.model_class,
            "trials": self.trials,
            "instances": self.instances,
            "checked": self.checked,
            "ok": self.ok,
            "violations": [v.to_json() for v in self.violations],
        }
        if include_elapsed:
            out["elapsed"] = self.elapsed
        return out


def _global_failure(model: Model, inst: Formula) -> Union[None, int, Scenario]:
    """None when the instance holds everywhere; otherwise a witness."""
    if isinstance(model, PDLModel):
        ext = checker.eval_pdl_relational(model, inst)
        full = (1 << model.n) - 1
        if ext != full:
            return next(iter_points(full & ~ext))
        return None
    if isinstance(model, DTModel):
        ext = checker.eval_dtl(model, inst)
        if ext != model.space.full:
            return next(iter_points(model.space.full & ~ext))
        return None
    ev = checker.SubsetEvaluator(model)
    for u in model.space.opens_sorted():
        got = ev.extension(inst, u)
        if got != u:
            return Scenario(next(iter_points(u & ~got)), u)
    return None


def _instance_language(system: ProofSystem) -> Language:
    return system.language


def audit(
    system_name: str,
    cfg: GenConfig,
    trials: int,
    instances: int = 3,
    schemes: Optional[Iterable[str]] = None,
) -> AuditReport:
    """Instantiate each scheme with random formulas on generated models and
    collect global-truth failures."""
    system = get_system(system_name)
    model_class = cfg.model_class or _DEFAULT_CLASS[system.name]
    run_cfg = GenConfig(
        seed=cfg.seed,
        max_points=cfg.max_points,
        num_programs=cfg.num_programs,
        model_class=model_class,
        atoms=cfg.atoms,
        max_attempts=cfg.max_attempts,
    )
    lang = _instance_language(system)
    wanted = set(schemes) if schemes is not None else None
    scheme_list: list[tuple[str, Optional[Formula]]] = [("CPL", None)]
    scheme_list += [(name, template) for name, template in system.schemes]
    if wanted is not None:
        scheme_list = [(n, t) for n, t in scheme_list if n in wanted]

    start = time.perf_counter()
    checked = 0
    violations: list[AuditViolation] = []
    for trial in range(trials):
        model = gen_model(run_cfg, trial)
        rng = _derived_rng(cfg.seed, trial, 0x5EED)
        allow_tests = model_class == "subset"
        for name, template in scheme_list:
            for _ in range(instances):
                fmap = {
                    v: gen_formula(
                        rng,
                        cfg.atoms,
                        model.alphabet,
                        modal_budget=3,
                        size_budget=4,
                        lang=lang,
                        allow_seq=isinstance(model, (PDLModel, DTModel)),
                        allow_tests=allow_tests,
                    )
                    for v in ("p", "q", "r")
                }
                pmap = {
                    v: Atomic(rng.choice(list(model.alphabet)))
                    for v in ("pi", "pi1", "pi2")
                }
                if template is None:
                    base = rng.choice(_CPL_TEMPLATES)
                    inst = instantiate_scheme(base, fmap, {})
                else:
                    inst = instantiate_scheme(template, fmap, pmap)
                checked += 1
                witness = _global_failure(model, inst)
                if witness is not None:
                    violations.append(
                        AuditViolation(
                            trial=trial,
                            scheme=name,
                            formula=format_formula(inst),
                            model=model_to_json(model),
                            point=witness if isinstance(witness, int) else None,
                            scenario=witness.to_json() if isinstance(witness, Scenario) else None,
                        )
                    )
    return AuditReport(
        system=system.name,
        model_class=model_class,
        trials=trials,
        instances=instances,
        checked=checked,
        violations=violations,
        elapsed=time.perf_counter() - start,
    )


# --- exhaustive countermodel search ----------------------------------------------


def _open_partial_maps(space: TopoSpace) -> list[tuple[Optional[int], ...]]:
    out = []
    for fn in itertools.product([None, *range(space.n)], repeat=space.n):
        if is_open_map(space, fn).holds:
            out.append(fn)
    return out


def search_countermodel(
    f: Formula, bound: int = 4, model_class: str = "dtl"
) -> Optional[tuple[Model, Union[int, Scenario]]]:
    """First refuting model in a fixed enumeration order, or None if the
    bounded space is exhausted.

    Enumerates carriers up to the bound, topologies (as preorders), program
    interpretations and valuations over the formula's own atoms and programs.
    """
    if model_class not in ("dtl", "dtl_open", "dtl_continuous", "pdl_serial", "subset"):
        raise ValueError(f"unknown model class {model_class!r}")
    names = sorted(formula_atoms(f))
    progs = tuple(sorted(program_names(f)))

    for n in range(1, bound + 1):
        if model_class == "pdl_serial":
            serial_sets = [m for m in range(1, 1 << n)]
            tables = list(itertools.product(serial_sets, repeat=n))
            for rels in itertools.product(tables, repeat=len(progs)):
                rel = dict(zip(progs, rels))
                for masks in itertools.product(range(1 << n), repeat=len(names)):
                    model = PDLModel(
                        n=n, alphabet=progs, rel=rel,
                        val=dict(zip(names, masks)), serial_flag=True,
                    )
                    ext = checker.eval_pdl_relational(model, f)
                    full = (1 << n) - 1
                    if ext != full:
                        return model, next(iter_points(full & ~ext))
            continue

        for space in all_topologies(n):
            if model_class == "subset":
                fns: Sequence[tuple[Optional[int], ...]] = _open_partial_maps(space)
            elif model_class == "dtl_open":
                fns = [fn for fn in all_functions(n) if is_open_map(space, fn).holds]
            elif model_class == "dtl_continuous":
                fns = [fn for fn in all_functions(n) if is_continuous(space, fn).holds]
            else:
                fns = list(all_functions(n))
            for chosen in itertools.product(fns, repeat=len(progs)):
                table = dict(zip(progs, chosen))
                for masks in itertools.product(range(1 << n), repeat=len(names)):
                    val = dict(zip(names, masks))
                    if model_class == "subset":
                        model: Model = SubsetModel(space, progs, table, val)
                        ev = checker.SubsetEvaluator(model)
                        for u in space.opens_sorted():
                            got = ev.extension(f, u)
                            if got != u:
                                x = next(iter_points(u & ~got))
                                return model, Scenario(x, u)
                    else:
                        model = DTModel(space, progs, table, val)
                        ext = checker.eval_dtl(model, f)
                        if ext != space.full:
                            return model, next(iter_points(space.full & ~ext))
    return None
