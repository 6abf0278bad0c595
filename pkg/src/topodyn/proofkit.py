"""Hilbert-style proof systems and a derivation checker.

Axiom schemes are stored as formula templates: every atom in a template is a
formula metavariable and every atomic program name a program metavariable.
``match_scheme`` anti-unifies a candidate against a template, demanding
consistent bindings; nothing is rearranged, so commuted or contraposed
variants of a scheme do not match.  Classical tautologies are recognised by
truth table over the maximal non-Boolean subformulas.

Derivations are step lists with 1-based cross references.  ``{"mp": [i, j]}``
reads: step i is the antecedent, step j proves ``step_i -> this step``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Union

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
    ParseError,
    Program,
    Seq,
    Test,
    Top,
    format_formula,
    in_language,
    parse,
    parse_program,
    substitute,
    substitute_programs,
)

_BINARY = (And, Or, Implies, Iff)

MAX_TABLE_VARS = 16


def is_tautology(f: Formula) -> bool:
    """Truth-table check treating modal subformulas as opaque variables."""
    leaves: list[Formula] = []
    seen: set[Formula] = set()

    def scan(g: Formula) -> None:
        if isinstance(g, Top):
            return
        if isinstance(g, Not):
            scan(g.body)
            return
        if isinstance(g, _BINARY):
            scan(g.left)
            scan(g.right)
            return
        if g not in seen:
            seen.add(g)
            leaves.append(g)

    scan(f)
    if len(leaves) > MAX_TABLE_VARS:
        raise ValueError(
            f"tautology check needs {len(leaves)} variables, over the cap of {MAX_TABLE_VARS}"
        )

    def truth(g: Formula, bits: int) -> bool:
        if isinstance(g, Top):
            return True
        if isinstance(g, Not):
            return not truth(g.body, bits)
        if isinstance(g, And):
            return truth(g.left, bits) and truth(g.right, bits)
        if isinstance(g, Or):
            return truth(g.left, bits) or truth(g.right, bits)
        if isinstance(g, Implies):
            return not truth(g.left, bits) or truth(g.right, bits)
        if isinstance(g, Iff):
            return truth(g.left, bits) == truth(g.right, bits)
        return bool(bits >> index[g] & 1)

    index = {g: i for i, g in enumerate(leaves)}
    return all(truth(f, bits) for bits in range(1 << len(leaves)))


def match_scheme(
    f: Formula, template: Formula
) -> Optional[tuple[dict[str, Formula], dict[str, Program]]]:
    """Bindings under which the template instantiates to f, or None."""
    fenv: dict[str, Formula] = {}
    penv: dict[str, Program] = {}

    def m(t: Formula, g: Formula) -> bool:
        if isinstance(t, Atom):
            bound = fenv.get(t.name)
            if bound is None:
                fenv[t.name] = g
                return True
            return bound == g
        if isinstance(t, Top):
            return isinstance(g, Top)
        if type(t) is not type(g):
            return False
        if isinstance(t, (Not, Int, Cl, Know, KHat)):
            return m(t.body, g.body)
        if isinstance(t, _BINARY):
            return m(t.left, g.left) and m(t.right, g.right)
        if isinstance(t, (Diamond, BoxPdl, Next)):
            return mp(t.prog, g.prog) and m(t.body, g.body)
        raise TypeError(f"not a formula: {t!r}")

    def mp(t: Program, g: Program) -> bool:
        if isinstance(t, Atomic):
            bound = penv.get(t.name)
            if bound is None:
                penv[t.name] = g
                return True
            return bound == g
        if isinstance(t, Seq):
            return isinstance(g, Seq) and mp(t.left, g.left) and mp(t.right, g.right)
        if isinstance(t, Test):
            return isinstance(g, Test) and m(t.body, g.body)
        raise TypeError(f"not a program: {t!r}")

    return (fenv, penv) if m(template, f) else None


def instantiate_scheme(
    template: Formula,
    formulas: Mapping[str, Formula],
    programs: Mapping[str, Program],
) -> Formula:
    """Programs first, then atoms, so substituted formulas are never touched
    by the program pass."""
    return substitute(substitute_programs(template, programs), formulas)


@dataclass(frozen=True)
class ProofSystem:
    name: str
    language: Language
    schemes: tuple[tuple[str, Formula], ...]
    rules: frozenset[str]


_SPDL0_SCHEMES = (
    ("K", parse("[pi](p -> q) -> ([pi] p -> [pi] q)")),
    ("D", parse("[pi] p -> <pi> p")),
)

SPDL0 = ProofSystem(
    name="SPDL0",
    language=Language.PDL,
    schemes=_SPDL0_SCHEMES,
    rules=frozenset({"mp", "nec_prog"}),
)

SPDL0_SEQ = ProofSystem(
    name="SPDL0_SEQ",
    language=Language.PDL,
    schemes=_SPDL0_SCHEMES + (("Seq", parse("<pi1;pi2> p <-> <pi1><pi2> p")),),
    rules=frozenset({"mp", "nec_prog"}),
)

DTEL = ProofSystem(
    name="DTEL",
    language=Language.K_BOX_NEXT,
    schemes=(
        ("K_K", parse("K (p -> q) -> (K p -> K q)")),
        ("T_K", parse("K p -> p")),
        ("4_K", parse("K p -> K K p")),
        ("5_K", parse("~K p -> K ~K p")),
        ("K_Box", parse("box (p -> q) -> (box p -> box q)")),
        ("T_Box", parse("box p -> p")),
        ("4_Box", parse("box p -> box box p")),
        ("KI", parse("K p -> box p")),
        ("NotPC", parse("O[pi] ~p <-> ~O[pi] p & O[pi] top")),
        ("AndC", parse("O[pi] (p & q) <-> O[pi] p & O[pi] q")),
        ("KPC", parse("O[pi] top -> (O[pi] K p <-> K (O[pi] top -> O[pi] p))")),
        ("Openness", parse("box ~O[pi] p & O[pi] top -> O[pi] box ~p")),
    ),
    rules=frozenset({"mp", "nec_K", "nec_box", "mon"}),
)

_SYSTEMS = {s.name: s for s in (SPDL0, SPDL0_SEQ, DTEL)}


def get_system(name: str) -> ProofSystem:
    try:
        return _SYSTEMS[name]
    except KeyError:
        raise ValueError(f"unknown proof system {name!r}") from None


def match_axiom(f: Formula, system: ProofSystem) -> Optional[str]:
    """Name of a scheme the formula instantiates; CPL is tried last."""
    if not in_language(f, system.language):
        return None
    for name, template in system.schemes:
        if match_scheme(f, template) is not None:
            return name
    if is_tautology(f):
        return "CPL"
    return None


# --- derivations ----------------------------------------------------------------


@dataclass(frozen=True)
class AxiomStep:
    name: str


@dataclass(frozen=True)
class MPStep:
    antecedent: int
    implication: int


@dataclass(frozen=True)
class NecStep:
    mod: str  # a program expression, or K / box in DTEL
    source: int


@dataclass(frozen=True)
class MonStep:
    prog: str
    source: int


Justification = Union[AxiomStep, MPStep, NecStep, MonStep]


@dataclass(frozen=True)
class Step:
    formula: Formula
    by: Justification


@dataclass(frozen=True)
class Derivation:
    system: str
    steps: tuple[Step, ...]


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    step: int | None = None
    error: str | None = None
    detail: str = ""

    def to_json(self) -> dict:
        if self.ok:
            return {"ok": True}
        return {"ok": False, "step": self.step, "error": self.error, "detail": self.detail}


def check_derivation(derivation: Derivation) -> CheckResult:
    system = get_system(derivation.system)
    steps = derivation.steps

    def fail(k: int, error: str, detail: str) -> CheckResult:
        return CheckResult(False, k, error, detail)

    for k, step in enumerate(steps, start=1):
        f = step.formula
        by = step.by

        if isinstance(by, AxiomStep):
            if not in_language(f, system.language):
                return fail(k, "BadAxiomInstance", "formula is outside the system language")
            if by.name == "CPL":
                try:
                    if not is_tautology(f):
                        return fail(k, "BadAxiomInstance", "not a tautology")
                except ValueError as exc:
                    return fail(k, "BadAxiomInstance", str(exc))
                continue
            template = dict(system.schemes).get(by.name)
            if template is None:
                return fail(k, "BadAxiomInstance", f"no scheme named {by.name!r}")
            if match_scheme(f, template) is None:
                return fail(k, "BadAxiomInstance", f"not an instance of {by.name}")
            continue

        # rule steps share the cross-reference check
        sources = (
            [by.antecedent, by.implication] if isinstance(by, MPStep) else [by.source]
        )
        bad = [i for i in sources if not 1 <= i < k]
        if bad:
            return fail(k, "ForwardReference", f"step {bad[0]} is not an earlier step")

        if isinstance(by, MPStep):
            premise = steps[by.antecedent - 1].formula
            implication = steps[by.implication - 1].formula
            if implication != Implies(premise, f):
                return fail(
                    k,
                    "BadRuleApplication",
                    f"step {by.implication} is not (step {by.antecedent} -> step {k})",
                )
            continue

        if isinstance(by, NecStep):
            premise = steps[by.source - 1].formula
            if by.mod == "K":
                if "nec_K" not in system.rules:
                    return fail(k, "BadRuleApplication", "no K necessitation in this system")
                expected: Formula = Know(premise)
            elif by.mod == "box":
                if "nec_box" not in system.rules:
                    return fail(k, "BadRuleApplication", "no box necessitation in this system")
                expected = Int(premise)
            else:
                if "nec_prog" not in system.rules:
                    # execution modalities lose necessitation once programs may halt
                    return fail(
                        k, "BadRuleApplication", "program necessitation is not a rule here"
                    )
                try:
                    prog = parse_program(by.mod)
                except ParseError as exc:
                    return fail(k, "BadRuleApplication", f"bad program: {exc}")
                expected = BoxPdl(prog, premise)
            if f != expected or not in_language(f, system.language):
                return fail(
                    k, "BadRuleApplication", f"conclusion is not step {by.source} necessitated"
                )
            continue

        if isinstance(by, MonStep):
            if "mon" not in system.rules:
                return fail(k, "BadRuleApplication", "no monotonicity rule in this system")
            premise = steps[by.source - 1].formula
            if not isinstance(premise, Implies):
                return fail(k, "BadRuleApplication", f"step {by.source} is not an implication")
            try:
                prog = parse_program(by.prog)
            except ParseError as exc:
                return fail(k, "BadRuleApplication", f"bad program: {exc}")
            expected = Implies(Next(prog, premise.left), Next(prog, premise.right))
            if f != expected or not in_language(f, system.language):
                return fail(
                    k,
                    "BadRuleApplication",
                    f"conclusion does not monotonise step {by.source} along {by.prog}",
                )
            continue

        return fail(k, "BadRuleApplication", f"unknown justification {by!r}")

    return CheckResult(True)


# --- JSON -------------------------------------------------------------------------


def derivation_from_json(obj: dict) -> Derivation:
    steps = []
    for raw in obj["steps"]:
        f = parse(raw["formula"])
        by = raw["by"]
        if "axiom" in by:
            just: Justification = AxiomStep(by["axiom"])
        elif "mp" in by:
            i, j = by["mp"]
            just = MPStep(int(i), int(j))
        elif "nec" in by:
            just = NecStep(str(by["nec"]["mod"]), int(by["nec"]["from"]))
        elif "mon" in by:
            just = MonStep(str(by["mon"]["prog"]), int(by["mon"]["from"]))
        else:
            raise ValueError(f"unknown justification: {by!r}")
        steps.append(Step(f, just))
    return Derivation(system=obj["system"], steps=tuple(steps))


def derivation_to_json(derivation: Derivation) -> dict:
    steps = []
    for step in derivation.steps:
        by = step.by
        if isinstance(by, AxiomStep):
            raw: dict = {"axiom": by.name}
        elif isinstance(by, MPStep):
            raw = {"mp": [by.antecedent, by.implication]}
        elif isinstance(by, NecStep):
            raw = {"nec": {"mod": by.mod, "from": by.source}}
        else:
            raw = {"mon": {"prog": by.prog, "from": by.source}}
        steps.append({"formula": format_formula(step.formula), "by": raw})
    return {"system": derivation.system, "steps": steps}
