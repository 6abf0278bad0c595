"""Formulas and programs for three modal object languages.

The languages share one AST:

* ``Language.PDL`` -- Boolean connectives plus the program modalities
  ``<prog> f`` and ``[prog] f``.
* ``Language.BOX_NEXT`` -- Boolean connectives plus interior/closure
  (``box``/``dia``) and the execution modality ``O[prog] f``.
* ``Language.K_BOX_NEXT`` -- BOX_NEXT plus knowledge ``K``/``Khat``.

Programs are atomic names, sequential compositions ``a;b`` and test programs
``?(f)``.  Test bodies must stay inside the box/next fragment; the constructor
enforces this.

Concrete syntax (ASCII): atoms are ``[a-z][a-z0-9_]*``; ``box``, ``dia`` and
``top`` are reserved words.  Unary modalities bind tighter than ``&``, which
binds tighter than ``|``, then ``->`` (right associative), then ``<->``.
``;`` in programs is left associative.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Union


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {col})"
        super().__init__(message)
        self.line = line
        self.col = col


class FragmentViolation(ParseError):
    """A test-program body used a connective outside the box/next fragment."""


class Language(Enum):
    PDL = "pdl"
    BOX_NEXT = "box_next"
    K_BOX_NEXT = "k_box_next"


# --- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Formula:
    def __invert__(self) -> "Formula":
        return Not(self)

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __rshift__(self, other: "Formula") -> "Formula":
        return Implies(self, other)

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    """Relational possibility: some execution of the program reaches body."""

    prog: "Program"
    body: Formula


@dataclass(frozen=True)
class BoxPdl(Formula):
    """Relational necessity, the dual of Diamond."""

    prog: "Program"
    body: Formula


@dataclass(frozen=True)
class Int(Formula):
    """Topological interior (printed ``box``)."""

    body: Formula


@dataclass(frozen=True)
class Cl(Formula):
    """Topological closure (printed ``dia``)."""

    body: Formula


@dataclass(frozen=True)
class Know(Formula):
    body: Formula


@dataclass(frozen=True)
class KHat(Formula):
    body: Formula


@dataclass(frozen=True)
class Next(Formula):
    """One execution step of a (possibly partial) program."""

    prog: "Program"
    body: Formula


@dataclass(frozen=True)
class Atomic:
    name: str

    def __str__(self) -> str:
        return format_program(self)


@dataclass(frozen=True)
class Seq:
    left: "Program"
    right: "Program"

    def __str__(self) -> str:
        return format_program(self)


@dataclass(frozen=True)
class Test:
    body: Formula

    def __post_init__(self) -> None:
        if not in_language(self.body, Language.BOX_NEXT):
            raise FragmentViolation(
                f"test body must stay in the box/next fragment: {format_formula(self.body)}"
            )

    def __str__(self) -> str:
        return format_program(self)


Program = Union[Atomic, Seq, Test]

TOP = Top()

_BINARY = (And, Or, Implies, Iff)


# --- language membership and measures ---------------------------------------


def _pdl_program(p: Program) -> bool:
    # Tests are a subset-space construct; L_PDL programs are names and seqs.
    if isinstance(p, Atomic):
        return True
    if isinstance(p, Seq):
        return _pdl_program(p.left) and _pdl_program(p.right)
    return False


def in_language(f: Formula, lang: Language) -> bool:
    if isinstance(f, (Atom, Top)):
        return True
    if isinstance(f, Not):
        return in_language(f.body, lang)
    if isinstance(f, _BINARY):
        return in_language(f.left, lang) and in_language(f.right, lang)
    if isinstance(f, (Diamond, BoxPdl)):
        return lang is Language.PDL and _pdl_program(f.prog) and in_language(f.body, lang)
    if isinstance(f, (Int, Cl)):
        return lang is not Language.PDL and in_language(f.body, lang)
    if isinstance(f, (Know, KHat)):
        return lang is Language.K_BOX_NEXT and in_language(f.body, lang)
    if isinstance(f, Next):
        # Test subprograms carry their own fragment check from construction.
        return lang is not Language.PDL and in_language(f.body, lang)
    raise TypeError(f"not a formula: {f!r}")


def program_depth(p: Program) -> int:
    if isinstance(p, Atomic):
        return 1
    if isinstance(p, Seq):
        return program_depth(p.left) + program_depth(p.right)
    if isinstance(p, Test):
        return modal_depth(p.body)
    raise TypeError(f"not a program: {p!r}")


def modal_depth(f: Formula) -> int:
    """Maximum nesting of execution modalities; a seq of length k counts k."""
    if isinstance(f, (Atom, Top)):
        return 0
    if isinstance(f, (Not, Int, Cl, Know, KHat)):
        return modal_depth(f.body)
    if isinstance(f, _BINARY):
        return max(modal_depth(f.left), modal_depth(f.right))
    if isinstance(f, (Diamond, BoxPdl, Next)):
        return program_depth(f.prog) + modal_depth(f.body)
    raise TypeError(f"not a formula: {f!r}")


def atoms(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset({f.name})
    if isinstance(f, Top):
        return frozenset()
    if isinstance(f, (Not, Int, Cl, Know, KHat)):
        return atoms(f.body)
    if isinstance(f, _BINARY):
        return atoms(f.left) | atoms(f.right)
    if isinstance(f, (Diamond, BoxPdl, Next)):
        return _program_formula_atoms(f.prog) | atoms(f.body)
    raise TypeError(f"not a formula: {f!r}")


def _program_formula_atoms(p: Program) -> frozenset[str]:
    if isinstance(p, Atomic):
        return frozenset()
    if isinstance(p, Seq):
        return _program_formula_atoms(p.left) | _program_formula_atoms(p.right)
    return atoms(p.body)


def program_names(f: Formula) -> frozenset[str]:
    """Atomic program names occurring anywhere in f, tests included."""
    if isinstance(f, (Atom, Top)):
        return frozenset()
    if isinstance(f, (Not, Int, Cl, Know, KHat)):
        return program_names(f.body)
    if isinstance(f, _BINARY):
        return program_names(f.left) | program_names(f.right)
    if isinstance(f, (Diamond, BoxPdl, Next)):
        return _program_names_in(f.prog) | program_names(f.body)
    raise TypeError(f"not a formula: {f!r}")


def _program_names_in(p: Program) -> frozenset[str]:
    if isinstance(p, Atomic):
        return frozenset({p.name})
    if isinstance(p, Seq):
        return _program_names_in(p.left) | _program_names_in(p.right)
    return program_names(p.body)


def substitute(f: Formula, mapping: Mapping[str, Formula]) -> Formula:
    """Uniform substitution of atoms.  Reaches into test bodies; substituting
    a knowledge formula into a test raises FragmentViolation, as it must."""
    if isinstance(f, Atom):
        return mapping.get(f.name, f)
    if isinstance(f, Top):
        return f
    if isinstance(f, Not):
        return Not(substitute(f.body, mapping))
    if isinstance(f, _BINARY):
        return type(f)(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, (Int, Cl, Know, KHat)):
        return type(f)(substitute(f.body, mapping))
    if isinstance(f, (Diamond, BoxPdl, Next)):
        return type(f)(_substitute_prog(f.prog, mapping), substitute(f.body, mapping))
    raise TypeError(f"not a formula: {f!r}")


def _substitute_prog(p: Program, mapping: Mapping[str, Formula]) -> Program:
    if isinstance(p, Atomic):
        return p
    if isinstance(p, Seq):
        return Seq(_substitute_prog(p.left, mapping), _substitute_prog(p.right, mapping))
    return Test(substitute(p.body, mapping))


def substitute_programs(f: Formula, mapping: Mapping[str, Program]) -> Formula:
    """Replace atomic program names throughout, used to instantiate schemes."""
    if isinstance(f, (Atom, Top)):
        return f
    if isinstance(f, Not):
        return Not(substitute_programs(f.body, mapping))
    if isinstance(f, _BINARY):
        return type(f)(
            substitute_programs(f.left, mapping), substitute_programs(f.right, mapping)
        )
    if isinstance(f, (Int, Cl, Know, KHat)):
        return type(f)(substitute_programs(f.body, mapping))
    if isinstance(f, (Diamond, BoxPdl, Next)):
        return type(f)(
            _substitute_prog_names(f.prog, mapping), substitute_programs(f.body, mapping)
        )
    raise TypeError(f"not a formula: {f!r}")


def _substitute_prog_names(p: Program, mapping: Mapping[str, Program]) -> Program:
    if isinstance(p, Atomic):
        return mapping.get(p.name, p)
    if isinstance(p, Seq):
        return Seq(
            _substitute_prog_names(p.left, mapping), _substitute_prog_names(p.right, mapping)
        )
    return Test(substitute_programs(p.body, mapping))


def expand_duals(f: Formula) -> Formula:
    """Rewrite [prog], dia and Khat through their negation duals."""
    if isinstance(f, (Atom, Top)):
        return f
    if isinstance(f, Not):
        return Not(expand_duals(f.body))
    if isinstance(f, _BINARY):
        return type(f)(expand_duals(f.left), expand_duals(f.right))
    if isinstance(f, Int):
        return Int(expand_duals(f.body))
    if isinstance(f, Cl):
        return Not(Int(Not(expand_duals(f.body))))
    if isinstance(f, Know):
        return Know(expand_duals(f.body))
    if isinstance(f, KHat):
        return Not(Know(Not(expand_duals(f.body))))
    if isinstance(f, Diamond):
        return Diamond(_expand_duals_prog(f.prog), expand_duals(f.body))
    if isinstance(f, BoxPdl):
        return Not(Diamond(_expand_duals_prog(f.prog), Not(expand_duals(f.body))))
    if isinstance(f, Next):
        return Next(_expand_duals_prog(f.prog), expand_duals(f.body))
    raise TypeError(f"not a formula: {f!r}")


def _expand_duals_prog(p: Program) -> Program:
    if isinstance(p, Atomic):
        return p
    if isinstance(p, Seq):
        return Seq(_expand_duals_prog(p.left), _expand_duals_prog(p.right))
    return Test(expand_duals(p.body))


# --- printer -----------------------------------------------------------------

_PREC_IFF, _PREC_IMPLIES, _PREC_OR, _PREC_AND, _PREC_UNARY, _PREC_ATOM = range(6)


def format_formula(f: Formula) -> str:
    return _fmt(f, _PREC_IFF)


def _fmt(f: Formula, ctx: int) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "top"
    if isinstance(f, Not):
        s, prec = "~" + _fmt(f.body, _PREC_UNARY), _PREC_UNARY
    elif isinstance(f, And):
        s = f"{_fmt(f.left, _PREC_AND)} & {_fmt(f.right, _PREC_AND + 1)}"
        prec = _PREC_AND
    elif isinstance(f, Or):
        s = f"{_fmt(f.left, _PREC_OR)} | {_fmt(f.right, _PREC_OR + 1)}"
        prec = _PREC_OR
    elif isinstance(f, Implies):
        s = f"{_fmt(f.left, _PREC_IMPLIES + 1)} -> {_fmt(f.right, _PREC_IMPLIES)}"
        prec = _PREC_IMPLIES
    elif isinstance(f, Iff):
        s = f"{_fmt(f.left, _PREC_IFF + 1)} <-> {_fmt(f.right, _PREC_IFF)}"
        prec = _PREC_IFF
    elif isinstance(f, Diamond):
        s, prec = f"<{format_program(f.prog)}> {_fmt(f.body, _PREC_UNARY)}", _PREC_UNARY
    elif isinstance(f, BoxPdl):
        s, prec = f"[{format_program(f.prog)}] {_fmt(f.body, _PREC_UNARY)}", _PREC_UNARY
    elif isinstance(f, Int):
        s, prec = f"box {_fmt(f.body, _PREC_UNARY)}", _PREC_UNARY
    elif isinstance(f, Cl):
        s, prec = f"dia {_fmt(f.body, _PREC_UNARY)}", _PREC_UNARY
    elif isinstance(f, Know):
        s, prec = f"K {_fmt(f.body, _PREC_UNARY)}", _PREC_UNARY
    elif isinstance(f, KHat):
        s, prec = f"Khat {_fmt(f.body, _PREC_UNARY)}", _PREC_UNARY
    elif isinstance(f, Next):
        s, prec = f"O[{format_program(f.prog)}] {_fmt(f.body, _PREC_UNARY)}", _PREC_UNARY
    else:
        raise TypeError(f"not a formula: {f!r}")
    return f"({s})" if prec < ctx else s


def format_program(p: Program) -> str:
    return _fmt_prog(p, 0)


def _fmt_prog(p: Program, ctx: int) -> str:
    if isinstance(p, Atomic):
        return p.name
    if isinstance(p, Test):
        return f"?({format_formula(p.body)})"
    if isinstance(p, Seq):
        s = f"{_fmt_prog(p.left, 0)};{_fmt_prog(p.right, 1)}"
        return f"({s})" if ctx > 0 else s
    raise TypeError(f"not a program: {p!r}")


# --- parser ------------------------------------------------------------------

_RESERVED = {"box", "dia", "top"}

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<name>[a-z][a-z0-9_]*)
      | (?P<upper>Khat|K|O)
      | (?P<op><->|->|[~&|<>\[\]();?])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            line = text.count("\n", 0, pos) + 1
            col = pos - text.rfind("\n", 0, pos)
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            line = text.count("\n", 0, pos) + 1
            col = pos - text.rfind("\n", 0, pos)
            if kind == "name" and value in _RESERVED:
                kind = value
            elif kind in ("upper", "op"):
                kind = value
            tokens.append((kind, value, line, col))
        pos = m.end()
    tokens.append(("eof", "", text.count("\n") + 1, len(text) - text.rfind("\n", 0, len(text))))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> tuple[str, str, int, int]:
        return self.tokens[self.pos]

    def at(self, kind: str) -> bool:
        return self.tokens[self.pos][0] == kind

    def advance(self) -> tuple[str, str, int, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> tuple[str, str, int, int]:
        tok = self.peek()
        if tok[0] != kind:
            got = tok[1] or "end of input"
            raise ParseError(f"expected {what}, found {got!r}", tok[2], tok[3])
        return self.advance()

    def formula(self) -> Formula:
        left = self.implication()
        if self.at("<->"):
            self.advance()
            return Iff(left, self.formula())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.at("->"):
            self.advance()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.at("|"):
            self.advance()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.at("&"):
            self.advance()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, _, line, col = self.peek()
        if kind == "~":
            self.advance()
            return Not(self.unary())
        if kind == "box":
            self.advance()
            return Int(self.unary())
        if kind == "dia":
            self.advance()
            return Cl(self.unary())
        if kind == "K":
            self.advance()
            return Know(self.unary())
        if kind == "Khat":
            self.advance()
            return KHat(self.unary())
        if kind == "<":
            self.advance()
            prog = self.program()
            self.expect(">", "'>'")
            return Diamond(prog, self.unary())
        if kind == "[":
            self.advance()
            prog = self.program()
            self.expect("]", "']'")
            return BoxPdl(prog, self.unary())
        if kind == "O":
            self.advance()
            self.expect("[", "'[' after 'O'")
            prog = self.program()
            self.expect("]", "']'")
            return Next(prog, self.unary())
        return self.primary()

    def primary(self) -> Formula:
        kind, value, line, col = self.peek()
        if kind == "top":
            self.advance()
            return Top()
        if kind == "name":
            self.advance()
            return Atom(value)
        if kind == "(":
            self.advance()
            f = self.formula()
            self.expect(")", "')'")
            return f
        got = value or "end of input"
        raise ParseError(f"expected a formula, found {got!r}", line, col)

    def program(self) -> Program:
        p = self.program_term()
        while self.at(";"):
            self.advance()
            p = Seq(p, self.program_term())
        return p

    def program_term(self) -> Program:
        kind, value, line, col = self.peek()
        if kind == "name":
            self.advance()
            return Atomic(value)
        if kind == "?":
            self.advance()
            self.expect("(", "'(' after '?'")
            body = self.formula()
            self.expect(")", "')'")
            try:
                return Test(body)
            except FragmentViolation as exc:
                raise FragmentViolation(exc.args[0].split(" (line")[0], line, col) from None
        if kind == "(":
            self.advance()
            p = self.program()
            self.expect(")", "')'")
            return p
        got = value or "end of input"
        raise ParseError(f"expected a program, found {got!r}", line, col)


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    tok = p.peek()
    if tok[0] != "eof":
        raise ParseError(f"unexpected trailing input {tok[1]!r}", tok[2], tok[3])
    return f


def parse_program(text: str) -> Program:
    p = _Parser(text)
    prog = p.program()
    tok = p.peek()
    if tok[0] != "eof":
        raise ParseError(f"unexpected trailing input {tok[1]!r}", tok[2], tok[3])
    return prog


# --- JSON views --------------------------------------------------------------

_FORMULA_TAGS = {
    Atom: "atom",
    Top: "top",
    Not: "not",
    And: "and",
    Or: "or",
    Implies: "implies",
    Iff: "iff",
    Diamond: "pdl_dia",
    BoxPdl: "pdl_box",
    Int: "interior",
    Cl: "closure",
    Know: "know",
    KHat: "khat",
    Next: "next",
}


def formula_to_json(f: Formula) -> dict:
    tag = _FORMULA_TAGS[type(f)]
    if isinstance(f, Atom):
        return {"type": tag, "name": f.name}
    if isinstance(f, Top):
        return {"type": tag}
    if isinstance(f, (Not, Int, Cl, Know, KHat)):
        return {"type": tag, "body": formula_to_json(f.body)}
    if isinstance(f, _BINARY):
        return {"type": tag, "left": formula_to_json(f.left), "right": formula_to_json(f.right)}
    return {
        "type": tag,
        "program": program_to_json(f.prog),
        "body": formula_to_json(f.body),
    }


def program_to_json(p: Program) -> dict:
    if isinstance(p, Atomic):
        return {"type": "prog", "name": p.name}
    if isinstance(p, Seq):
        return {"type": "seq", "left": program_to_json(p.left), "right": program_to_json(p.right)}
    return {"type": "test", "body": formula_to_json(p.body)}


_FORMULA_UNTAGS = {tag: cls for cls, tag in _FORMULA_TAGS.items()}


def formula_from_json(obj: dict) -> Formula:
    cls = _FORMULA_UNTAGS.get(obj.get("type"))
    if cls is None:
        raise ValueError(f"unknown formula node: {obj.get('type')!r}")
    if cls is Atom:
        return Atom(obj["name"])
    if cls is Top:
        return Top()
    if cls in (Not, Int, Cl, Know, KHat):
        return cls(formula_from_json(obj["body"]))
    if cls in _BINARY:
        return cls(formula_from_json(obj["left"]), formula_from_json(obj["right"]))
    return cls(program_from_json(obj["program"]), formula_from_json(obj["body"]))


def program_from_json(obj: dict) -> Program:
    tag = obj.get("type")
    if tag == "prog":
        return Atomic(obj["name"])
    if tag == "seq":
        return Seq(program_from_json(obj["left"]), program_from_json(obj["right"]))
    if tag == "test":
        return Test(formula_from_json(obj["body"]))
    raise ValueError(f"unknown program node: {tag!r}")
