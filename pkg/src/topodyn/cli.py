"""Command-line front end.

Every subcommand prints one JSON document on stdout.  Exit codes: 0 for
success (property holds, derivation checks, nothing refuted), 1 when a
checked property fails or a countermodel is found, 2 for usage or input
errors.  ``TOPODYN_MAX_POINTS`` (default 12) caps enumeration sizes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import checker, frameprops, harness, proofkit, transform
from .announce import announce, check_test_announcement_identity
from .formula import (
    Formula,
    Language,
    ParseError,
    format_formula,
    formula_to_json,
    in_language,
    parse,
)
from .models import (
    DTModel,
    PDLModel,
    Scenario,
    SubsetModel,
    model_from_json,
    model_to_json,
    points_from_mask,
    validate,
)


def _max_points() -> int:
    try:
        return int(os.environ.get("TOPODYN_MAX_POINTS", "12"))
    except ValueError:
        raise ValueError("TOPODYN_MAX_POINTS must be an integer") from None


def _emit(obj: dict) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _load_model(path: str):
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    model = model_from_json(obj)
    problems = validate(model)
    if problems:
        raise ValueError(
            "invalid model: " + "; ".join(json.dumps(v.to_json()) for v in problems)
        )
    if model.n > _max_points():
        raise ValueError(
            f"model has {model.n} points, over TOPODYN_MAX_POINTS={_max_points()}"
        )
    return model


def _parse_scenario(model: SubsetModel, text: str) -> Scenario:
    try:
        x_str, u_str = text.split(",")
        x, u_index = int(x_str), int(u_str)
    except ValueError:
        raise ValueError("scenario must look like 'x,u-index'") from None
    opens = model.space.opens_sorted()
    if not 0 <= u_index < len(opens):
        raise ValueError(f"open-set index {u_index} out of range (0..{len(opens) - 1})")
    return Scenario(x, opens[u_index])


# --- subcommands -------------------------------------------------------------


def _cmd_parse(args: argparse.Namespace) -> int:
    f = parse(args.formula)
    _emit({"text": format_formula(f), "ast": formula_to_json(f)})
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    f = parse(args.formula)
    if isinstance(model, SubsetModel):
        if args.scenario is None:
            raise ValueError("subset-space evaluation needs --scenario x,u-index")
        s = _parse_scenario(model, args.scenario)
        truth = checker.eval_subset(model, f, s)
        _emit({"truth": truth, "scenario": s.to_json()})
        return 0 if truth else 1
    if isinstance(model, PDLModel):
        ext = checker.eval_pdl_relational(model, f)
    else:
        ext = checker.eval_dtl(model, f)
    if args.at is not None:
        if not 0 <= args.at < model.n:
            raise ValueError(f"point {args.at} out of range")
        truth = bool(ext >> args.at & 1)
        _emit({"truth": truth, "at": args.at})
        return 0 if truth else 1
    _emit({"extension": points_from_mask(ext)})
    return 0


def _cmd_frame(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    prop = args.prop
    if prop == frameprops.SERIALITY:
        if not isinstance(model, PDLModel):
            raise ValueError("seriality applies to relational models")
        report = frameprops.is_serial(model)
        _emit(report.to_json())
        return 0 if report.holds else 1

    out: dict = {"property": prop, "programs": {}}
    holds = True
    for name in model.alphabet:
        if isinstance(model, DTModel):
            fn = model.fn[name]
        elif isinstance(model, SubsetModel):
            fn = model.pfn[name]
        else:
            raise ValueError("continuity/openness apply to map-based models")
        if prop == frameprops.CONTINUITY:
            if None in fn:
                raise ValueError("continuity needs total maps")
            rep = frameprops.is_continuous(model.space, fn)
        else:
            rep = frameprops.is_open_map(model.space, fn)
        entry = rep.to_json()
        if args.scheme:
            if not isinstance(model, DTModel):
                raise ValueError("--scheme needs a dynamic-topological model")
            srep = frameprops.validates_scheme(model.space, fn, prop)
            entry["scheme"] = srep.to_json()
            entry["routes_agree"] = srep.holds == rep.holds
        holds &= rep.holds
        out["programs"][name] = entry
    out["holds"] = holds
    _emit(out)
    return 0 if holds else 1


def _cmd_transform(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    if not isinstance(model, PDLModel):
        raise ValueError("transform starts from a relational model")
    space = transform.build_network_space(model, args.depth, args.budget)
    out: dict = {"network_space": transform.network_space_to_json(space)}
    out["stratum_sizes"] = space.stratum_sizes()
    code = 0
    formulas: list[Formula] = []
    for chunk in args.check or []:
        for piece in chunk.split(";"):
            piece = piece.strip()
            if piece:
                formulas.append(parse(piece))
    if formulas:
        report = transform.check_truth_preservation(model, formulas, args.depth, args.budget)
        out["preservation"] = report.to_json()
        code = 0 if report.ok else 1
    _emit(out)
    return code


def _cmd_announce(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    if not isinstance(model, SubsetModel):
        raise ValueError("announcements live on subset-space models")
    phi, psi = parse(args.phi), parse(args.psi)
    s = _parse_scenario(model, args.scenario)
    result = announce(model, phi, s)
    agrees = check_test_announcement_identity(model, phi, psi, s)
    out = result.to_json()
    out["identity_agrees"] = agrees
    _emit(out)
    return 0 if agrees else 1


def _cmd_prove(args: argparse.Namespace) -> int:
    with open(args.derivation, encoding="utf-8") as fh:
        obj = json.load(fh)
    derivation = proofkit.derivation_from_json(obj)
    result = proofkit.check_derivation(derivation)
    _emit(result.to_json())
    return 0 if result.ok else 1


def _cmd_audit(args: argparse.Namespace) -> int:
    if args.points > _max_points():
        raise ValueError(
            f"--points {args.points} is over TOPODYN_MAX_POINTS={_max_points()}"
        )
    cfg = harness.GenConfig(
        seed=args.seed,
        max_points=args.points,
        num_programs=args.programs,
        model_class=args.model_class,
    )
    schemes = set(args.scheme) if args.scheme else None
    report = harness.audit(
        args.system, cfg, trials=args.trials, instances=args.instances, schemes=schemes
    )
    _emit(report.to_json())
    print(f"elapsed: {report.elapsed:.3f}s", file=sys.stderr)
    return 0 if report.ok else 1


def _cmd_refute(args: argparse.Namespace) -> int:
    if args.bound > _max_points():
        raise ValueError(
            f"--bound {args.bound} is over TOPODYN_MAX_POINTS={_max_points()}"
        )
    f = parse(args.formula)
    found = harness.search_countermodel(f, bound=args.bound, model_class=args.model_class)
    if found is None:
        _emit({"found": False, "bound": args.bound, "model_class": args.model_class})
        return 0
    model, witness = found
    out = {
        "found": True,
        "model": model_to_json(model),
        "formula": format_formula(f),
    }
    if isinstance(witness, Scenario):
        out["scenario"] = witness.to_json()
    else:
        out["point"] = witness
    _emit(out)
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topodyn",
        description="Model checking and frame analysis for program logics "
        "over topological state spaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a formula and print its AST")
    p.add_argument("-f", "--formula", required=True)
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("eval", help="evaluate a formula on a model")
    p.add_argument("-m", "--model", required=True, help="model JSON file")
    p.add_argument("-f", "--formula", required=True)
    p.add_argument("--at", type=int, help="evaluate at one point")
    p.add_argument("--scenario", help="x,u-index (subset models)")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("frame", help="decide a frame property")
    p.add_argument("-m", "--model", required=True)
    p.add_argument(
        "--prop",
        required=True,
        choices=[frameprops.CONTINUITY, frameprops.OPENNESS, frameprops.SERIALITY],
    )
    p.add_argument(
        "--scheme",
        action="store_true",
        help="also decide via scheme validity and report agreement",
    )
    p.set_defaults(func=_cmd_frame)

    p = sub.add_parser("transform", help="build the bounded network space")
    p.add_argument("-m", "--model", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument(
        "--check",
        action="append",
        help="formulas (semicolon separated, repeatable) to verify truth preservation",
    )
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("announce", help="announcement update and identity check")
    p.add_argument("-m", "--model", required=True)
    p.add_argument("--phi", required=True, help="announced formula (box/next fragment)")
    p.add_argument("--psi", required=True, help="formula checked after update")
    p.add_argument("--scenario", required=True, help="x,u-index")
    p.set_defaults(func=_cmd_announce)

    p = sub.add_parser("prove", help="check a Hilbert-style derivation")
    p.add_argument("-d", "--derivation", required=True, help="derivation JSON file")
    p.set_defaults(func=_cmd_prove)

    p = sub.add_parser("audit", help="randomized soundness audit")
    p.add_argument("--system", required=True, choices=["SPDL0", "SPDL0_SEQ", "DTEL"])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--points", type=int, default=5)
    p.add_argument("--programs", type=int, default=2)
    p.add_argument("--instances", type=int, default=3)
    p.add_argument(
        "--model-class",
        choices=list(harness.MODEL_CLASSES),
        help="override the class paired with the system",
    )
    p.add_argument(
        "--scheme", action="append", help="restrict to named schemes (repeatable)"
    )
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("refute", help="search for a small countermodel")
    p.add_argument("-f", "--formula", required=True)
    p.add_argument("--bound", type=int, default=4)
    p.add_argument(
        "--model-class",
        default="dtl",
        choices=["dtl", "dtl_open", "dtl_continuous", "pdl_serial", "subset"],
    )
    p.set_defaults(func=_cmd_refute)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except (ParseError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
