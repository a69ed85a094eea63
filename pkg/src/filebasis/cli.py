"""Command-line entry point.

Exit codes: 0 yes/ok, 1 no/fail, 2 budget-exceeded, 64 usage error,
65 malformed data.  All results are emitted as JSON so harnesses can
diff structured output.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from fractions import Fraction

from . import construction, decision, diagram
from .construction import ConstructionParams, MalformedParamsError, Presentation
from .decision import Budget, Outcome
from .words import MalformedWordError, Word, deglex_compare, iter_reduced_words, parse_word

EX_YES = 0
EX_NO = 1
EX_BUDGET = 2
EX_USAGE = 64
EX_DATA = 65


def _emit(obj: dict) -> None:
    json.dump(obj, sys.stdout, indent=2, default=str)
    sys.stdout.write("\n")


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedParamsError(f"bad rational {text!r}: {exc}") from exc


def _params_from_args(args) -> ConstructionParams:
    return ConstructionParams(n=args.n, lambda1=_parse_fraction(args.lambda1), N=args.N)


def _budget_from_args(args) -> Budget:
    return Budget(
        max_edges=args.max_edges, max_word_len=args.max_len, max_states=args.max_states
    )


def _load_presentation(path: str) -> Presentation:
    with open(path) as fh:
        return Presentation.from_dict(json.load(fh))


def _outcome_exit(out: Outcome) -> int:
    if out.is_yes:
        return EX_YES
    if out.is_no:
        return EX_NO
    return EX_BUDGET


def _witness_dict(witness) -> object:
    if witness is None:
        return None
    if isinstance(witness, Word):
        return str(witness)
    if isinstance(witness, decision.FillWitness):
        return {
            "kind": "filling",
            "contour": _letters_text(witness.contour),
            "trace": [
                {"position": j, "face_label": _letters_text(variant)}
                for j, variant in witness.trace
            ],
            "edges": witness.edges,
            "area": witness.area,
        }
    if isinstance(witness, decision.RewriteWitness):
        return {
            "kind": "rewriting",
            "meeting_point": _letters_text(witness.meeting_point),
            "steps_from_u": [_letters_text(s) for s in witness.steps_from_u],
            "steps_from_v": [_letters_text(s) for s in witness.steps_from_v],
        }
    if isinstance(witness, decision.ConjugacyWitness):
        return {
            "kind": "conjugacy",
            "conjugator": str(witness.conjugator),
            "certificate": _witness_dict(witness.certificate),
        }
    return str(witness)


def _letters_text(letters) -> str:
    return str(Word.from_letters(list(letters)))


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    params = _params_from_args(args)
    report = construction.validate_params(params)
    _emit(
        {
            "params": {"n": params.n, "lambda1": str(params.lambda1), "N": params.N},
            "derived": {
                "lambda2": str(params.lambda2),
                "mu": str(params.mu),
                "q": str(params.q),
            },
            "report": report.as_dict(),
        }
    )
    return EX_YES if report.all_passed else EX_NO


def cmd_gen(args) -> int:
    params = _params_from_args(args)
    budget = _budget_from_args(args)
    pres = construction.generate(params, args.count, budget)
    problems = pres.validate()
    _emit(
        {
            "presentation": pres.as_dict(),
            "truncated": pres.truncated,
            "violations": problems,
        }
    )
    if pres.truncated:
        return EX_BUDGET
    return EX_YES


def cmd_eq(args) -> int:
    pres = _load_presentation(args.presentation)
    u = parse_word(args.u, pres.params.n)
    v = parse_word(args.v, pres.params.n)
    out = decision.equals_in_G(pres, u, v, _budget_from_args(args), engine=args.engine)
    result = {"outcome": out.value}
    if args.witness:
        result["witness"] = _witness_dict(out.witness)
    _emit(result)
    return _outcome_exit(out)


def cmd_nf(args) -> int:
    pres = _load_presentation(args.presentation)
    g = parse_word(args.g, pres.params.n)
    out = decision.regular_normal_form(pres, g, _budget_from_args(args), engine=args.engine)
    result = {"outcome": out.value}
    if out.is_yes:
        result["normal_form"] = str(out.witness)
    _emit(result)
    return _outcome_exit(out)


def cmd_conj(args) -> int:
    pres = _load_presentation(args.presentation)
    u = parse_word(args.u, pres.params.n)
    v = parse_word(args.v, pres.params.n)
    out = decision.are_conjugate(pres, u, v, _budget_from_args(args))
    result = {"outcome": out.value}
    if args.witness or out.is_yes:
        result["witness"] = _witness_dict(out.witness)
    _emit(result)
    return _outcome_exit(out)


def cmd_check_diagram(args) -> int:
    pres = _load_presentation(args.presentation)
    d = diagram.load_diagram(args.diagram)
    report = diagram.validate_diagram(d, pres.relator_words())
    result = {"validation": report.as_dict()}
    if not report.ok:
        _emit(result)
        return EX_NO
    status = EX_YES
    if args.condition:
        params = pres.params
        sel = diagram.special_selection(d, params.n)
        if args.condition == "B":
            lambda1 = _parse_fraction(args.lambda1) if args.lambda1 else params.lambda1
            lambda2 = _parse_fraction(args.lambda2) if args.lambda2 else params.lambda2
            reports = diagram.check_condition_B(d, sel, lambda1, lambda2)
            result["condition_B"] = [asdict(r) for r in reports]
            if not all(r.b0 and r.b1 and r.b2 for r in reports):
                status = EX_NO
        elif args.condition == "X":
            ok, met = diagram.check_condition_X(d.map, sel, params.mu)
            result["condition_X"] = {"passed": ok, "metrics": asdict(met)}
            if not ok:
                status = EX_NO
        elif args.condition == "main-lemma":
            ok, met = diagram.check_main_lemma(d, sel, params)
            result["main_lemma"] = {"passed": ok, "metrics": asdict(met)}
            if not ok:
                status = EX_NO
    _emit(result)
    return status


def cmd_enum_words(args) -> int:
    words = []
    for w in iter_reduced_words(args.n):
        if len(words) >= args.count:
            break
        words.append(str(w))
    _emit({"n": args.n, "words": words})
    return EX_YES


# ---------------------------------------------------------------------------
# argument parsing


def _add_budget_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-edges", type=int, default=10**6)
    p.add_argument("--max-len", type=int, default=200)
    p.add_argument("--max-states", type=int, default=20000)


def _add_params_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda1", required=True, help="exact rational, e.g. 1/315")
    p.add_argument("--N", type=int, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="filebasis",
        description="Group presentations with regular normal-form bases: "
        "generation, diagram checking, budgeted decision procedures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check parameter inequalities exactly")
    _add_params_flags(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gen", help="run the inductive relator construction")
    _add_params_flags(p)
    p.add_argument("--count", type=int, default=1)
    _add_budget_flags(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("eq", help="bounded equality test in the presented group")
    p.add_argument("u")
    p.add_argument("v")
    p.add_argument("--presentation", required=True)
    p.add_argument("--engine", choices=["diagram", "rewrite", "both"], default="diagram")
    p.add_argument("--witness", action="store_true")
    _add_budget_flags(p)
    p.set_defaults(func=cmd_eq)

    p = sub.add_parser("nf", help="deg-lex-least regular word equal to the input")
    p.add_argument("g")
    p.add_argument("--presentation", required=True)
    p.add_argument("--engine", choices=["diagram", "rewrite", "both"], default="diagram")
    _add_budget_flags(p)
    p.set_defaults(func=cmd_nf)

    p = sub.add_parser("conj", help="bounded conjugacy test")
    p.add_argument("u")
    p.add_argument("v")
    p.add_argument("--presentation", required=True)
    p.add_argument("--witness", action="store_true")
    _add_budget_flags(p)
    p.set_defaults(func=cmd_conj)

    p = sub.add_parser("check-diagram", help="validate a diagram file and run checkers")
    p.add_argument("diagram")
    p.add_argument("--presentation", required=True)
    p.add_argument("--condition", choices=["B", "X", "main-lemma"])
    p.add_argument("--lambda1")
    p.add_argument("--lambda2")
    p.set_defaults(func=cmd_check_diagram)

    p = sub.add_parser("enum-words", help="stream reduced words in deg-lex order")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=20)
    p.set_defaults(func=cmd_enum_words)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; remap to the documented code
        return EX_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (MalformedParamsError, argparse.ArgumentTypeError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EX_USAGE
    except (MalformedWordError, diagram.DiagramError, construction.ConstructionError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EX_DATA
    except FileNotFoundError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EX_DATA
    except json.JSONDecodeError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EX_DATA


if __name__ == "__main__":
    sys.exit(main())
