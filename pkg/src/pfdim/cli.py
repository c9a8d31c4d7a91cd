"""Command-line surface: every numeric output is exact (big integers and
rationals serialized as strings).  Exit codes: 0 success, 1 usage/input
error, 2 verified-property violation (a detected bug, kept distinct so CI
can tell it apart from bad input)."""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction
from typing import List, Optional

from . import abelian, dimension, families, groups, measure, vspace
from .counting import count as engine_count
from .families import get_family
from .logic import PfdimError, load_structure
from .parser import ParseDiagnostic, parse_formula


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _parse_indices(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise PfdimError(f"bad index list {text!r}")


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise PfdimError(f"bad rational {text!r}")


def _default_workers() -> int:
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# subcommand implementations


def _cmd_count(args) -> int:
    M = load_structure(args.structure)
    phi = parse_formula(args.formula, M.signature)
    fixed = {}
    for item in args.fix or []:
        for piece in item.split(","):
            if not piece.strip():
                continue
            name, _, val = piece.partition("=")
            fixed[name.strip()] = int(val)
    counted = args.count_vars.split(",") if args.count_vars else []
    result = engine_count(phi, M, fixed, [v.strip() for v in counted],
                          workers=args.workers, budget=args.budget)
    _emit({"count": str(result.value)})
    return 0


def _cmd_family(args) -> int:
    family = get_family(args.name)
    if args.formula:
        result = families.family_count(family, args.formula, args.index,
                                       selector=args.selector,
                                       workers=args.workers,
                                       budget=args.budget)
        _emit({"familyId": args.name, "index": args.index,
               "formula": args.formula, "selector": args.selector,
               "count": str(result.value)})
        return 0
    M = families.generate(args.name, args.index)
    text = M.to_json()
    if args.out in (None, "-"):
        sys.stdout.write(text + "\n")
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return 0


def _sequence(family, formula, selector, indices, workers, budget):
    from .counting import CardinalitySequence
    points = tuple(
        (n, families.family_count(family, formula, n, selector=selector,
                                  workers=workers, budget=budget))
        for n in indices)
    return CardinalitySequence(family.family_id, formula, selector, points)


def _cmd_dim_compare(args) -> int:
    family = get_family(args.family)
    indices = _parse_indices(args.indices)
    X = _sequence(family, args.formula_x, args.selector_x, indices,
                  args.workers, args.budget)
    Y = _sequence(family, args.formula_y, args.selector_y, indices,
                  args.workers, args.budget)
    verdict = dimension.delta_compare(X, Y, tau=args.tau)
    _emit(verdict.to_json_dict())
    return 0


def _parse_step(text: str):
    formula, sep, selector = text.partition("@")
    return (formula.strip(), selector.strip() if sep else None)


def _cmd_chain(args) -> int:
    family = get_family(args.family)
    steps = [_parse_step(s) for s in args.step]
    report = dimension.chain_detect(family, steps,
                                    _parse_indices(args.indices),
                                    tau=args.tau)
    _emit(report.to_json_dict())
    return 0


def _cmd_spectrum(args) -> int:
    family = get_family(args.family)
    report = dimension.fmv_spectrum(family, args.formula,
                                    _parse_indices(args.indices),
                                    gamma=args.gamma)
    if args.csv:
        dimension.export_csv(report, args.csv)
    _emit(report.to_json_dict())
    return 0


def _parse_group_params(args) -> list:
    params = []
    for item in args.param or []:
        try:
            params.append(tuple(int(x) for x in item.split(",")))
        except ValueError:
            raise PfdimError(f"bad parameter tuple {item!r}")
    return params


def _cmd_abelian_count(args) -> int:
    atoms = abelian.parse_standard_conjunction(args.formula, args.r, args.s)
    params = _parse_group_params(args)
    if args.symbolic:
        cases = abelian.symbolic_count(atoms, args.r, args.p, d=args.d)
        payload = {"cases": [c.to_json_dict() for c in cases]}
        if params or args.s == 0:
            case, value = abelian.symbolic_value(atoms, args.r, params,
                                                 args.p, args.n, args.m,
                                                 d=args.d)
            payload["fired"] = case.to_json_dict()
            payload["count"] = str(value.value)
        _emit(payload)
        return 0
    result = abelian.exact_count(atoms, params, args.p, args.n, args.m)
    if args.p ** (args.n * args.m) <= 10 ** 6:
        check = abelian.brute_count(atoms, params, args.p, args.n, args.m)
        if result.value != check.value:
            _emit({"violation": "oracle/brute-force mismatch",
                   "oracle": str(result.value),
                   "bruteForce": str(check.value)})
            return 2
    _emit({"count": str(result.value)})
    return 0


def _cmd_vs_count(args) -> int:
    space = families.make_vector_space(args.q, args.dim)
    if args.coset_spec:
        with open(args.coset_spec) as fh:
            spec = json.load(fh)

        def coset(d):
            return vspace.Coset(tuple(d["point"]),
                                tuple(tuple(r) for r in d.get("rows", [])))

        result = vspace.count_coset_difference(
            space, [coset(d) for d in spec.get("include", [])],
            [coset(d) for d in spec.get("exclude", [])])
        _emit({"count": str(result.count.value),
               "poly": result.poly.to_json_dict()})
        return 0
    w = _parse_indices(args.w) if args.w else []
    wp = _parse_indices(args.wprime) if args.wprime else []
    case = vspace.count_theta_case(space, w, wp)
    _emit({"count": str(case.count.value), "guard": case.guard,
           "poly": case.poly.to_json_dict(),
           "firstDisjunct": {"count": str(case.first_count.value),
                             "poly": case.first_poly.to_json_dict()},
           "secondDisjunct": {"count": str(case.second_count.value),
                              "poly": case.second_poly.to_json_dict()}})
    return 0


def _load_space(path: str):
    with open(path) as fh:
        return measure.space_from_json(fh.read())


def _frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _cmd_measure_kcap(args) -> int:
    space, events = _load_space(args.space)
    try:
        witness = measure.find_k_intersection(space, events, args.k)
    except measure.HypothesisError:
        raise
    except measure.MeasureError as exc:
        _emit({"violation": str(exc)})
        return 2
    if witness is None:
        _emit({"exhausted": True})
        return 0
    _emit({"indices": list(witness.indices),
           "measure": _frac_str(witness.measure),
           "bound": _frac_str(witness.bound)})
    return 0


def _cmd_pairwise_check(args) -> int:
    space, events = _load_space(args.space)
    eps = _parse_fraction(args.eps)
    try:
        witness = measure.pairwise_threshold_check(space, events, eps)
    except measure.HypothesisError:
        raise
    except measure.MeasureError as exc:
        _emit({"violation": str(exc)})
        return 2
    _emit({"pair": list(witness.indices),
           "measure": _frac_str(witness.measure),
           "bound": _frac_str(witness.bound)})
    return 0


def _cmd_word_image(args) -> int:
    G = groups.builtin_group(args.group)
    word = groups.parse_word(args.word)
    image = groups.word_image(word, G, budget=args.budget or 10 ** 8)
    payload = {"group": args.group, "word": args.word,
               "imageSize": len(image), "image": sorted(image)}
    if args.triple:
        covers, missing = groups.triple_product_covers(image, image, image, G)
        payload["tripleProductCovers"] = covers
        payload["missing"] = missing
    _emit(payload)
    return 0


# ---------------------------------------------------------------------------
# argument parser


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="pfdim",
        description="Exact counting of definable sets in finite structures")
    top.add_argument("--seed", type=int, default=None,
                     help="seed for randomized harnesses")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, workers=True):
        if workers:
            p.add_argument("--workers", type=int, default=_default_workers())
        p.add_argument("--budget", type=int, default=None,
                       help="assignment-visit budget (default PFDIM_BUDGET)")

    p = sub.add_parser("count", help="count satisfying assignments")
    p.add_argument("--structure", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--fix", action="append", help="var=elementId[,var=id...]")
    p.add_argument("--count-vars", required=True)
    common(p)
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("family", help="generate or count along a family")
    p.add_argument("--name", required=True)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--formula")
    p.add_argument("--selector")
    common(p)
    p.set_defaults(func=_cmd_family)

    p = sub.add_parser("dim-compare", help="compare growth of two count sequences")
    p.add_argument("--family", required=True)
    p.add_argument("--formula-x", required=True)
    p.add_argument("--selector-x")
    p.add_argument("--formula-y", required=True)
    p.add_argument("--selector-y")
    p.add_argument("--indices", required=True)
    p.add_argument("--tau", type=float, default=dimension.TAU_DEFAULT)
    common(p)
    p.set_defaults(func=_cmd_dim_compare)

    p = sub.add_parser("chain", help="detect strictly dropping chains")
    p.add_argument("--family", required=True)
    p.add_argument("--step", action="append", required=True,
                   help="formula[@selector], repeatable")
    p.add_argument("--indices", required=True)
    p.add_argument("--tau", type=float, default=dimension.TAU_DEFAULT)
    common(p, workers=False)
    p.set_defaults(func=_cmd_chain)

    p = sub.add_parser("spectrum", help="per-parameter log-count spectrum")
    p.add_argument("--family", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--indices", required=True)
    p.add_argument("--gamma", type=float, default=dimension.GAMMA_DEFAULT)
    p.add_argument("--csv", help="write (index, series, logCount) rows here")
    common(p, workers=False)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("abelian-count",
                       help="count standard-form sets in (Z/p^nZ)^m")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=int, default=1, help="counted variables")
    p.add_argument("--s", type=int, default=0, help="parameter variables")
    p.add_argument("--formula", required=True)
    p.add_argument("--param", action="append",
                   help="parameter tuple 'c1,c2,...', repeatable")
    p.add_argument("--symbolic", action="store_true")
    p.add_argument("--d", type=int, default=None)
    p.set_defaults(func=_cmd_abelian_count)

    p = sub.add_parser("vs-count", help="count theta/coset sets over (V, F)")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--w", help="comma-separated vector ids w_1..w_m")
    p.add_argument("--wprime", help="comma-separated vector ids w'_1..w'_m'")
    p.add_argument("--coset-spec", help="JSON file with include/exclude cosets")
    p.set_defaults(func=_cmd_vs_count)

    p = sub.add_parser("measure-kcap", help="k-wise intersection bound witness")
    p.add_argument("--space", required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=_cmd_measure_kcap)

    p = sub.add_parser("pairwise-check", help="pairwise intersection threshold")
    p.add_argument("--space", required=True)
    p.add_argument("--eps", required=True)
    p.set_defaults(func=_cmd_pairwise_check)

    p = sub.add_parser("word-image", help="image of a word map on a group")
    p.add_argument("--group", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--triple", action="store_true",
                   help="also check whether image^3 covers the group")
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=_cmd_word_image)

    return top


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; remap to the input-error code
        return 0 if exc.code in (0, None) else 1
    if args.seed is not None:
        random.seed(args.seed)
    try:
        return args.func(args)
    except ParseDiagnostic as diag:
        print(f"parse error: {diag}", file=sys.stderr)
        return 1
    except (PfdimError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
