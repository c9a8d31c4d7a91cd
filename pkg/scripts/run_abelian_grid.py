#!/usr/bin/env python3
"""Sweep the abelian counting oracle against brute force over a (p, n, m) grid.

Random conjunctions of standard atoms are generated per grid cell; the
closed-form count and the brute-force count must agree exactly. Also checks
that exactly one symbolic guard fires per single-variable case.
"""

import argparse
import json
import random
import sys

from pfdim.abelian import (AbelianError, LinearTerm, StandardAtom,
                           brute_count, evaluate_poly, exact_count,
                           symbolic_count)


def random_atom(rng, p, r=1):
    term = LinearTerm(tuple(rng.randint(-4, 4) for _ in range(r)),
                      (rng.randint(-4, 4),))
    negated = rng.random() < 0.4
    if rng.random() < 0.5:
        return StandardAtom("eq", term, negated=negated)
    return StandardAtom("div", term, level=rng.randint(1, 2),
                        negated=negated, base=p)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)

    grid = [(p, n, m) for p in (2, 3) for n in (1, 2, 3) for m in (1, 2)]
    exact_mismatches = 0
    symbolic_mismatches = 0
    guard_failures = 0
    symbolic_cases = 0
    for _ in range(args.cases):
        p, n, m = rng.choice(grid)
        mod = p ** n
        atoms = [random_atom(rng, p) for _ in range(rng.randint(1, 3))]
        params = [tuple(rng.randrange(mod) for _ in range(m))]
        want = brute_count(atoms, params, p, n, m).value
        if exact_count(atoms, params, p, n, m).value != want:
            exact_mismatches += 1
        try:
            catalog = symbolic_count(atoms, 1, p)
        except AbelianError:
            continue
        symbolic_cases += 1
        firing = [c for c in catalog if c.fires(n, m, params)]
        if len(firing) != 1:
            guard_failures += 1
        elif evaluate_poly(firing[0].poly, p, m, n).value != want:
            symbolic_mismatches += 1

    json.dump({"cases": args.cases,
               "exactMismatches": exact_mismatches,
               "symbolicCases": symbolic_cases,
               "guardFailures": guard_failures,
               "symbolicMismatches": symbolic_mismatches},
              sys.stdout, indent=2)
    print()
    bad = exact_mismatches + guard_failures + symbolic_mismatches
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
