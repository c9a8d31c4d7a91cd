"""Exact and symbolic counting in homocyclic abelian groups."""

import itertools
import random

import pytest

from pfdim.abelian import (AbelianError, ExponentPolynomial, LinearTerm,
                           StandardAtom, brute_count, derived_bound,
                           evaluate_poly, exact_count, make_poly,
                           parse_standard_conjunction, symbolic_count,
                           symbolic_value)


def atom_eq(xc, yc, negated=False):
    return StandardAtom("eq", LinearTerm(tuple(xc), tuple(yc)), negated=negated)


def atom_div(base, level, xc, yc, negated=False):
    return StandardAtom("div", LinearTerm(tuple(xc), tuple(yc)),
                        level=level, negated=negated, base=base)


def random_atoms(rng, r=1, max_atoms=3, p=2):
    atoms = []
    for _ in range(rng.randint(1, max_atoms)):
        xc = tuple(rng.randint(-4, 4) for _ in range(r))
        yc = (rng.randint(-4, 4),)
        neg = rng.random() < 0.35
        if rng.random() < 0.5:
            atoms.append(atom_eq(xc, yc, neg))
        else:
            base = p if rng.random() < 0.8 else (3 if p == 2 else 2)
            atoms.append(atom_div(base, rng.randint(1, 2), xc, yc, neg))
    return atoms


class TestExactCount:
    def test_single_congruence(self):
        # 2x + y = 0 in Z/4: one solution per parameter value
        atoms = [atom_eq((2,), (1,))]
        assert exact_count(atoms, [(1,)], 2, 2, 1).value == 0
        assert exact_count(atoms, [(2,)], 2, 2, 1).value == 2

    def test_divisibility(self):
        # 2 | x in Z/8 has 4 solutions
        atoms = [atom_div(2, 1, (1,), (0,))]
        assert exact_count(atoms, [(0,)], 2, 3, 1).value == 4

    def test_coprime_base_is_trivial(self):
        atoms = [atom_div(3, 1, (1,), (0,))]
        assert exact_count(atoms, [(0,)], 2, 2, 1).value == 4

    def test_matches_brute_force_grid(self):
        rng = random.Random(23)
        for _ in range(150):
            p = rng.choice([2, 3])
            n = rng.choice([1, 2])
            m = rng.choice([1, 2])
            atoms = random_atoms(rng, p=p)
            params = [tuple(rng.randrange(p ** n) for _ in range(m))]
            assert (exact_count(atoms, params, p, n, m).value
                    == brute_count(atoms, params, p, n, m).value)


class TestPolynomials:
    def test_index_range_enforced(self):
        with pytest.raises(AbelianError):
            make_poly(1, 1, {(2, 0): 1})
        with pytest.raises(AbelianError):
            make_poly(1, 1, {(0, 2): 1})

    def test_evaluation(self):
        # X^(n-1) - X^(n-2) at p=2, m=1
        P = make_poly(1, 2, {(1, -1): 1, (1, -2): -1})
        assert evaluate_poly(P, 2, 1, 3).value == 4 - 2

    def test_negative_exponent_rejected_when_it_matters(self):
        P = make_poly(1, 2, {(0, -1): 1})
        with pytest.raises(AbelianError):
            evaluate_poly(P, 2, 1, 0)

    def test_json_shape(self):
        P = make_poly(1, 1, {(1, 0): 1, (0, 1): -1})
        d = P.to_json_dict()
        assert d["k"] == 1 and d["d"] == 1
        assert {(c["i"], c["j"], c["c"]) for c in d["coeffs"]} == {
            (1, 0, 1), (0, 1, -1)}


class TestSymbolic:
    def test_guard_uniqueness_and_exactness(self):
        rng = random.Random(31)
        for _ in range(200):
            p = rng.choice([2, 3])
            n = rng.choice([1, 2, 3])
            m = rng.choice([1, 2])
            atoms = random_atoms(rng, p=p)
            params = [tuple(rng.randrange(p ** n) for _ in range(m))]
            try:
                cases = symbolic_count(atoms, 1, p)
            except AbelianError:
                continue
            firing = [c for c in cases if c.fires(n, m, params)]
            assert len(firing) == 1
            got = evaluate_poly(firing[0].poly, p, m, n).value
            assert got == brute_count(atoms, params, p, n, m).value

    def test_decoupled_two_variables(self):
        rng = random.Random(37)
        for _ in range(100):
            p = rng.choice([2, 3])
            n = rng.choice([1, 2])
            m = 1
            atoms = []
            for var in range(2):
                xc = [0, 0]
                xc[var] = rng.choice([1, 2, 3, -1])
                atoms.append(atom_eq(tuple(xc), (rng.randint(-2, 2),))
                             if rng.random() < 0.5 else
                             atom_div(p, rng.randint(1, 2), tuple(xc),
                                      (rng.randint(-2, 2),)))
            params = [(rng.randrange(p ** n),)]
            case, got = symbolic_value(atoms, 2, params, p, n, m)
            mod = p ** n
            want = 0
            for x1, x2 in itertools.product(range(mod), repeat=2):
                ok = True
                for a in atoms:
                    t = (a.term.x_coeffs[0] * x1 + a.term.x_coeffs[1] * x2
                         + a.term.y_coeffs[0] * params[0][0]) % mod
                    if a.kind == "eq":
                        hold = t == 0
                    elif a.base != p:
                        hold = True
                    else:
                        hold = t % (p ** min(a.level, n)) == 0
                    if a.negated:
                        hold = not hold
                    if not hold:
                        ok = False
                        break
                if ok:
                    want += 1
            assert got.value == want

    def test_coupled_variables_rejected(self):
        atoms = [atom_eq((1, 1), (0,))]
        with pytest.raises(AbelianError):
            symbolic_count(atoms, 2, 2)

    def test_derived_bound_covers_levels_and_valuations(self):
        atoms = [atom_div(2, 2, (4,), (0,)), atom_eq((2,), (1,))]
        d = derived_bound(atoms, 2)
        assert d >= 2


class TestConjunctionParser:
    def test_parse_roundtrip_semantics(self):
        atoms = parse_standard_conjunction(
            "2*x1 + 1*y1 = 0 & !div(2^1, 1*x1)", r=1, s=1)
        assert len(atoms) == 2
        assert atoms[0].kind == "eq" and not atoms[0].negated
        assert atoms[1].kind == "div" and atoms[1].negated
        assert atoms[1].level == 1 and atoms[1].base == 2

    def test_bad_input(self):
        with pytest.raises(AbelianError):
            parse_standard_conjunction("x1 + 3 = 0", r=1, s=0)
        with pytest.raises(AbelianError):
            parse_standard_conjunction("2*x9 = 0", r=1, s=0)
