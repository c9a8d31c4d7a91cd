"""Finite-field arithmetic, rank, and affine solving."""

import itertools
import random

import pytest

from pfdim.gf import (SUPPORTED_Q, make_field, rank, solve_affine, vec_add,
                      vec_decode, vec_encode, vec_scale)


@pytest.mark.parametrize("q", SUPPORTED_Q)
class TestFieldAxioms:
    def test_field_laws(self, q):
        F = make_field(q)
        for a, b in itertools.product(F.elements(), repeat=2):
            assert F.add[a][b] == F.add[b][a]
            assert F.mul[a][b] == F.mul[b][a]
            assert F.add[a][F.neg[a]] == 0
            if a != 0:
                assert F.mul[a][F.inv[a]] == 1
        for a, b, c in itertools.product(F.elements(), repeat=3):
            assert (F.mul[a][F.add[b][c]]
                    == F.add[F.mul[a][b]][F.mul[a][c]])

    def test_encode_decode_roundtrip(self, q):
        for v in range(q ** 2):
            coords = vec_decode(v, q, 2)
            assert vec_encode(coords, q) == v


class TestRank:
    @pytest.mark.parametrize("q", [2, 3, 4])
    def test_rank_counts_span(self, q):
        # rank r in dimension d means the span holds q^r vectors
        F = make_field(q)
        rng = random.Random(41)
        dim = 3
        for _ in range(50):
            rows = [tuple(rng.randrange(q) for _ in range(dim))
                    for _ in range(rng.randint(0, 4))]
            r = rank(F, rows)
            span = {(0,) * dim}
            grew = True
            while grew:
                grew = False
                for v in list(span):
                    for row in rows:
                        for c in range(q):
                            w = vec_add(F, v, vec_scale(F, c, row))
                            if w not in span:
                                span.add(w)
                                grew = True
            assert len(span) == q ** r

    def test_rank_bounds(self):
        F = make_field(5)
        assert rank(F, []) == 0
        assert rank(F, [(0, 0, 0)]) == 0
        assert rank(F, [(1, 0, 0), (2, 0, 0)]) == 1
        assert rank(F, [(1, 0), (0, 1), (1, 1)]) == 2


def apply_matrix(F, A, x):
    out = []
    for row in A:
        acc = 0
        for aij, xj in zip(row, x):
            acc = F.add[acc][F.mul[aij][xj]]
        out.append(acc)
    return tuple(out)


class TestSolveAffine:
    @pytest.mark.parametrize("q", [2, 3, 5])
    def test_solutions_form_exact_set(self, q):
        F = make_field(q)
        rng = random.Random(17)
        for _ in range(80):
            nrows, ncols = rng.randint(1, 3), rng.randint(1, 3)
            A = [tuple(rng.randrange(q) for _ in range(ncols))
                 for _ in range(nrows)]
            b = tuple(rng.randrange(q) for _ in range(nrows))
            expected = {x for x in itertools.product(range(q), repeat=ncols)
                        if apply_matrix(F, A, x) == b}
            sol = solve_affine(F, A, b)
            if not expected:
                assert sol is None
                continue
            particular, basis = sol
            got = set()
            for coeffs in itertools.product(range(q), repeat=len(basis)):
                v = tuple(particular)
                for c, vec in zip(coeffs, basis):
                    v = vec_add(F, v, vec_scale(F, c, vec))
                got.add(v)
            assert got == expected
