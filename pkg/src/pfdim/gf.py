"""Small finite fields GF(q) for q in {2,3,4,5,7,8,9}.

Elements are integers 0..q-1 encoding polynomial coefficient vectors over
GF(p) in base p (so for prime q this is plain modular arithmetic).
Non-prime fields use fixed irreducible polynomials; addition and
multiplication are precomputed tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

from .logic import PfdimError

# irreducible polynomial coefficients (monic, low degree first, constant..x^k)
_IRRED = {
    4: (2, [1, 1, 1]),    # x^2 + x + 1 over GF(2)
    8: (2, [1, 1, 0, 1]),  # x^3 + x + 1 over GF(2)
    9: (3, [1, 0, 1]),    # x^2 + 1 over GF(3)
}

_PRIMES = {2, 3, 5, 7}

SUPPORTED_Q = (2, 3, 4, 5, 7, 8, 9)


@dataclass(frozen=True)
class GF:
    q: int
    p: int
    add: Tuple[Tuple[int, ...], ...] = field(repr=False)
    mul: Tuple[Tuple[int, ...], ...] = field(repr=False)
    neg: Tuple[int, ...] = field(repr=False)
    inv: Tuple[int, ...] = field(repr=False)  # inv[0] unused

    def sub(self, a: int, b: int) -> int:
        return self.add[a][self.neg[b]]

    def elements(self) -> range:
        return range(self.q)


def _poly_digits(x: int, p: int, k: int) -> List[int]:
    out = []
    for _ in range(k):
        out.append(x % p)
        x //= p
    return out


def _from_digits(d: Sequence[int], p: int) -> int:
    x = 0
    for c in reversed(d):
        x = x * p + c
    return x


def make_field(q: int) -> GF:
    if q not in SUPPORTED_Q:
        raise PfdimError(f"q={q} is not a supported prime power")
    if q in _PRIMES:
        p = q
        add = tuple(tuple((a + b) % p for b in range(p)) for a in range(p))
        mul = tuple(tuple((a * b) % p for b in range(p)) for a in range(p))
        neg = tuple((-a) % p for a in range(p))
        inv = tuple(0 if a == 0 else pow(a, -1, p) for a in range(p))
        return GF(q, p, add, mul, neg, inv)

    p, poly = _IRRED[q]
    k = len(poly) - 1

    def padd(a, b):
        da, db = _poly_digits(a, p, k), _poly_digits(b, p, k)
        return _from_digits([(x + y) % p for x, y in zip(da, db)], p)

    def pmul(a, b):
        da, db = _poly_digits(a, p, k), _poly_digits(b, p, k)
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(da):
            for j, y in enumerate(db):
                prod[i + j] = (prod[i + j] + x * y) % p
        # reduce modulo the irreducible polynomial
        for deg in range(2 * k - 2, k - 1, -1):
            c = prod[deg]
            if c:
                prod[deg] = 0
                for i, pc in enumerate(poly[:-1]):
                    prod[deg - k + i] = (prod[deg - k + i] - c * pc) % p
        return _from_digits(prod[:k], p)

    add = tuple(tuple(padd(a, b) for b in range(q)) for a in range(q))
    mul = tuple(tuple(pmul(a, b) for b in range(q)) for a in range(q))
    neg = tuple(_from_digits([(-c) % p for c in _poly_digits(a, p, k)], p)
                for a in range(q))
    inv_list = [0] * q
    for a in range(1, q):
        for b in range(1, q):
            if mul[a][b] == 1:
                inv_list[a] = b
                break
    return GF(q, p, add, mul, neg, tuple(inv_list))


# ---------------------------------------------------------------------------
# Vectors over GF(q): encoded as integers 0..q^dim-1, base-q digit per axis


def vec_decode(v: int, q: int, dim: int) -> Tuple[int, ...]:
    out = []
    for _ in range(dim):
        out.append(v % q)
        v //= q
    return tuple(out)


def vec_encode(coords: Sequence[int], q: int) -> int:
    x = 0
    for c in reversed(coords):
        x = x * q + c
    return x


def vec_add(F: GF, a: Sequence[int], b: Sequence[int]) -> Tuple[int, ...]:
    return tuple(F.add[x][y] for x, y in zip(a, b))


def vec_scale(F: GF, c: int, a: Sequence[int]) -> Tuple[int, ...]:
    return tuple(F.mul[c][x] for x in a)


def rank(F: GF, rows: Sequence[Sequence[int]]) -> int:
    """Rank of a list of coordinate vectors over GF(q), by Gaussian elimination."""
    mat = [list(r) for r in rows]
    if not mat:
        return 0
    ncols = len(mat[0])
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = F.inv[mat[r][col]]
        mat[r] = [F.mul[inv][x] for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                c = mat[i][col]
                mat[i] = [F.sub(x, F.mul[c][y]) for x, y in zip(mat[i], mat[r])]
        r += 1
        if r == len(mat):
            break
    return r


def solve_affine(F: GF, rows: Sequence[Sequence[int]], rhs: Sequence[int]):
    """Solve the linear system A x = b over GF(q), A given by ``rows``.

    Returns (particular solution, nullspace basis) or None if inconsistent.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    aug = [list(r) + [v] for r, v in zip(rows, rhs)]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if aug[i][col] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = F.inv[aug[r][col]]
        aug[r] = [F.mul[inv][x] for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][col] != 0:
                c = aug[i][col]
                aug[i] = [F.sub(x, F.mul[c][y]) for x, y in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][n] != 0:
            return None
    sol = [0] * n
    for i, col in enumerate(pivots):
        sol[col] = aug[i][n]
    free_cols = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free_cols:
        vec = [0] * n
        vec[fc] = 1
        for i, col in enumerate(pivots):
            vec[col] = F.neg[aug[i][fc]]
        basis.append(tuple(vec))
    return tuple(sol), basis
