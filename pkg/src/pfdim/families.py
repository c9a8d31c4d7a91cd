"""Generators for the finite-structure families used in the growth-rate
experiments, plus the 2-sorted vector spaces and homocyclic groups.

Every family supports two counting routes:

* ``generate(index)`` materializes the actual structure (only possible for
  small indices; equivalence tables grow like the square of the class sizes
  and several families reach ~n^n elements), and

* a block *summary*: the universe partitioned into finitely many blocks on
  which every supported atom is constant, with exact big-integer block
  sizes.  Aggregate counting over blocks yields exact counts at indices far
  beyond any enumeration budget and is cross-checked against the engine at
  small indices in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import gf
from .counting import Count, count as engine_count
from .logic import (And, App, Const, Eq, Exists, Forall, FiniteStructure,
                    Implies, Not, Or, PfdimError, Rel, Signature, Var,
                    free_variables, make_signature)
from .parser import parse_formula

MAX_UNIVERSE = 200_000
MAX_TABLE_ENTRIES = 2_000_000


class FamilyError(PfdimError):
    pass


@dataclass(frozen=True)
class FamilyHandle:
    family_id: str


@dataclass(frozen=True)
class ElemRef:
    """An element named abstractly: class (block) index plus offset inside it.

    ``global_id`` is the dense id in the materialized layout; it may be an
    integer far beyond any materializable universe.
    """
    class_index: int
    offset: int
    global_id: int


@dataclass(frozen=True)
class EquivSummary:
    """One-binary-equivalence family at one index: class sizes in canonical
    order, elements laid out class after class."""
    class_sizes: Tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.class_sizes)

    def class_start(self, ci: int) -> int:
        return sum(self.class_sizes[:ci])

    def element(self, ci: int, offset: int = 0) -> ElemRef:
        if not 0 <= offset < self.class_sizes[ci]:
            raise FamilyError("offset out of class bounds")
        return ElemRef(ci, offset, self.class_start(ci) + offset)


@dataclass(frozen=True)
class NestedPredSummary:
    """Nested unary predicates P_1 > P_2 > ... : levels[i] = |P_{i+1}|,
    strictly decreasing; level of an element = largest i with x in P_i."""
    total: int
    pred_sizes: Tuple[int, ...]  # |P_1|, |P_2|, ...


Summary = object


# ---------------------------------------------------------------------------
# The five named families


def _equiv_signature() -> Signature:
    return make_signature(["S"], relations=[("E", ("S", "S"))])


def _earlyexample_sizes(k: int) -> Tuple[int, ...]:
    return tuple(i * i for i in range(1, k + 1))


def _stablenonattainability_sizes(n: int) -> Tuple[int, ...]:
    return tuple(n ** i for i in range(1, n + 1))


def _findelta_sizes(n: int) -> Tuple[int, ...]:
    # n classes of size n^i for each level i = 1..n
    return tuple(n ** i for i in range(1, n + 1) for _ in range(n))


def _rank2classes_sizes(n: int) -> Tuple[int, ...]:
    return tuple([n] * n + [n * n])


_EQUIV_FAMILIES: Dict[str, Callable[[int], Tuple[int, ...]]] = {
    "earlyexample": _earlyexample_sizes,
    "stablenonattainability": _stablenonattainability_sizes,
    "findelta": _findelta_sizes,
    "rank2classes": _rank2classes_sizes,
}


def _equiv_selectors(family_id: str):
    def class_rank(t: int):
        # a_{n,t}: an element in the class of size n^{n-t}
        def pick(index: int, s: EquivSummary) -> Dict[str, ElemRef]:
            sizes = s.class_sizes
            want = index ** (index - t)
            for ci, sz in enumerate(sizes):
                if sz == want:
                    return {"y": s.element(ci)}
            raise FamilyError(f"no class of size {index}^{index - t}")
        return pick

    if family_id == "stablenonattainability":
        return {f"class-rank-{t}": class_rank(t) for t in range(1, 9)}
    if family_id == "earlyexample":
        def class_i(i: int):
            def pick(index, s):
                if i > index:
                    raise FamilyError(f"class {i} absent at index {index}")
                return {"y": s.element(i - 1)}
            return pick
        sel = {f"class-{i}": class_i(i) for i in range(1, 9)}
        sel["largest-class"] = lambda index, s: {"y": s.element(index - 1)}
        return sel
    if family_id == "findelta":
        def level(i: int):
            def pick(index, s):
                if i > index:
                    raise FamilyError(f"level {i} absent at index {index}")
                return {"y": s.element((i - 1) * index)}
            return pick
        return {f"class-level-{i}": level(i) for i in range(1, 9)}
    if family_id == "rank2classes":
        return {
            "big-class": lambda index, s: {"y": s.element(index)},
            "small-class": lambda index, s: {"y": s.element(0)},
        }
    return {}


def list_families() -> Dict[str, dict]:
    out = {}
    for fid in _EQUIV_FAMILIES:
        out[fid] = {"kind": "equivalence", "parameters": ["index"],
                    "selectors": sorted(_equiv_selectors(fid))}
    out["convsupersimple"] = {"kind": "nested-predicates",
                              "parameters": ["index"], "selectors": []}
    return out


def get_family(family_id: str) -> FamilyHandle:
    if family_id not in list_families():
        raise FamilyError(f"unknown familyId {family_id!r}")
    return FamilyHandle(family_id)


def family_summary(family: FamilyHandle, index: int):
    if index < 1:
        raise FamilyError("index must be >= 1")
    if family.family_id in _EQUIV_FAMILIES:
        return EquivSummary(_EQUIV_FAMILIES[family.family_id](index))
    if family.family_id == "convsupersimple":
        return NestedPredSummary(
            total=index ** index,
            pred_sizes=tuple(index ** (index - i) for i in range(1, index + 1)))
    raise FamilyError(f"unknown familyId {family.family_id!r}")


def family_signature(family: FamilyHandle, index: int) -> Signature:
    if family.family_id in _EQUIV_FAMILIES:
        return _equiv_signature()
    if family.family_id == "convsupersimple":
        return make_signature(
            ["S"], relations=[(f"P{i}", ("S",)) for i in range(1, index + 1)])
    raise FamilyError(f"unknown familyId {family.family_id!r}")


def family_selector(family: FamilyHandle, name: str, index: int) -> Dict[str, ElemRef]:
    summary = family_summary(family, index)
    sels = _equiv_selectors(family.family_id)
    if name not in sels:
        raise FamilyError(f"{family.family_id}: unknown selector {name!r}")
    return sels[name](index, summary)


def generate(family_id: str, index: int) -> FiniteStructure:
    """Materialize the structure at the given index; errors when the
    universe or relation tables exceed the size budget."""
    family = get_family(family_id)
    summary = family_summary(family, index)
    sig = family_signature(family, index)
    if family_id in _EQUIV_FAMILIES:
        sizes = summary.class_sizes
        total = summary.total
        pairs = sum(s * s for s in sizes)
        if total > MAX_UNIVERSE or pairs > MAX_TABLE_ENTRIES:
            raise FamilyError(
                f"{family_id} index {index}: size budget exceeded "
                f"({total} elements, {pairs} relation entries)")
        table = set()
        start = 0
        for s in sizes:
            for a in range(start, start + s):
                for b in range(start, start + s):
                    table.add((a, b))
            start += s
        return FiniteStructure(signature=sig, sizes={"S": total},
                               relations={"E": frozenset(table)},
                               functions={}, constants={})
    # convsupersimple: nested unary predicates on a domain of size n^n
    n = index
    total = summary.total
    if total > MAX_UNIVERSE:
        raise FamilyError(
            f"convsupersimple index {n}: size budget exceeded ({total} elements)")
    relations = {}
    for i in range(1, n + 1):
        sz = summary.pred_sizes[i - 1]
        relations[f"P{i}"] = frozenset((e,) for e in range(sz))
    return FiniteStructure(signature=sig, sizes={"S": total},
                           relations=relations, functions={}, constants={})


# ---------------------------------------------------------------------------
# Aggregate (block) counting


@dataclass(frozen=True)
class _Block:
    size: int
    class_index: Optional[int]   # equivalence class, or predicate level
    param: Optional[ElemRef]     # singleton block for this parameter


def _equiv_blocks(summary: EquivSummary, params: Dict[str, ElemRef]):
    refs = {}
    for ref in params.values():
        refs.setdefault((ref.class_index, ref.offset), ref)
    blocks = []
    by_class: Dict[int, int] = {}
    for (ci, _off), ref in sorted(refs.items()):
        blocks.append(_Block(1, ci, ref))
        by_class[ci] = by_class.get(ci, 0) + 1
    for ci in sorted(by_class):
        rest = summary.class_sizes[ci] - by_class[ci]
        if rest > 0:
            blocks.append(_Block(rest, ci, None))
    lumped = summary.total - sum(summary.class_sizes[ci] for ci in by_class)
    if lumped > 0:
        blocks.append(_Block(lumped, None, None))
    return blocks


def _pred_blocks(summary: NestedPredSummary):
    # level i block: elements in P_i but not P_{i+1}; level 0 = outside P_1
    sizes = (summary.total,) + summary.pred_sizes + (0,)
    return [_Block(sizes[i] - sizes[i + 1], i, None)
            for i in range(len(sizes) - 1) if sizes[i] - sizes[i + 1] > 0]


class _Unsupported(Exception):
    pass


def _aggregate_eval(phi, env: Dict[str, object], kind: str) -> bool:
    """Truth of a quantifier-free formula where each variable is bound to a
    _Block or ElemRef on which every atom is constant."""

    def class_of(v):
        val = env.get(_var_name(v))
        if val is None:
            raise _Unsupported
        return val.class_index

    def is_same_element(u, v):
        a, b = env.get(_var_name(u)), env.get(_var_name(v))
        if a is None or b is None:
            raise _Unsupported
        if a is b:
            return True
        ka = _elem_key(a)
        kb = _elem_key(b)
        if ka is None or kb is None:
            return False  # distinct blocks, or block vs param singleton
        return ka == kb

    if isinstance(phi, Rel):
        if kind == "equiv" and phi.name == "E" and len(phi.args) == 2:
            u, v = phi.args
            cu, cv = class_of(u), class_of(v)
            if cu is None or cv is None:
                # the lumped block is E-unrelated to every referenced class,
                # and E-related to itself only via reflexivity
                return _var_name(u) == _var_name(v)
            return cu == cv
        if kind == "pred" and phi.name.startswith("P") and len(phi.args) == 1:
            level = int(phi.name[1:])
            cu = class_of(phi.args[0])
            return cu is not None and cu >= level
        raise _Unsupported
    if isinstance(phi, Eq):
        return is_same_element(phi.left, phi.right)
    if isinstance(phi, Not):
        return not _aggregate_eval(phi.body, env, kind)
    if isinstance(phi, And):
        return (_aggregate_eval(phi.left, env, kind)
                and _aggregate_eval(phi.right, env, kind))
    if isinstance(phi, Or):
        return (_aggregate_eval(phi.left, env, kind)
                or _aggregate_eval(phi.right, env, kind))
    if isinstance(phi, Implies):
        return ((not _aggregate_eval(phi.left, env, kind))
                or _aggregate_eval(phi.right, env, kind))
    raise _Unsupported  # quantifiers: fall back to enumeration


def _var_name(t):
    if isinstance(t, Var):
        return t.name
    raise _Unsupported  # function terms have no block semantics here


def _elem_key(v):
    if isinstance(v, ElemRef):
        return ("e", v.class_index, v.offset)
    if isinstance(v, _Block) and v.param is not None:
        return ("e", v.param.class_index, v.param.offset)
    return None


def aggregate_count(family: FamilyHandle, phi, index: int,
                    params: Dict[str, ElemRef]) -> Optional[Count]:
    """Exact count over one counted variable via block decomposition, or
    None when the formula is outside the supported fragment."""
    summary = family_summary(family, index)
    kind = "equiv" if family.family_id in _EQUIV_FAMILIES else "pred"
    fv = [n for n, _ in free_variables(phi)]
    counted = [v for v in fv if v not in params]
    if len(counted) > 1:
        return None
    if kind == "equiv":
        blocks = _equiv_blocks(summary, params)
    else:
        if params:
            return None
        blocks = _pred_blocks(summary)
    env: Dict[str, object] = dict(params)
    try:
        if not counted:
            return Count(1 if _aggregate_eval(phi, env, kind) else 0)
        x = counted[0]
        acc = 0
        for b in blocks:
            env[x] = b
            if _aggregate_eval(phi, env, kind):
                acc += b.size
        return Count(acc)
    except _Unsupported:
        return None


def family_count(family: FamilyHandle, phi_text: str, index: int,
                 selector: Optional[str] = None, workers: int = 1,
                 budget: Optional[int] = None) -> Count:
    """Exact |phi(M_index, a)| with parameters chosen by the named selector.

    Prefers the closed-form block route; falls back to materializing the
    structure and enumerating when the formula is outside the block
    fragment (and the index is within the materialization budget).
    """
    sig = family_signature(family, index)
    phi = parse_formula(phi_text, sig)
    params = family_selector(family, selector, index) if selector else {}
    agg = aggregate_count(family, phi, index, params)
    if agg is not None:
        return agg
    M = generate(family.family_id, index)
    fixed = {k: v.global_id for k, v in params.items()}
    counted = [n for n, _ in free_variables(phi) if n not in fixed]
    return engine_count(phi, M, fixed, counted, workers=workers, budget=budget)


def spectrum_logcounts(family: FamilyHandle, phi_text: str, index: int) -> List[float]:
    """Sorted distinct log-counts of {phi(x, b) : b in universe}.

    The parameter variable must be 'y'; counts are computed per parameter
    block (all these families are class-symmetric, so phi(x, b) has the
    same count for every b in a block).
    """
    sig = family_signature(family, index)
    phi = parse_formula(phi_text, sig)
    summary = family_summary(family, index)
    if family.family_id not in _EQUIV_FAMILIES:
        raise FamilyError("spectrum supported for equivalence families only")
    fv = [n for n, _ in free_variables(phi)]
    if "y" not in fv:
        # dummy parameter: one block of b values, one count
        c = aggregate_count(family, phi, index, {})
        if c is None:
            raise FamilyError("formula outside the block fragment")
        return [c.log_value]
    values = set()
    for ci in range(len(summary.class_sizes)):
        ref = summary.element(ci)
        c = aggregate_count(family, phi, index, {"y": ref})
        if c is None:
            raise FamilyError("formula outside the block fragment")
        values.add(c.log_value)
    return sorted(values)


# ---------------------------------------------------------------------------
# Vector spaces over GF(q)

THETA_TABLE_LIMIT = 200_000


def make_vector_space(q: int, dim: int) -> FiniteStructure:
    """2-sorted structure (V, K): field tables, vector addition, scalar
    action, and independence relations theta1..theta<dim>.

    theta_n tables are materialized only while (q^dim)^n stays small;
    beyond that they are virtual relations computed by Gaussian rank.
    """
    if q not in gf.SUPPORTED_Q:
        raise FamilyError(f"q={q} is not a supported prime power")
    if dim < 1 or dim > 6:
        raise FamilyError("dim must be in 1..6")
    F = gf.make_field(q)
    nvec = q ** dim
    if nvec > MAX_UNIVERSE:
        raise FamilyError("vector sort exceeds size budget")
    vecs = [gf.vec_decode(v, q, dim) for v in range(nvec)]

    sig = make_signature(
        ["K", "V"],
        relations=[(f"theta{n}", tuple(["V"] * n)) for n in range(1, dim + 1)],
        functions=[("fadd", ("K", "K"), "K"), ("fmul", ("K", "K"), "K"),
                   ("fneg", ("K",), "K"), ("vadd", ("V", "V"), "V"),
                   ("smul", ("K", "V"), "V"), ("vneg", ("V",), "V")],
        constants=[("zeroK", "K"), ("oneK", "K"), ("zeroV", "V")])

    functions = {
        "fadd": {(a, b): F.add[a][b] for a in range(q) for b in range(q)},
        "fmul": {(a, b): F.mul[a][b] for a in range(q) for b in range(q)},
        "fneg": {(a,): F.neg[a] for a in range(q)},
        "vadd": {(u, v): gf.vec_encode(gf.vec_add(F, vecs[u], vecs[v]), q)
                 for u in range(nvec) for v in range(nvec)},
        "smul": {(c, v): gf.vec_encode(gf.vec_scale(F, c, vecs[v]), q)
                 for c in range(q) for v in range(nvec)},
        "vneg": {(v,): gf.vec_encode(gf.vec_scale(F, F.neg[1], vecs[v]), q)
                 for v in range(nvec)},
    }

    def independent(tup) -> bool:
        return gf.rank(F, [vecs[v] for v in tup]) == len(tup)

    relations = {}
    virtual = {}
    for n in range(1, dim + 1):
        if nvec ** n <= THETA_TABLE_LIMIT:
            relations[f"theta{n}"] = frozenset(
                tup for tup in product(range(nvec), repeat=n) if independent(tup))
        else:
            virtual[f"theta{n}"] = independent

    return FiniteStructure(
        signature=sig, sizes={"K": q, "V": nvec},
        relations=relations, functions=functions,
        constants={"zeroK": 0, "oneK": 1, "zeroV": 0},
        virtual_relations=virtual,
        display={"V": vecs})


# ---------------------------------------------------------------------------
# Homocyclic groups (Z/p^n Z)^m

HOMOCYCLIC_ORDER_LIMIT = 1024


def make_homocyclic(p: int, n: int, m: int) -> FiniteStructure:
    """The group (Z/p^nZ)^m with add/neg tables; element ids encode m-tuples
    of residues mod p^n in base p^n."""
    if p < 2 or any(p % d == 0 for d in range(2, p)):
        raise FamilyError(f"p={p} is not prime")
    if n < 1 or m < 1:
        raise FamilyError("n and m must be >= 1")
    order = p ** (n * m)
    if order > HOMOCYCLIC_ORDER_LIMIT:
        raise FamilyError(f"group order {order} exceeds size budget")
    mod = p ** n

    def decode(x):
        out = []
        for _ in range(m):
            out.append(x % mod)
            x //= mod
        return tuple(out)

    def encode(t):
        x = 0
        for c in reversed(t):
            x = x * mod + c
        return x

    elems = [decode(x) for x in range(order)]
    sig = make_signature(
        ["G"], functions=[("add", ("G", "G"), "G"), ("neg", ("G",), "G")],
        constants=[("zero", "G")])
    return FiniteStructure(
        signature=sig, sizes={"G": order}, relations={},
        functions={
            "add": {(a, b): encode(tuple((x + y) % mod
                                         for x, y in zip(elems[a], elems[b])))
                    for a in range(order) for b in range(order)},
            "neg": {(a,): encode(tuple((-x) % mod for x in elems[a]))
                    for a in range(order)},
        },
        constants={"zero": 0},
        display={"G": elems})
