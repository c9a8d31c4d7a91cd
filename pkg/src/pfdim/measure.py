"""Finite probability spaces with exact rational weights, the normalized
counting-measure surrogate, and checks of two intersection bounds:

* among any N(eps) = floor(1/eps^2 + 1/2) events of measure >= eps there is
  a pair with mu(A_i ∩ A_j) >= eps^3, and
* for 0 < eps <= 1/2 there are k events whose intersection has measure at
  least eps^(3^(k-1)).

Everything is Fraction arithmetic; the bounds are tight enough at k = 3, 4
that floating point could mask violations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .counting import Count
from .dimension import _rename_free
from .families import (FamilyHandle, aggregate_count, family_selector,
                       family_signature)
from .logic import And, PfdimError
from .parser import parse_formula

K_CAP = 5
N_CAP = 24
DEFAULT_SUBSET_BUDGET = 2_000_000


class MeasureError(PfdimError):
    pass


class HypothesisError(MeasureError):
    """The inputs violate the bound's hypotheses (not a theorem failure)."""


Event = FrozenSet[int]


@dataclass(frozen=True)
class FiniteMeasureSpace:
    weights: Tuple[Fraction, ...]

    def __post_init__(self):
        if not self.weights:
            raise MeasureError("a measure space needs at least one atom")
        if any(w < 0 for w in self.weights):
            raise MeasureError("weights must be nonnegative")
        if sum(self.weights) != 1:
            raise MeasureError(f"weights sum to {sum(self.weights)}, not 1")

    @property
    def atoms(self) -> int:
        return len(self.weights)


def uniform_space(n: int) -> FiniteMeasureSpace:
    return FiniteMeasureSpace(tuple([Fraction(1, n)] * n))


def mu(space: FiniteMeasureSpace, event: Sequence[int]) -> Fraction:
    """Exact measure of a set of atoms."""
    ids = set(event)
    if any(not 0 <= a < space.atoms for a in ids):
        raise MeasureError("event references an atom outside the space")
    return sum((space.weights[a] for a in ids), Fraction(0))


def space_to_json(space: FiniteMeasureSpace,
                  events: Sequence[Event] = ()) -> str:
    return json.dumps({
        "weights": [f"{w.numerator}/{w.denominator}" for w in space.weights],
        "events": [sorted(e) for e in events]})


def space_from_json(text: str) -> Tuple[FiniteMeasureSpace, List[Event]]:
    data = json.loads(text)
    try:
        weights = tuple(Fraction(w) for w in data["weights"])
        events = [frozenset(int(a) for a in e) for e in data.get("events", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise MeasureError(f"malformed measure-space JSON: {exc}") from exc
    return FiniteMeasureSpace(weights), events


# ---------------------------------------------------------------------------
# normalized counting measure along a family


def mu_D_sequence(family: FamilyHandle, d_formula: str, x_formula: str,
                  indices: Sequence[int],
                  d_selector: Optional[str] = None,
                  x_selector: Optional[str] = None) -> List[Fraction]:
    """Exact ratios |X ∩ D| / |D| per index, where D and X are definable
    sets of single elements (parameters fixed by the named selectors)."""
    out = []
    for n in indices:
        sig = family_signature(family, n)
        phi_d = parse_formula(d_formula, sig)
        phi_x = parse_formula(x_formula, sig)
        params: Dict[str, object] = {}
        if d_selector is not None:
            phi_d = _rename_free(phi_d, "y", "yd")
            params["yd"] = family_selector(family, d_selector, n)["y"]
        if x_selector is not None:
            phi_x = _rename_free(phi_x, "y", "yx")
            params["yx"] = family_selector(family, x_selector, n)["y"]
        cd = aggregate_count(family, phi_d, n, params)
        cxd = aggregate_count(family, And(phi_x, phi_d), n, params)
        if cd is None or cxd is None:
            raise MeasureError("formula outside the block-counting fragment")
        if cd.value == 0:
            raise MeasureError(f"D is empty at index {n}")
        out.append(Fraction(cxd.value, cd.value))
    return out


# ---------------------------------------------------------------------------
# intersection bounds


def _check_hypotheses(space: FiniteMeasureSpace, events: Sequence[Event]):
    if not events:
        raise HypothesisError("no events given")
    measures = [mu(space, e) for e in events]
    eps = min(measures)
    if eps <= 0:
        raise HypothesisError("an event has measure 0")
    if eps > Fraction(1, 2):
        eps = Fraction(1, 2)  # the bound only needs a lower bound <= 1/2
    return measures, eps


def k_intersection_bound(eps: Fraction, k: int) -> Fraction:
    return eps ** (3 ** (k - 1))


@dataclass(frozen=True)
class Witness:
    indices: Tuple[int, ...]
    measure: Fraction
    bound: Fraction


def find_k_intersection(space: FiniteMeasureSpace, events: Sequence[Event],
                        k: int,
                        budget: int = DEFAULT_SUBSET_BUDGET) -> Optional[Witness]:
    """A k-subset of events whose intersection has measure at least
    eps^(3^(k-1)), eps = min event measure (capped at 1/2).  Returns None
    only when the subset budget is exhausted — when the hypotheses hold a
    witness always exists, so a clean miss indicates a bug."""
    if not 1 <= k <= K_CAP:
        raise MeasureError(f"k must be in 1..{K_CAP}")
    if len(events) > N_CAP:
        raise MeasureError(f"at most {N_CAP} events supported")
    if len(events) < k:
        raise HypothesisError("fewer events than k")
    measures, eps = _check_hypotheses(space, events)
    bound = k_intersection_bound(eps, k)
    if k == 1:
        best = max(range(len(events)), key=lambda i: measures[i])
        return Witness((best,), measures[best], bound)
    visited = 0
    for combo in combinations(range(len(events)), k):
        visited += 1
        if visited > budget:
            return None
        inter = frozenset.intersection(*[events[i] for i in combo])
        val = mu(space, inter)
        if val >= bound:
            return Witness(combo, val, bound)
    if len(events) < sufficient_events(eps, k):
        raise HypothesisError(
            f"{len(events)} events are too few to guarantee a witness for "
            f"k={k} at eps={eps}")
    raise MeasureError(
        "no k-subset met the bound although the hypotheses hold — this "
        "contradicts the intersection theorem and indicates a bug")


def sufficient_events(eps: Fraction, k: int) -> int:
    """Event count that certifies a witness exists: the pairwise threshold
    applied to the (k-1)-level bound, following the recursive proof."""
    if k <= 1:
        return 1
    prev = k_intersection_bound(eps, k - 1)
    return pairwise_threshold(min(prev, Fraction(1, 2)))


def pairwise_threshold(eps: Fraction) -> int:
    """N(eps) = floor(1/eps^2 + 1/2): enough events of measure >= eps to
    force a pair with intersection measure >= eps^3."""
    if not 0 < eps <= Fraction(1, 2):
        raise HypothesisError("need 0 < eps <= 1/2")
    x0 = 1 / eps ** 2 + Fraction(1, 2)
    return math.floor(x0)


def pairwise_threshold_check(space: FiniteMeasureSpace,
                             events: Sequence[Event],
                             eps: Fraction) -> Witness:
    """Verify that some pair among >= N(eps) events of measure >= eps has
    intersection measure >= eps^3.  A miss contradicts the theorem and
    raises; callers treat that as a defect, not as data."""
    N = pairwise_threshold(eps)
    if len(events) < N:
        raise HypothesisError(f"need at least N(eps)={N} events, got {len(events)}")
    measures = [mu(space, e) for e in events]
    low = [i for i, v in enumerate(measures) if v < eps]
    if low:
        raise HypothesisError(f"events {low} have measure below eps")
    bound = eps ** 3
    best: Optional[Witness] = None
    for i, j in combinations(range(len(events)), 2):
        val = mu(space, events[i] & events[j])
        if val >= bound:
            return Witness((i, j), val, bound)
        if best is None or val > best.measure:
            best = Witness((i, j), val, bound)
    raise MeasureError(
        f"no pair reached eps^3={bound} (best {best}) although the "
        "hypotheses hold — this contradicts the pairwise threshold theorem")


def truncated_inclusion_exclusion_ok(space: FiniteMeasureSpace,
                                     events: Sequence[Event]) -> bool:
    """1 >= sum mu(A_i) - sum_{i<j} mu(A_i ∩ A_j), a finite-additivity
    consequence; exact check."""
    singles = sum((mu(space, e) for e in events), Fraction(0))
    pairs = sum((mu(space, a & b) for a, b in combinations(events, 2)),
                Fraction(0))
    return 1 >= singles - pairs
