"""Finite-index surrogates for comparing growth rates of definable sets.

log|X_n| plays the role of a dimension: two families have the same
dimension when their size ratio stays bounded, and different dimensions
when the log-ratio diverges.  At finite scale this is necessarily a
heuristic, so every verdict carries its evidence (the per-index log-ratio
list) and the thresholds that produced it, and "undetermined" is a
first-class outcome.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .counting import CardinalitySequence, Count
from .families import (FamilyHandle, aggregate_count, family_selector,
                       family_signature, spectrum_logcounts)
from .logic import And, Eq, Exists, Forall, Formula, Not, Or, Implies, PfdimError, Rel, Var
from .parser import parse_formula

TAU_DEFAULT = math.log(100.0)
GAMMA_DEFAULT = 0.2
TREND_MARGIN = math.log(1.5)
MIN_INDICES = 4
NEG_INF = float("-inf")


class DimensionError(PfdimError):
    pass


# ---------------------------------------------------------------------------
# delta comparison


@dataclass(frozen=True)
class DeltaVerdict:
    classification: str  # equal | less | greater | undetermined
    log_ratios: Tuple[float, ...]
    indices: Tuple[int, ...]
    tau: float
    burn_in: int

    def to_json_dict(self) -> dict:
        return {"classification": self.classification,
                "indices": list(self.indices),
                "logRatios": [_json_float(r) for r in self.log_ratios],
                "tau": self.tau, "burnIn": self.burn_in}


def _json_float(x: float):
    if x == NEG_INF:
        return "-inf"
    if x == float("inf"):
        return "inf"
    return x


def delta_compare(X: CardinalitySequence, Y: CardinalitySequence,
                  tau: float = TAU_DEFAULT,
                  burn_in: Optional[int] = None) -> DeltaVerdict:
    """Classify the growth of |X_n| against |Y_n|.

    'equal' when the tail log-ratios all stay within tau; 'greater'/'less'
    when the tail log-ratio moves strictly monotonically with total rise at
    least ln(3/2), or has already crossed tau — a bounded ratio can do
    neither.  Anything else is 'undetermined'.  Zero counts enter as -inf.
    """
    if X.indices != Y.indices:
        raise DimensionError("sequences sample different indices")
    ratios = []
    for lx, ly in zip(X.log_values, Y.log_values):
        if lx == NEG_INF and ly == NEG_INF:
            ratios.append(0.0)
        elif ly == NEG_INF:
            ratios.append(float("inf"))
        else:
            ratios.append(lx - ly)
    i0 = len(ratios) // 2 if burn_in is None else burn_in
    verdict = _classify(ratios, i0, tau)
    return DeltaVerdict(verdict, tuple(ratios), tuple(X.indices), tau, i0)


def _classify(ratios: List[float], i0: int, tau: float) -> str:
    if len(ratios) < MIN_INDICES:
        return "undetermined"
    tail = ratios[i0:]
    if len(tail) < 2:
        return "undetermined"
    if any(math.isinf(r) for r in tail):
        if all(r == float("inf") for r in tail):
            return "greater"
        if all(r == NEG_INF for r in tail):
            return "less"
        return "undetermined"
    increasing = all(b > a for a, b in zip(tail, tail[1:]))
    decreasing = all(b < a for a, b in zip(tail, tail[1:]))
    rise = tail[-1] - tail[0]
    if increasing and (rise >= TREND_MARGIN or tail[-1] > tau):
        return "greater"
    if decreasing and (-rise >= TREND_MARGIN or tail[-1] < -tau):
        return "less"
    if max(abs(r) for r in tail) <= tau:
        return "equal"
    return "undetermined"


# ---------------------------------------------------------------------------
# chains of instances with strictly dropping size


def _rename_free(phi: Formula, old: str, new: str) -> Formula:
    """Rename a free variable, stopping at binders that capture it."""
    def go(f):
        if isinstance(f, Rel):
            return Rel(f.name, tuple(_rename_term(t, old, new) for t in f.args))
        if isinstance(f, Eq):
            return Eq(_rename_term(f.left, old, new),
                      _rename_term(f.right, old, new))
        if isinstance(f, Not):
            return Not(go(f.body))
        if isinstance(f, (And, Or, Implies)):
            return type(f)(go(f.left), go(f.right))
        if isinstance(f, (Exists, Forall)):
            if f.var == old:
                return f
            return type(f)(f.var, f.sort, go(f.body))
        raise DimensionError(f"unexpected node {type(f).__name__}")
    return go(phi)


def _rename_term(t, old, new):
    if isinstance(t, Var):
        return Var(new, t.sort) if t.name == old else t
    if hasattr(t, "args"):  # function application
        return type(t)(t.name, tuple(_rename_term(a, old, new) for a in t.args))
    return t


@dataclass(frozen=True)
class ChainReport:
    steps: Tuple[Tuple[str, Optional[str]], ...]  # (formula, selector)
    indices: Tuple[int, ...]
    log_counts: Tuple[Tuple[float, ...], ...]  # [step][index]
    verdicts: Tuple[str, ...]  # consecutive-step comparisons
    drop_length: int
    tau: float

    def to_json_dict(self) -> dict:
        return {"steps": [{"formula": f, "selector": s} for f, s in self.steps],
                "indices": list(self.indices),
                "logCounts": [[_json_float(v) for v in row]
                              for row in self.log_counts],
                "verdicts": list(self.verdicts),
                "dropLength": self.drop_length, "tau": self.tau}


def _chain_prefix_count(family: FamilyHandle, steps, index: int,
                        upto: int) -> Count:
    sig = family_signature(family, index)
    conj = None
    params: Dict[str, object] = {}
    for j in range(upto):
        text, selector = steps[j]
        phi = parse_formula(text, sig)
        if selector is not None:
            fresh = f"y{j + 1}"
            phi = _rename_free(phi, "y", fresh)
            params[fresh] = family_selector(family, selector, index)["y"]
        conj = phi if conj is None else And(conj, phi)
    result = aggregate_count(family, conj, index, params)
    if result is None:
        raise DimensionError("chain formula outside the block fragment")
    return result


def chain_detect(family: FamilyHandle,
                 steps: Sequence[Tuple[str, Optional[str]]],
                 indices: Sequence[int],
                 tau: float = TAU_DEFAULT,
                 burn_in: Optional[int] = None) -> ChainReport:
    """Sizes of the nested conjunctions of the given instance steps, and
    the longest prefix along which each step strictly drops the dimension
    (consecutive 'greater' verdicts).  A zero count terminates the chain.
    """
    steps = tuple((f, s) for f, s in steps)
    indices = tuple(indices)
    rows: List[Tuple[float, ...]] = []
    counts: List[List[int]] = []
    for i in range(1, len(steps) + 1):
        per_index = [_chain_prefix_count(family, steps, n, i).value
                     for n in indices]
        counts.append(per_index)
        rows.append(tuple(math.log(c) if c else NEG_INF for c in per_index))
    verdicts = []
    for i in range(len(steps) - 1):
        seq_a = CardinalitySequence(family.family_id, steps[i][0], steps[i][1],
                                    tuple(zip(indices, map(Count, counts[i]))))
        seq_b = CardinalitySequence(family.family_id, steps[i + 1][0],
                                    steps[i + 1][1],
                                    tuple(zip(indices, map(Count, counts[i + 1]))))
        verdicts.append(delta_compare(seq_a, seq_b, tau, burn_in).classification)
    drop = 1
    for i, v in enumerate(verdicts):
        if all(c > 0 for c in counts[i + 1]) and v == "greater":
            drop += 1
        else:
            break
    return ChainReport(steps, indices, tuple(rows), tuple(verdicts), drop, tau)


# ---------------------------------------------------------------------------
# spectra of parameterized counts


@dataclass(frozen=True)
class SpectrumReport:
    family_id: str
    formula: str
    indices: Tuple[int, ...]
    log_counts: Tuple[Tuple[float, ...], ...]  # distinct, sorted, per index
    cluster_counts: Tuple[int, ...]
    gamma: float
    unbounded: bool

    def to_json_dict(self) -> dict:
        return {"familyId": self.family_id, "formula": self.formula,
                "indices": list(self.indices),
                "logCounts": [[_json_float(v) for v in row]
                              for row in self.log_counts],
                "clusterCounts": list(self.cluster_counts),
                "gamma": self.gamma, "unbounded": self.unbounded}


def cluster_count(values: Sequence[float], gamma: float) -> int:
    """Single-linkage clusters of sorted values with linking gap gamma."""
    vals = sorted(values)
    if not vals:
        return 0
    return 1 + sum(1 for a, b in zip(vals, vals[1:]) if b - a > gamma)


def fmv_spectrum(family: FamilyHandle, phi_text: str,
                 indices: Sequence[int],
                 gamma: float = GAMMA_DEFAULT) -> SpectrumReport:
    """Distinct log-counts of {phi(x, b) : b} per index, clustered with gap
    gamma.  The 'unbounded' flag marks a cluster count that strictly
    increases across every sampled index — evidence against the family
    having finitely many dimension values for this formula."""
    indices = tuple(indices)
    rows = []
    clusters = []
    for n in indices:
        logs = spectrum_logcounts(family, phi_text, n)
        rows.append(tuple(logs))
        clusters.append(cluster_count(logs, gamma))
    unbounded = (len(clusters) >= 2
                 and all(b > a for a, b in zip(clusters, clusters[1:])))
    return SpectrumReport(family.family_id, phi_text, indices, tuple(rows),
                          tuple(clusters), gamma, unbounded)


# ---------------------------------------------------------------------------
# export


def export_json(report, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(report.to_json_dict(), fh, indent=2)


def export_csv(report, path: str) -> None:
    """(index, series, log-count) rows for plotting."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "series", "logCount"])
        if isinstance(report, SpectrumReport):
            for n, row in zip(report.indices, report.log_counts):
                for k, v in enumerate(row):
                    writer.writerow([n, k, v])
        elif isinstance(report, ChainReport):
            for step, row in enumerate(report.log_counts, start=1):
                for n, v in zip(report.indices, row):
                    writer.writerow([n, step, v])
        elif isinstance(report, DeltaVerdict):
            for n, v in zip(report.indices, report.log_ratios):
                writer.writerow([n, "logRatio", v])
        else:
            raise DimensionError(f"cannot export {type(report).__name__}")
