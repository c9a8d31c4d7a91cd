#!/usr/bin/env python3
"""Reproduce the growth-rate classification examples on the built-in families.

Runs the four headline experiments (pairwise comparison, chain drop,
spectrum clustering, normalized measure) and prints one JSON document.
"""

import argparse
import json
import sys
from fractions import Fraction

from pfdim.counting import CardinalitySequence
from pfdim.dimension import chain_detect, delta_compare, fmv_spectrum
from pfdim.families import family_count, get_family
from pfdim.measure import mu_D_sequence


def sequence(fam, formula, selector, indices):
    return CardinalitySequence(
        fam.family_id, formula, selector,
        tuple((n, family_count(fam, formula, n, selector=selector))
              for n in indices))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--indices", default="8,16,32,64",
                    help="comma-separated family indices for the comparisons")
    ap.add_argument("--spectrum-indices", default="4,6,8")
    args = ap.parse_args(argv)
    indices = [int(t) for t in args.indices.split(",")]
    spec_indices = [int(t) for t in args.spectrum_indices.split(",")]

    out = {}

    fam = get_family("stablenonattainability")
    out["classRankComparisons"] = []
    for t in (1, 2):
        X = sequence(fam, "E(x, y)", f"class-rank-{t}", indices)
        Y = sequence(fam, "E(x, y)", f"class-rank-{t + 1}", indices)
        v = delta_compare(X, Y)
        out["classRankComparisons"].append(
            {"t": t, "classification": v.classification})

    fam = get_family("convsupersimple")
    report = chain_detect(fam, [(f"P{i}(x)", None) for i in range(1, 5)],
                          indices)
    out["nestedChain"] = {"dropLength": report.drop_length,
                          "verdicts": list(report.verdicts)}

    fam = get_family("findelta")
    spec = fmv_spectrum(fam, "E(x, y)", spec_indices)
    out["spectrum"] = {"clusterCounts": list(spec.cluster_counts),
                       "unbounded": spec.unbounded}

    fam = get_family("rank2classes")
    ratios = mu_D_sequence(fam, "E(x, x)", "E(x, y)", spec_indices,
                           x_selector="big-class")
    out["bigClassMeasure"] = [str(r) for r in ratios]

    json.dump(out, sys.stdout, indent=2)
    print()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
