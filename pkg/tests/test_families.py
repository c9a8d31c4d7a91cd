"""Structure families: generation, block summaries, aggregate counting."""

import math

import pytest

from pfdim.counting import count
from pfdim.families import (FamilyError, aggregate_count, family_count,
                            family_selector, family_signature, family_summary,
                            generate, get_family, list_families,
                            make_homocyclic, make_vector_space,
                            spectrum_logcounts)
from pfdim.logic import sort_check
from pfdim.parser import parse_formula


FAMILY_IDS = ["earlyexample", "stablenonattainability", "findelta",
              "rank2classes", "convsupersimple"]


class TestCatalog:
    def test_listing(self):
        listed = list_families()
        for fid in FAMILY_IDS:
            assert fid in listed

    def test_unknown_family(self):
        with pytest.raises(FamilyError):
            get_family("nosuchfamily")


class TestSummaries:
    def test_earlyexample_class_sizes(self):
        s = family_summary(get_family("earlyexample"), 4)
        assert sorted(s.class_sizes) == [1, 4, 9, 16]

    def test_stablenonattainability_class_sizes(self):
        s = family_summary(get_family("stablenonattainability"), 3)
        assert sorted(s.class_sizes) == sorted(3 ** i for i in range(1, 4))

    def test_findelta_class_sizes(self):
        s = family_summary(get_family("findelta"), 3)
        # 3 copies each of 3^1, 3^2, 3^3
        assert sorted(s.class_sizes) == sorted([3, 3, 3, 9, 9, 9, 27, 27, 27])

    def test_rank2classes_class_sizes(self):
        s = family_summary(get_family("rank2classes"), 4)
        assert sorted(s.class_sizes) == [4, 4, 4, 4, 16]

    def test_convsupersimple_pred_sizes(self):
        s = family_summary(get_family("convsupersimple"), 4)
        assert s.total == 4 ** 4
        assert list(s.pred_sizes) == [4 ** 3, 4 ** 2, 4 ** 1, 4 ** 0]


class TestGenerateMatchesSummary:
    @pytest.mark.parametrize("fid", ["earlyexample", "stablenonattainability",
                                     "findelta", "rank2classes"])
    def test_equivalence_classes(self, fid):
        idx = 3
        M = generate(fid, idx)
        E = M.relations["E"]
        n = M.sizes[next(iter(M.sizes))]
        classes = {}
        for a in range(n):
            root = min(b for b in range(n) if (a, b) in E)
            classes.setdefault(root, set()).add(a)
        sizes = sorted(len(c) for c in classes.values())
        assert sizes == sorted(family_summary(get_family(fid), idx).class_sizes)

    def test_convsupersimple_nesting(self):
        M = generate("convsupersimple", 3)
        p1 = {t[0] for t in M.relations["P1"]}
        p2 = {t[0] for t in M.relations["P2"]}
        p3 = {t[0] for t in M.relations["P3"]}
        assert p3 <= p2 <= p1
        assert (len(p1), len(p2), len(p3)) == (9, 3, 1)


class TestAggregateCounting:
    @pytest.mark.parametrize("fid,formula,selector", [
        ("earlyexample", "E(x, y)", "largest-class"),
        ("earlyexample", "E(x, y)", "class-2"),
        ("stablenonattainability", "E(x, y)", "class-rank-1"),
        ("stablenonattainability", "!(E(x, y))", "class-rank-2"),
        ("findelta", "E(x, y)", "class-level-1"),
        ("rank2classes", "E(x, y)", "big-class"),
        ("rank2classes", "E(x, y) & !E(x, x) | E(x, y)", "small-class"),
        ("convsupersimple", "P1(x) & !(P2(x))", None),
        ("convsupersimple", "P2(x)", None),
    ])
    def test_agrees_with_engine_at_small_indices(self, fid, formula, selector):
        fam = get_family(fid)
        for idx in (3, 4):
            sig = family_signature(fam, idx)
            phi = parse_formula(formula, sig)
            params = family_selector(fam, selector, idx) if selector else {}
            agg = aggregate_count(fam, phi, idx, params)
            assert agg is not None
            M = generate(fid, idx)
            fixed = {k: v.global_id for k, v in params.items()}
            counted = [n for n, _ in
                       __import__("pfdim.logic", fromlist=["free_variables"])
                       .free_variables(phi) if n not in fixed]
            assert agg.value == count(phi, M, fixed, counted).value

    def test_aggregate_reaches_unmaterializable_index(self):
        fam = get_family("stablenonattainability")
        # index 64 has 64^1 + ... + 64^64 elements; blocks still count exactly
        c = family_count(fam, "E(x, y)", 64, selector="class-rank-1")
        assert c.value == 64 ** 63

    def test_engine_fallback_for_quantified_formula(self):
        fam = get_family("earlyexample")
        c = family_count(fam, "exists z:S. (E(x, z) & E(z, y))", 3)
        M = generate("earlyexample", 3)
        sig = family_signature(fam, 3)
        phi = parse_formula("exists z:S. (E(x, z) & E(z, y))", sig)
        assert c.value == count(phi, M, {}, ["x", "y"]).value

    def test_selector_errors(self):
        fam = get_family("earlyexample")
        with pytest.raises(FamilyError):
            family_selector(fam, "class-99", 3)
        with pytest.raises(FamilyError):
            family_selector(fam, "nonsense", 3)


class TestSpectrum:
    def test_findelta_distinct_logcounts(self):
        fam = get_family("findelta")
        logs = spectrum_logcounts(fam, "E(x, y)", 4)
        assert logs == sorted(logs)
        assert len(logs) == 4
        expected = sorted(math.log(4 ** i) for i in range(1, 5))
        assert logs == pytest.approx(expected)


class TestAlgebraicStructures:
    def test_homocyclic_is_group(self):
        M = make_homocyclic(3, 1, 2)
        n = M.sizes["G"]
        assert n == 9
        add, neg = M.functions["add"], M.functions["neg"]
        zero = M.constants["zero"]
        for a in range(n):
            assert add[(a, zero)] == a
            assert add[(a, neg[(a,)])] == zero
            for b in range(n):
                assert add[(a, b)] == add[(b, a)]

    def test_homocyclic_order_cap(self):
        with pytest.raises(FamilyError):
            make_homocyclic(2, 11, 1)

    def test_vector_space_sorts(self):
        M = make_vector_space(2, 3)
        assert M.sizes["K"] == 2
        assert M.sizes["V"] == 8
