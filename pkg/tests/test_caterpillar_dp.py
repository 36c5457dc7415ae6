"""Caterpillar decision DP, endpoint-path bags, and PIMS conversions."""

import random
from math import ceil, sqrt

import pytest

from rafkit.caterpillar_dp import (caterpillar_minimum_raf, caterpillar_pair,
                                   caterpillar_xp_decide, path_bags,
                                   pims_to_mraf, raf_to_pims,
                                   raf_to_pims_bound)
from rafkit.pims import (check_monotone_partition, erdos_szekeres_partition,
                         pims_exact, random_permutation)
from rafkit.raf import mraf_bruteforce, mraf_exact, validate_raf
from rafkit.trees import (identity_caterpillar, parse_newick,
                          permutation_caterpillar, random_tree)


class TestPathBags:
    def test_identity_five_interior_bags(self):
        t = identity_caterpillar(5)
        decomp = path_bags(t, t.taxon_id("1"), t.taxon_id("5"))
        assert [sorted(t.labels[x] for x in taxa)
                for _, taxa in decomp.bags] == [["2"], ["3"], ["4"]]

    def test_cherry_endpoints_single_bag_of_rest(self):
        # a cherry pair's path has one interior vertex; everything else
        # hangs there as one bag
        t = identity_caterpillar(6)
        decomp = path_bags(t, t.taxon_id("1"), t.taxon_id("2"))
        assert len(decomp.bags) == 1
        _, taxa = decomp.bags[0]
        assert taxa == t.ids_of({"3", "4", "5", "6"})

    def test_union_covers_everything(self):
        rng = random.Random(600)
        for _ in range(15):
            n = rng.randint(4, 10)
            t = random_tree([str(i) for i in range(1, n + 1)], rng)
            l, r = rng.sample(range(n), 2)
            decomp = path_bags(t, l, r)
            union = frozenset({l, r}).union(*(taxa for _, taxa in decomp.bags))
            assert union == t.taxa()

    def test_equal_endpoints_rejected(self):
        t = identity_caterpillar(4)
        with pytest.raises(ValueError):
            path_bags(t, 0, 0)


class TestDecision:
    def test_equal_caterpillars_single_component(self):
        t = identity_caterpillar(8)
        witness = caterpillar_xp_decide(t, t, 1)
        assert witness is not None and witness.size == 1

    def test_triple_shortcut(self):
        t = identity_caterpillar(6)
        rng = random.Random(601)
        other = random_tree(t.labels, rng)
        witness = caterpillar_xp_decide(t, other, 2)
        assert witness is not None
        assert all(len(c) <= 3 for c in witness.components)
        assert validate_raf(t, other, witness)

    def test_non_caterpillar_first_tree_rejected(self):
        balanced = parse_newick("(((1,2),(3,4)),((5,6),(7,8)));")
        with pytest.raises(ValueError):
            caterpillar_xp_decide(balanced, balanced, 1)

    def test_against_exact_on_permutation_pairs(self):
        rng = random.Random(602)
        for _ in range(25):
            n = rng.randint(5, 12)
            perm = random_permutation(n, rng)
            t1, t2 = caterpillar_pair(perm)
            exact = mraf_exact(t1, t2)
            assert exact.exact
            for k in (1, 2, 3):
                witness = caterpillar_xp_decide(t1, t2, k)
                assert (witness is not None) == (exact.size <= k)
                if witness is not None:
                    assert validate_raf(t1, t2, witness)
                    assert witness.size <= k

    def test_against_bruteforce_on_tree_pairs(self):
        rng = random.Random(603)
        for _ in range(15):
            n = rng.randint(5, 10)
            perm = random_permutation(n, rng)
            t1 = permutation_caterpillar(perm)
            t2 = random_tree(t1.labels, rng)
            exact = mraf_bruteforce(t1, t2).size
            for k in (1, 2, 3):
                witness = caterpillar_xp_decide(t1, t2, k)
                assert (witness is not None) == (exact <= k)
                if witness is not None:
                    assert validate_raf(t1, t2, witness)

    def test_monotone_in_k(self):
        rng = random.Random(604)
        for _ in range(10):
            n = rng.randint(5, 10)
            perm = random_permutation(n, rng)
            t1, t2 = caterpillar_pair(perm)
            feasible = [caterpillar_xp_decide(t1, t2, k) is not None
                        for k in range(1, 5)]
            assert feasible == sorted(feasible)

    def test_minimum_helper_matches_exact(self):
        rng = random.Random(605)
        for _ in range(10):
            n = rng.randint(5, 11)
            perm = random_permutation(n, rng)
            t1, t2 = caterpillar_pair(perm)
            best = caterpillar_minimum_raf(t1, t2)
            assert validate_raf(t1, t2, best)
            assert best.size == mraf_exact(t1, t2).size


class TestConversions:
    def test_identity_single_class_roundtrip(self):
        perm = tuple(range(1, 8))
        t1, t2 = caterpillar_pair(perm)
        part = pims_to_mraf(perm, pims_exact(perm))
        assert part.size == 1
        assert validate_raf(t1, t2, part)
        back = raf_to_pims(perm, part)
        assert back.size == 1

    def test_stripped_partitions_map_to_valid_forests(self):
        rng = random.Random(606)
        for _ in range(25):
            n = rng.randint(4, 14)
            perm = random_permutation(n, rng)
            raf = pims_to_mraf(perm, erdos_szekeres_partition(perm))
            t1, t2 = caterpillar_pair(perm)
            assert validate_raf(t1, t2, raf)

    def test_raf_to_pims_validity_and_bound(self):
        rng = random.Random(607)
        for _ in range(25):
            n = rng.randint(4, 12)
            perm = random_permutation(n, rng)
            t1, t2 = caterpillar_pair(perm)
            exact = mraf_exact(t1, t2)
            back = raf_to_pims(perm, exact.partition)
            assert check_monotone_partition(perm, back)
            assert back.size <= raf_to_pims_bound(exact.size)

    def test_sandwich_inequality(self):
        rng = random.Random(608)
        for _ in range(30):
            n = rng.randint(4, 12)
            perm = random_permutation(n, rng)
            t1, t2 = caterpillar_pair(perm)
            mraf = mraf_exact(t1, t2).size
            pims = pims_exact(perm).size
            assert mraf <= pims <= mraf + ceil(2 * sqrt(2 * mraf))

    def test_invalid_partition_rejected(self):
        perm = (2, 1, 4, 3)
        from rafkit.raf import RafPartition
        not_raf = RafPartition((frozenset({0}), frozenset({1, 2, 3})))
        t1, t2 = caterpillar_pair(perm)
        if not validate_raf(t1, t2, not_raf):
            with pytest.raises(ValueError):
                raf_to_pims(perm, not_raf)
