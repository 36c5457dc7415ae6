"""Common-cherry reduction (safe) and common-chain diagnostics (unsafe)."""

import json
import random

import pytest

from rafkit.gadgets import nochain_caterpillar_family
from rafkit.raf import mraf_bruteforce, mraf_exact, validate_raf
from rafkit.reduction import (find_chain_unsafety_witness, find_common_chains,
                              hang_pendant_chain, plant_common_chain,
                              subtree_reduce)
from rafkit.trees import identity_caterpillar, random_pair, random_tree


def labels(n):
    return [str(i) for i in range(1, n + 1)]


class TestSubtreeReduce:
    def test_identical_trees_collapse(self):
        t = identity_caterpillar(10)
        trace = subtree_reduce(t, t)
        assert trace.final_pair[0].n <= 4
        assert len(trace.steps) >= 6

    def test_no_common_cherry_is_noop(self):
        t1, t2 = nochain_caterpillar_family(4)
        trace = subtree_reduce(t1, t2)
        assert trace.steps == ()
        assert trace.final_pair[0].n == t1.n

    def test_merged_labels_and_expansion(self):
        t = identity_caterpillar(6)
        trace = subtree_reduce(t, t)
        first = trace.steps[0]
        assert first[2] == f"{first[0]}+{first[1]}"
        covered = frozenset().union(*trace.expansion.values())
        assert covered == set(t.labels)

    def test_preserves_exact_minimum(self):
        rng = random.Random(300)
        for _ in range(30):
            n = rng.randint(4, 10)
            t1, t2 = random_pair(labels(n), rng)
            trace = subtree_reduce(t1, t2)
            before = mraf_exact(t1, t2)
            after = mraf_exact(*trace.final_pair)
            assert before.exact and after.exact
            assert before.size == after.size
            expanded = trace.expand_partition(after.partition, t1)
            assert validate_raf(t1, t2, expanded)
            assert expanded.size == before.size

    def test_trace_serializes(self):
        t = identity_caterpillar(6)
        data = json.loads(subtree_reduce(t, t).to_json())
        assert "steps" in data and "expansion_map" in data


class TestCommonChains:
    def test_identical_caterpillars_one_chain(self):
        t = identity_caterpillar(7)
        chains = find_common_chains(t, t)
        assert chains == [t.taxa()]

    @pytest.mark.parametrize("m", [2, 3, 4, 5, 8])
    def test_nochain_family_empty(self, m):
        t1, t2 = nochain_caterpillar_family(m)
        assert find_common_chains(t1, t2) == []
        assert subtree_reduce(t1, t2).steps == ()

    def test_planted_chain_reported(self):
        rng = random.Random(301)
        chain = [f"c{i}" for i in range(1, 6)]
        base1 = random_tree([f"b{i}" for i in range(1, 6)], rng)
        base2 = random_tree([f"b{i}" for i in range(1, 6)], rng)
        t1 = plant_common_chain(base1, chain, 1)
        t2 = plant_common_chain(base2, chain, 2)
        cid = t1.ids_of(chain)
        assert any(cid <= found for found in find_common_chains(t1, t2))

    def test_hung_chain_reported(self):
        rng = random.Random(302)
        chain = [f"c{i}" for i in range(1, 6)]
        base1 = random_tree([f"g{i}" for i in range(1, 5)] + ["X"], rng)
        base2 = random_tree([f"g{i}" for i in range(1, 5)] + ["X"], rng)
        t1 = hang_pendant_chain(base1, "X", chain)
        t2 = hang_pendant_chain(base2, "X", chain, reverse=True)
        cid = t1.ids_of(chain)
        assert any(cid <= found for found in find_common_chains(t1, t2))


class TestChainUnsafety:
    def test_witness_found_and_verified(self):
        witness = find_chain_unsafety_witness(seed=0, tries=200)
        assert witness is not None
        t1, t2, chain, deleted, before, after = witness
        assert after == before - 1
        # the chain really is a common chain
        cid = t1.ids_of(chain)
        assert any(cid <= found for found in find_common_chains(t1, t2))
        # exact sizes confirmed by the independent partition oracle
        assert mraf_bruteforce(t1, t2).size == before
        keep = [lab for lab in t1.labels if lab != deleted]
        s1 = t1.restrict(t1.ids_of(keep))
        s2 = t2.restrict(t2.ids_of(keep))
        assert mraf_bruteforce(s1, s2).size == after
