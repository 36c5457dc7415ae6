"""Maximum agreement subtree: DP against the subset-enumeration oracle."""

import random

from rafkit.mast import mast, mast_bruteforce
from rafkit.raf import mraf_exact
from rafkit.trees import identity_caterpillar, is_homeomorphic, random_pair


def labels(n):
    return [str(i) for i in range(1, n + 1)]


def test_identical_trees_keep_everything():
    t = identity_caterpillar(9)
    assert mast(t, t).taxa == t.taxa()
    assert mast_bruteforce(t, t).taxa == t.taxa()


def test_dp_matches_bruteforce_sizes():
    rng = random.Random(100)
    for _ in range(60):
        n = rng.randint(4, 9)
        t1, t2 = random_pair(labels(n), rng)
        a = mast(t1, t2)
        b = mast_bruteforce(t1, t2)
        assert a.size == b.size, (n, a.taxa, b.taxa)
        assert is_homeomorphic(t1, t2, a.taxa)


def test_witness_is_agreement_set():
    rng = random.Random(101)
    for _ in range(30):
        n = rng.randint(4, 12)
        t1, t2 = random_pair(labels(n), rng)
        res = mast(t1, t2)
        assert is_homeomorphic(t1, t2, res.taxa)
        assert res.size == len(res.taxa)


def test_deterministic_across_runs():
    rng = random.Random(102)
    t1, t2 = random_pair(labels(10), rng)
    assert mast(t1, t2).taxa == mast(t1, t2).taxa


def test_monotone_under_restriction():
    rng = random.Random(103)
    for _ in range(25):
        n = rng.randint(5, 10)
        t1, t2 = random_pair(labels(n), rng)
        full = mast(t1, t2).size
        sub = sorted(rng.sample(range(n), rng.randint(3, n)))
        assert mast(t1.restrict(sub), t2.restrict(sub)).size <= full


def test_size_floor_small_instances():
    rng = random.Random(104)
    for _ in range(40):
        n = rng.randint(3, 9)
        t1, t2 = random_pair(labels(n), rng)
        size = mast_bruteforce(t1, t2).size
        assert size >= 3
        if n >= 6:
            assert size >= 4


def test_mast_lower_bound_on_mraf():
    rng = random.Random(105)
    for _ in range(25):
        n = rng.randint(4, 12)
        t1, t2 = random_pair(labels(n), rng)
        mast_size = mast(t1, t2).size
        mraf = mraf_exact(t1, t2)
        assert mraf.exact
        assert -(-n // mast_size) <= mraf.size
