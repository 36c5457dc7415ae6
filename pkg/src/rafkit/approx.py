"""Greedy MAST-stripping approximation for minimum relaxed agreement forests.

Repeatedly extracts a maximum agreement subtree of the pair restricted to the
still-uncovered taxa.  Simulates the greedy set-cover rule without building
the exponential family of agreement sets, so the output is an O(log n)
approximation; it can be as bad as 4/3 times the optimum.
"""

from __future__ import annotations

import random

from .mast import mast
from .raf import RafPartition, mraf_exact, normalize_components
from .trees import PhyloTree, align_pair, random_pair


def greedy_mast_raf(t1: PhyloTree, t2: PhyloTree) -> RafPartition:
    """Partition the taxa by repeatedly removing a MAST of the remainder."""
    t1, t2 = align_pair(t1, t2)
    remaining = sorted(range(t1.n))
    components = []
    while remaining:
        if len(remaining) <= 3:
            components.append(frozenset(remaining))
            break
        sub1 = t1.restrict(remaining)
        sub2 = t2.restrict(remaining)
        picked = mast(sub1, sub2).taxa
        # restricted ids follow the sorted order of the remaining originals
        components.append(frozenset(remaining[i] for i in picked))
        remaining = [t for i, t in enumerate(remaining) if i not in picked]
    return RafPartition(normalize_components(components))


def find_greedy_gap_witness(seed: int = 0, tries: int = 400,
                            n_range=(9, 13), ratio: float = 4 / 3):
    """Search random pairs for an instance where greedy/optimum >= ratio.

    Returns (t1, t2, greedy_size, exact_size) or None if the budget runs out.
    """
    rng = random.Random(seed)
    lo, hi = n_range
    for _ in range(tries):
        n = rng.randint(lo, hi)
        labels = [str(i) for i in range(1, n + 1)]
        t1, t2 = random_pair(labels, rng)
        greedy = greedy_mast_raf(t1, t2).size
        if greedy < 2:
            continue
        exact = mraf_exact(t1, t2).size
        if greedy >= ratio * exact:
            return t1, t2, greedy, exact
    return None
