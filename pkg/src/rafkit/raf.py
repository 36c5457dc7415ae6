"""Relaxed agreement forests: conflict hypergraph, validation, exact solvers.

A partition of the taxa is a RAF exactly when no conflicting quartet lies
inside a single component, so minimizing the number of components is the
weak chromatic number of the 4-uniform conflict hypergraph.  The exact
solvers work on that encoding; the brute-force oracles and the validators
deliberately stay on the tree side (restriction plus isomorphism) so the
two routes check each other.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations
from math import ceil

from .trees import (PhyloTree, align_pair, is_homeomorphic, spanning_vertices,
                    trees_equal)


class SolverTimeout(Exception):
    """Internal signal that a search exhausted its time budget."""


@dataclass(frozen=True)
class RafPartition:
    """A partition of the taxon set into agreement components."""

    components: tuple  # tuple[frozenset[int], ...]
    kind: str = "RAF"  # "RAF" or "AF"

    @property
    def size(self) -> int:
        return len(self.components)

    @property
    def distance(self) -> int:
        """Components minus one: zero exactly when the trees are equal."""
        return len(self.components) - 1

    def to_json(self, labels) -> dict:
        return {
            "components": [sorted(labels[t] for t in comp)
                           for comp in self.components],
            "kind": self.kind,
            "size": self.size,
        }

    @staticmethod
    def from_json(data: dict, labels) -> "RafPartition":
        index = {lab: i for i, lab in enumerate(labels)}
        comps = tuple(frozenset(index[lab] for lab in comp)
                      for comp in data["components"])
        return RafPartition(comps, data.get("kind", "RAF"))


def normalize_components(components) -> tuple:
    """Drop empty components and order them by smallest member."""
    comps = [frozenset(c) for c in components if c]
    comps.sort(key=min)
    return tuple(comps)


class ConflictHypergraph:
    """4-uniform hypergraph of the quartets on which two trees disagree."""

    def __init__(self, n: int, edges):
        self.n = n
        self.edges = sorted(tuple(sorted(e)) for e in edges)
        self.masks = [(1 << a) | (1 << b) | (1 << c) | (1 << d)
                      for a, b, c, d in self.edges]
        self.incident = [[] for _ in range(n)]
        for i, e in enumerate(self.edges):
            for t in e:
                self.incident[t].append(i)

    def __len__(self):
        return len(self.edges)


def build_conflict_hypergraph(t1: PhyloTree, t2: PhyloTree) -> ConflictHypergraph:
    """Compare all C(n,4) quartet topologies of an aligned tree pair."""
    t1, t2 = align_pair(t1, t2)
    n = t1.n
    d1 = t1._distances()
    d2 = t2._distances()
    edges = []
    for a, b, c, d in combinations(range(n), 4):
        # four-point condition: the pairing with the smallest distance sum
        # is the induced split (0: ab|cd, 1: ac|bd, 2: ad|bc)
        r1 = d1[a]
        s = (r1[b] + d1[c][d], r1[c] + d1[b][d], r1[d] + d1[b][c])
        top1 = s.index(min(s))
        r2 = d2[a]
        s = (r2[b] + d2[c][d], r2[c] + d2[b][d], r2[d] + d2[b][c])
        if s.index(min(s)) != top1:
            edges.append((a, b, c, d))
    return ConflictHypergraph(n, edges)


def is_agreement_set(hg: ConflictHypergraph, taxa) -> bool:
    """No conflicting quartet lies inside the set (true for |S| <= 3)."""
    mask = 0
    for t in taxa:
        mask |= 1 << t
    return all(em & ~mask for em in hg.masks)


# -- validation (tree route, independent of the hypergraph) -------------------


def _check_partition(n: int, partition: RafPartition):
    seen = set()
    for comp in partition.components:
        if not comp:
            raise ValueError("not a partition: empty component")
        if comp & seen:
            raise ValueError("not a partition: overlapping components")
        seen |= comp
    if seen != set(range(n)):
        raise ValueError("not a partition: does not cover the taxon set")


def validate_raf(t1: PhyloTree, t2: PhyloTree, partition: RafPartition) -> bool:
    """Every component induces the same tree in both inputs."""
    t1, t2 = align_pair(t1, t2)
    _check_partition(t1.n, partition)
    return all(is_homeomorphic(t1, t2, comp) for comp in partition.components)


def validate_af(t1: PhyloTree, t2: PhyloTree, partition: RafPartition) -> bool:
    """RAF conditions plus vertex-disjoint spanning subtrees in both trees."""
    t1, t2 = align_pair(t1, t2)
    if not validate_raf(t1, t2, partition):
        return False
    for tree in (t1, t2):
        spans = [spanning_vertices(tree, comp) for comp in partition.components]
        total = sum(len(s) for s in spans)
        if len(frozenset().union(*spans)) != total:
            return False
    return True


# -- exact solvers -------------------------------------------------------------


@dataclass
class MrafResult:
    """Outcome of an exact solve; ``exact`` is False on timeout."""

    partition: RafPartition
    lower: int
    exact: bool
    elapsed: float
    strategy: str

    @property
    def size(self) -> int:
        return self.partition.size

    @property
    def upper(self) -> int:
        return self.partition.size


def _triple_partition(n: int) -> tuple:
    return tuple(frozenset(range(i, min(i + 3, n))) for i in range(0, n, 3))


def _decide_weak_coloring(hg: ConflictHypergraph, k: int, deadline=None):
    """Find a k-coloring with no monochromatic hyperedge, or None.

    Depth-first search with unit propagation: an edge whose assigned taxa all
    share one color bans that color from its last unassigned taxon.  Colors
    are interchangeable until first use, so branching tries used colors plus
    a single fresh representative.
    """
    n = hg.n
    m = len(hg.edges)
    if m == 0:
        return [0] * n
    if k <= 1:
        return None
    edges = hg.edges
    masks = hg.masks
    incident = hg.incident
    full = (1 << k) - 1
    colors = [-1] * n
    domain = [full] * n
    edge_color = [-1] * m  # -1 none yet, -2 two colors seen (satisfied)
    edge_open = [4] * m
    degree = [len(inc) for inc in hg.incident]
    trail = []
    used = [0]
    nodes = [0]

    def undo(mark):
        while len(trail) > mark:
            kind, idx, old = trail.pop()
            if kind == 0:
                colors[idx] = -1
            elif kind == 1:
                domain[idx] = old
            elif kind == 2:
                edge_color[idx] = old
            elif kind == 3:
                edge_open[idx] = old
            else:
                used[0] = old

    def assign(t, c, queue):
        trail.append((0, t, -1))
        colors[t] = c
        bit = 1 << c
        if not used[0] & bit:
            trail.append((4, 0, used[0]))
            used[0] |= bit
        for ei in incident[t]:
            ec = edge_color[ei]
            if ec == -2:
                continue
            trail.append((3, ei, edge_open[ei]))
            edge_open[ei] -= 1
            if ec == -1:
                trail.append((2, ei, -1))
                edge_color[ei] = c
            elif ec != c:
                trail.append((2, ei, ec))
                edge_color[ei] = -2
                continue
            if edge_open[ei] == 0:
                return False  # monochromatic
            if edge_open[ei] == 1:
                for u in edges[ei]:
                    if colors[u] < 0:
                        break
                nd = domain[u] & ~(1 << c)
                if nd != domain[u]:
                    if nd == 0:
                        return False
                    trail.append((1, u, domain[u]))
                    domain[u] = nd
                    if nd & (nd - 1) == 0:
                        queue.append((u, nd.bit_length() - 1))
        return True

    def propagate(t, c):
        queue = [(t, c)]
        while queue:
            u, cu = queue.pop()
            if colors[u] >= 0:
                if colors[u] != cu:
                    return False
                continue
            if not (domain[u] >> cu) & 1:
                return False
            if not assign(u, cu, queue):
                return False
        return True

    def pick():
        best = None
        best_key = None
        for t in range(n):
            if colors[t] < 0:
                key = (domain[t].bit_count(), -degree[t])
                if best is None or key < best_key:
                    best = t
                    best_key = key
        return best

    def dfs():
        nodes[0] += 1
        if deadline is not None and nodes[0] & 255 == 0 \
                and time.monotonic() > deadline:
            raise SolverTimeout
        t = pick()
        if t is None:
            return True
        cand = domain[t] & used[0]
        fresh = domain[t] & ~used[0]
        if fresh:
            cand |= fresh & -fresh
        while cand:
            bit = cand & -cand
            cand ^= bit
            mark = len(trail)
            if propagate(t, bit.bit_length() - 1) and dfs():
                return True
            undo(mark)
        return False

    if dfs():
        return list(colors)
    return None


def _coloring_to_partition(colors, k) -> tuple:
    groups = [set() for _ in range(k)]
    for t, c in enumerate(colors):
        groups[c].add(t)
    return normalize_components(groups)


def _maximal_agreement_blocks(hg: ConflictHypergraph, mask: int, pivot: int):
    """All maximal agreement subsets of ``mask`` containing ``pivot``."""
    masks = hg.masks
    incident = hg.incident

    def compatible(smask, t):
        new = smask | (1 << t)
        for ei in incident[t]:
            if masks[ei] & ~new == 0:
                return False
        return True

    cand = [t for t in range(hg.n) if (mask >> t) & 1 and t != pivot]
    out = []

    def grow(smask, idx):
        for i in range(idx, len(cand)):
            t = cand[i]
            if compatible(smask, t):
                grow(smask | (1 << t), i + 1)
        for t in cand:
            if not (smask >> t) & 1 and compatible(smask, t):
                return  # extendable, not maximal
        out.append(smask)

    grow(1 << pivot, 0)
    return out


def _cover_dp(hg: ConflictHypergraph, deadline=None):
    """Minimum partition into agreement sets via memoized set cover.

    States are subsets of still-uncovered taxa; the branching block always
    contains the lowest uncovered taxon and is maximal inside the state,
    which preserves optimality because agreement sets are downward closed.
    """
    memo = {0: (0, 0)}

    def best(mask):
        hit = memo.get(mask)
        if hit is not None:
            return hit[0]
        if deadline is not None and time.monotonic() > deadline:
            raise SolverTimeout
        pivot = (mask & -mask).bit_length() - 1
        best_val = hg.n + 1
        best_block = 0
        for block in _maximal_agreement_blocks(hg, mask, pivot):
            val = 1 + best(mask & ~block)
            if val < best_val:
                best_val = val
                best_block = block
        memo[mask] = (best_val, best_block)
        return best_val

    full = (1 << hg.n) - 1
    best(full)
    comps = []
    mask = full
    while mask:
        _, block = memo[mask]
        comps.append(frozenset(t for t in range(hg.n) if (block >> t) & 1))
        mask &= ~block
    return normalize_components(comps)


def mraf_exact(t1: PhyloTree, t2: PhyloTree, strategy: str = "bnb",
               budget: float | None = None) -> MrafResult:
    """A minimum relaxed agreement forest.

    ``bnb`` runs iterative deepening on the component count, deciding each k
    by weak hypergraph coloring; ``cover_dp`` runs the subset-memoized set
    cover (guarded to n <= 24).  On timeout the result carries the best
    proven lower bound and the best feasible partition found so far.
    """
    from .approx import greedy_mast_raf  # local import: approx builds on mast
    from .mast import mast

    t1, t2 = align_pair(t1, t2)
    start = time.monotonic()
    deadline = start + budget if budget is not None else None
    n = t1.n
    if strategy not in ("bnb", "cover_dp"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if strategy == "cover_dp" and n > 24:
        raise ValueError("cover_dp is guarded to n <= 24")
    if n <= 3:
        part = RafPartition((frozenset(range(n)),))
        return MrafResult(part, 1, True, time.monotonic() - start, strategy)
    hg = build_conflict_hypergraph(t1, t2)
    if not hg.edges:
        part = RafPartition((frozenset(range(n)),))
        return MrafResult(part, 1, True, time.monotonic() - start, strategy)

    mast_size = mast(t1, t2).size
    lower = max(2, ceil(n / mast_size))
    greedy = greedy_mast_raf(t1, t2)
    upper_comps = greedy.components
    if len(upper_comps) > ceil(n / 3):
        upper_comps = _triple_partition(n)

    if strategy == "cover_dp":
        try:
            comps = _cover_dp(hg, deadline)
            part = RafPartition(comps)
            return MrafResult(part, part.size, True,
                              time.monotonic() - start, strategy)
        except SolverTimeout:
            return MrafResult(RafPartition(upper_comps), lower, False,
                              time.monotonic() - start, strategy)

    k = lower
    try:
        while k < len(upper_comps):
            colors = _decide_weak_coloring(hg, k, deadline)
            if colors is not None:
                part = RafPartition(_coloring_to_partition(colors, k))
                return MrafResult(part, part.size, True,
                                  time.monotonic() - start, strategy)
            k += 1
        part = RafPartition(upper_comps)
        return MrafResult(part, part.size, True,
                          time.monotonic() - start, strategy)
    except SolverTimeout:
        return MrafResult(RafPartition(upper_comps), k, False,
                          time.monotonic() - start, strategy)


# -- brute-force oracles -------------------------------------------------------


def mraf_bruteforce(t1: PhyloTree, t2: PhyloTree) -> RafPartition:
    """Minimum RAF over all set partitions (n <= 10), tree-route checks only."""
    t1, t2 = align_pair(t1, t2)
    n = t1.n
    if n > 10:
        raise ValueError("mraf_bruteforce is guarded to n <= 10")
    agree_cache = {}

    def agree(block):
        S = frozenset(block)
        hit = agree_cache.get(S)
        if hit is None:
            hit = is_homeomorphic(t1, t2, S)
            agree_cache[S] = hit
        return hit

    best = list(_triple_partition(n))

    def rec(i, blocks):
        nonlocal best
        if len(blocks) >= len(best):
            return
        if i == n:
            best = [frozenset(b) for b in blocks]
            return
        for b in blocks:
            b.add(i)
            if agree(b):
                rec(i + 1, blocks)
            b.discard(i)
        blocks.append({i})
        rec(i + 1, blocks)
        blocks.pop()

    rec(0, [])
    return RafPartition(normalize_components(best))


def maf_bruteforce(t1: PhyloTree, t2: PhyloTree) -> RafPartition:
    """Minimum agreement forest (vertex-disjoint components), n <= 12.

    Iterative deepening over the component count; at each level, taxa are
    assigned in order with agreement and disjointness checked incrementally.
    """
    t1, t2 = align_pair(t1, t2)
    n = t1.n
    if n > 12:
        raise ValueError("maf_bruteforce is guarded to n <= 12")
    agree_cache = {}
    span_cache = ({}, {})
    trees = (t1, t2)

    def agree(S):
        hit = agree_cache.get(S)
        if hit is None:
            hit = is_homeomorphic(t1, t2, S)
            agree_cache[S] = hit
        return hit

    def span(which, S):
        hit = span_cache[which].get(S)
        if hit is None:
            hit = spanning_vertices(trees[which], S)
            span_cache[which][S] = hit
        return hit

    def decide(k):
        blocks = []  # list of [taxa_set, span1, span2]

        def rec(i):
            if i == n:
                return True
            for b in blocks:
                S = frozenset(b[0] | {i})
                if not agree(S):
                    continue
                s1, s2 = span(0, S), span(1, S)
                ok = True
                for other in blocks:
                    if other is b:
                        continue
                    if s1 & other[1] or s2 & other[2]:
                        ok = False
                        break
                if ok:
                    old = b[0], b[1], b[2]
                    b[0], b[1], b[2] = S, s1, s2
                    if rec(i + 1):
                        return True
                    b[0], b[1], b[2] = old
            if len(blocks) < k:
                S = frozenset((i,))
                s1, s2 = span(0, S), span(1, S)
                if all(not (s1 & o[1]) and not (s2 & o[2]) for o in blocks):
                    blocks.append([S, s1, s2])
                    if rec(i + 1):
                        return True
                    blocks.pop()
            return False

        if rec(0):
            return [b[0] for b in blocks]
        return None

    for k in range(1, n + 1):
        found = decide(k)
        if found is not None:
            return RafPartition(normalize_components(found), kind="AF")
    raise AssertionError("singleton partition is always an agreement forest")


# -- bounds ---------------------------------------------------------------------


@dataclass(frozen=True)
class MrafBounds:
    lower: int
    upper: int
    witness_upper: RafPartition


def mraf_bounds(t1: PhyloTree, t2: PhyloTree) -> MrafBounds:
    """Cheap sandwich: ceil(n/MAST) and equality below, greedy/⌈n/3⌉ above."""
    from .approx import greedy_mast_raf
    from .mast import mast

    t1, t2 = align_pair(t1, t2)
    n = t1.n
    if trees_equal(t1, t2):
        part = RafPartition((frozenset(range(n)),))
        return MrafBounds(1, 1, part)
    mast_size = mast(t1, t2).size
    lower = max(2, ceil(n / mast_size))
    greedy = greedy_mast_raf(t1, t2)
    if n >= 3 and greedy.size > ceil(n / 3):
        witness = RafPartition(_triple_partition(n))
    else:
        witness = greedy
    return MrafBounds(lower, witness.size, witness)
