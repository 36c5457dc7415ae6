"""Caterpillar-vs-tree machinery: the fixed-k decision DP and the
conversions between monotone permutation partitions and relaxed forests.

A caterpillar pair (identity order vs permuted order) is the tree form of a
permutation: a taxon set is an agreement component exactly when its values
occur monotonically, up to the end-cherry ties.  The decision DP constrains
each component by its first and last taxon in the caterpillar order and
sweeps the remaining taxa left to right, remembering per component only the
position along the second tree's endpoint path of the last taxon placed.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, sqrt

from .pims import (MonotonePartition, check_monotone_partition,
                   check_permutation, class_direction, _strip_monotone)
from .raf import RafPartition, normalize_components, validate_raf
from .trees import (PhyloTree, align_pair, caterpillar_order,
                    identity_caterpillar, permutation_caterpillar)


def caterpillar_pair(perm):
    """(identity caterpillar, permuted caterpillar) over labels 1..n."""
    values = check_permutation(perm)
    return identity_caterpillar(len(values)), permutation_caterpillar(values)


# -- PIMS <-> MRAF -------------------------------------------------------------


def pims_to_mraf(perm, partition: MonotonePartition) -> RafPartition:
    """Monotone classes become agreement components of the caterpillar pair.

    Taxon ids equal value - 1 in the shared universe of ``caterpillar_pair``.
    """
    values = check_permutation(perm)
    if not check_monotone_partition(values, partition):
        raise ValueError("invalid monotone partition for this permutation")
    comps = [frozenset(values[p] - 1 for p in positions)
             for _, positions in partition.classes]
    return RafPartition(normalize_components(comps))


def raf_to_pims(perm, partition: RafPartition) -> MonotonePartition:
    """Trim component ends until monotone; restrip the trimmed positions.

    Each component of a caterpillar-pair RAF is monotone except possibly at
    its end cherries, so cutting at most one leaf per end leaves a monotone
    interior.  The at most 2k cut positions are repartitioned greedily,
    giving at most k + ceil(2*sqrt(2k)) classes in total.
    """
    values = check_permutation(perm)
    n = len(values)
    t1, t2 = caterpillar_pair(values)
    if not validate_raf(t1, t2, partition):
        raise ValueError("partition is not a RAF of the caterpillar pair")
    pos_of_value = {v: p for p, v in enumerate(values)}
    classes = []
    leftovers = []
    for comp in partition.components:
        ps = sorted(pos_of_value[t + 1] for t in comp)
        vals = [values[p] for p in ps]
        for front, back in ((0, 0), (1, 0), (0, 1), (1, 1)):
            interior = vals[front:len(vals) - back]
            if class_direction(interior) is not None:
                break
        else:
            raise AssertionError("validated component must trim to monotone")
        if interior:
            classes.append((class_direction(interior),
                            tuple(ps[front:len(ps) - back])))
        leftovers.extend(ps[:front])
        leftovers.extend(ps[len(ps) - back:])
    leftovers.sort()
    classes.extend(_strip_monotone(leftovers, [values[p] for p in leftovers]))
    result = MonotonePartition(tuple(classes))
    assert check_monotone_partition(values, result)
    return result


def raf_to_pims_bound(k: int) -> int:
    """Class-count guarantee of ``raf_to_pims`` for a size-k forest."""
    return k + ceil(2 * sqrt(2 * k))


# -- endpoint paths and bags ----------------------------------------------------


@dataclass(frozen=True)
class BagDecomposition:
    """The l-r path in a tree with the hanging subtrees per path vertex."""

    path: tuple  # vertex ids from l's leaf to r's leaf
    bags: tuple  # ((attachment vertex, frozenset of taxa), ...) in path order


def path_bags(tree: PhyloTree, l: int, r: int) -> BagDecomposition:
    """Hanging subtrees along the unique leaf-to-leaf path, in path order."""
    if l == r:
        raise ValueError("endpoints must differ")
    src = tree.leaf_vertex[l]
    dst = tree.leaf_vertex[r]
    parent = {src: None}
    frontier = [src]
    while dst not in parent:
        nxt = []
        for v in frontier:
            for w in tree.adj[v]:
                if w not in parent:
                    parent[w] = v
                    nxt.append(w)
        frontier = nxt
    path = []
    v = dst
    while v is not None:
        path.append(v)
        v = parent[v]
    path.reverse()
    on_path = set(path)
    bags = []
    for w in path[1:-1]:
        taxa = set()
        for off in tree.adj[w]:
            if off in on_path:
                continue
            stack = [(off, w)]
            while stack:
                x, par = stack.pop()
                taxon = tree.vertex_taxon.get(x)
                if taxon is not None:
                    taxa.add(taxon)
                stack.extend((y, x) for y in tree.adj[x] if y != par)
        if taxa:
            bags.append((w, frozenset(taxa)))
    return BagDecomposition(tuple(path), tuple(bags))


def _bag_indices(tree: PhyloTree, l: int, r: int):
    """taxon -> position along the l-r path: l is 0, bags 1..B, r is B+1."""
    decomp = path_bags(tree, l, r)
    index = {}
    for i, (_, taxa) in enumerate(decomp.bags, start=1):
        for t in taxa:
            index[t] = i
    index[l] = 0
    index[r] = len(decomp.bags) + 1
    return index


# -- the fixed-k decision ---------------------------------------------------------


def caterpillar_xp_decide(t1: PhyloTree, t2: PhyloTree, k: int):
    """A RAF with at most k components when the first tree is a caterpillar.

    Returns a witness partition or None.  For n <= 3k any partition into
    triples works.  Otherwise, for each component count j <= k, every
    assignment of first/last taxa (l_j, r_j) in the caterpillar order is
    tried (both end-cherry tie orders), and a layered boolean DP over
    last-placed path positions decides feasibility.
    """
    t1, t2 = align_pair(t1, t2)
    n = t1.n
    if k < 1:
        raise ValueError("k must be at least 1")
    if n <= 3 * k:
        comps = tuple(frozenset(range(i, min(i + 3, n)))
                      for i in range(0, n, 3))
        return RafPartition(comps)
    order = caterpillar_order(t1)
    if order is None:
        raise ValueError("first tree is not a caterpillar")
    bag_cache = {}

    def bags_for(l, r):
        got = bag_cache.get((l, r))
        if got is None:
            got = _bag_indices(t2, l, r)
            bag_cache[(l, r)] = got
        return got

    for j in range(1, k + 1):
        for seq in dict.fromkeys(order.variants()):
            comps = _decide_constrained(seq, j, bags_for)
            if comps is not None:
                return RafPartition(normalize_components(comps))
    return None


def _decide_constrained(seq, j, bags_for):
    """Search all endpoint tuples for j components over one total order."""
    n = len(seq)
    found = None

    def run_dp(brackets):
        index_maps = [bags_for(seq[lp], seq[rp]) if lp != rp else None
                      for lp, rp in brackets]
        endpoint_of = {}
        for jj, (lp, rp) in enumerate(brackets):
            endpoint_of[lp] = jj
            endpoint_of[rp] = jj
        layers = []
        cur = {(0,) * j: (None, None)}
        for p in range(n):
            taxon = seq[p]
            if p in endpoint_of:
                layers.append({s: (s, None) for s in cur})
                continue
            nxt = {}
            for state in cur:
                for jj, (lp, rp) in enumerate(brackets):
                    if not lp < p < rp:
                        continue
                    bi = index_maps[jj][taxon]
                    if bi > state[jj]:
                        ns = state[:jj] + (bi,) + state[jj + 1:]
                        if ns not in nxt:
                            nxt[ns] = (state, jj)
            if not nxt:
                return None
            layers.append(nxt)
            cur = nxt
        state = next(iter(cur))
        comps = [set() for _ in range(j)]
        for jj, (lp, rp) in enumerate(brackets):
            comps[jj].add(seq[lp])
            comps[jj].add(seq[rp])
        for p in range(n - 1, -1, -1):
            prev, jj = layers[p][state]
            if jj is not None:
                comps[jj].add(seq[p])
            state = prev
        return [frozenset(c) for c in comps]

    def enumerate_brackets(chosen, used, start, max_r):
        nonlocal found
        if found is not None:
            return
        if len(chosen) == j:
            if max_r == n - 1:
                found = run_dp(chosen)
            return
        # prefix coverage: the next left endpoint may not skip a gap
        for lp in range(start, min(max_r + 1, n - 1) + 1):
            if lp in used:
                continue
            for rp in range(lp, n):
                if rp != lp and rp in used:
                    continue
                enumerate_brackets(chosen + [(lp, rp)],
                                   used | {lp, rp}, lp + 1, max(max_r, rp))
                if found is not None:
                    return

    enumerate_brackets([], frozenset(), 0, -1)
    return found


def caterpillar_minimum_raf(t1: PhyloTree, t2: PhyloTree) -> RafPartition:
    """Smallest RAF of a caterpillar pair via the decision DP.

    The DP tries component counts in ascending order, so a single call with
    the trivial ceiling minus one either yields the optimum or proves that
    the triple partition is already optimal.
    """
    t1, t2 = align_pair(t1, t2)
    n = t1.n
    cap = ceil(n / 3)
    if cap > 1:
        witness = caterpillar_xp_decide(t1, t2, cap - 1)
        if witness is not None:
            return witness
    comps = tuple(frozenset(range(i, min(i + 3, n))) for i in range(0, n, 3))
    return RafPartition(comps)
