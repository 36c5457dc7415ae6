"""Maximum agreement subtree (MAST) of two unrooted binary trees.

``mast`` runs the standard rooted dynamic program over pairs of directed
edges; ``mast_bruteforce`` is an independent subset-enumeration oracle used
to validate it on small instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .trees import PhyloTree, align_pair, is_homeomorphic


@dataclass(frozen=True)
class MastResult:
    """A maximum-cardinality agreement set between two trees."""

    taxa: frozenset

    @property
    def size(self) -> int:
        return len(self.taxa)


class _Rooted:
    """Directed-edge view of one tree: (u, v) is the subtree at v away from u."""

    def __init__(self, tree: PhyloTree):
        self.tree = tree
        self.children = {}
        self.leafset = {}
        for u in range(len(tree.adj)):
            for v in tree.adj[u]:
                self._build((u, v))

    def _build(self, edge):
        if edge in self.leafset:
            return self.leafset[edge]
        u, v = edge
        taxon = self.tree.vertex_taxon.get(v)
        if taxon is not None:
            self.children[edge] = None
            self.leafset[edge] = frozenset((taxon,))
        else:
            kids = tuple((v, w) for w in self.tree.adj[v] if w != u)
            self.children[edge] = kids
            self.leafset[edge] = frozenset().union(
                *(self._build(k) for k in kids))
        return self.leafset[edge]


def mast(t1: PhyloTree, t2: PhyloTree) -> MastResult:
    """A maximum agreement subtree, computed in O(n^2) table size.

    Every rooted subtree pair is scored once; the unrooted optimum is the
    best over all single-leaf rootings.  Ties are broken by fixed iteration
    order, so repeated calls return the same set.
    """
    t1, t2 = align_pair(t1, t2)
    n = t1.n
    if n <= 3:
        return MastResult(t1.taxa())
    r1, r2 = _Rooted(t1), _Rooted(t2)
    memo = {}

    def score(e1, e2):
        key = (e1, e2)
        got = memo.get(key)
        if got is not None:
            return got
        kids1 = r1.children[e1]
        kids2 = r2.children[e2]
        if kids1 is None:
            val = 1 if r1.leafset[e1] <= r2.leafset[e2] else 0
        elif kids2 is None:
            val = 1 if r2.leafset[e2] <= r1.leafset[e1] else 0
        else:
            a1, b1 = kids1
            a2, b2 = kids2
            val = max(
                score(a1, e2), score(b1, e2),
                score(e1, a2), score(e1, b2),
                score(a1, a2) + score(b1, b2),
                score(a1, b2) + score(b1, a2),
            )
        memo[key] = val
        return val

    def witness(e1, e2):
        kids1 = r1.children[e1]
        kids2 = r2.children[e2]
        if kids1 is None:
            return set(r1.leafset[e1]) if r1.leafset[e1] <= r2.leafset[e2] else set()
        if kids2 is None:
            return set(r2.leafset[e2]) if r2.leafset[e2] <= r1.leafset[e1] else set()
        target = memo[(e1, e2)]
        a1, b1 = kids1
        a2, b2 = kids2
        for sub in ((a1, e2), (b1, e2), (e1, a2), (e1, b2)):
            if score(*sub) == target:
                return witness(*sub)
        if score(a1, a2) + score(b1, b2) == target:
            return witness(a1, a2) | witness(b1, b2)
        return witness(a1, b2) | witness(b1, a2)

    best_val = -1
    best_edges = None
    best_taxon = None
    for x in range(n):
        leaf1 = t1.leaf_vertex[x]
        leaf2 = t2.leaf_vertex[x]
        e1 = (leaf1, t1.adj[leaf1][0])
        e2 = (leaf2, t2.adj[leaf2][0])
        val = 1 + score(e1, e2)
        if val > best_val:
            best_val = val
            best_edges = (e1, e2)
            best_taxon = x
    taxa = witness(*best_edges)
    taxa.add(best_taxon)
    return MastResult(frozenset(taxa))


def mast_bruteforce(t1: PhyloTree, t2: PhyloTree) -> MastResult:
    """Exhaustive MAST by descending-size subset enumeration (n <= 12)."""
    t1, t2 = align_pair(t1, t2)
    n = t1.n
    if n > 12:
        raise ValueError("mast_bruteforce is guarded to n <= 12")
    if n <= 3:
        return MastResult(t1.taxa())
    for size in range(n, 3, -1):
        for subset in combinations(range(n), size):
            if is_homeomorphic(t1, t2, subset):
                return MastResult(frozenset(subset))
    return MastResult(frozenset(range(3)))
