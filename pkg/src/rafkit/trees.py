"""Unrooted binary phylogenetic trees: representation, Newick I/O, restriction,
quartet topologies, and caterpillar utilities.

A tree on a taxon universe of n labels is stored as a plain undirected graph.
Taxa carry dense integer ids 0..n-1 (the index into ``labels``); all set-valued
arguments and results use ``frozenset`` of taxon ids.  Trees are immutable
after construction and safe to share between threads.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations

TaxonSet = frozenset  # frozenset[int], taxon ids of one tree's universe

NEWICK_FORBIDDEN = set("(),;:")


class NewickError(ValueError):
    """Raised for malformed Newick input."""


@dataclass(frozen=True)
class Quartet:
    """Topology induced on four taxa: the split {a,b} | {c,d}."""

    taxa: frozenset
    split: frozenset  # frozenset of two 2-element frozensets

    def __str__(self) -> str:
        sides = sorted(tuple(sorted(s)) for s in self.split)
        return f"{sides[0][0]},{sides[0][1]}|{sides[1][0]},{sides[1][1]}"


@dataclass(frozen=True)
class CaterpillarOrder:
    """Spine order of a caterpillar; reversal denotes the same tree.

    ``sequence`` lists taxon ids along the spine with end-cherry ties broken
    by smaller id; ``end_ties`` records the two unordered cherry pairs whose
    internal order is not determined by the tree.
    """

    sequence: tuple
    end_ties: tuple  # (frozenset, frozenset)

    def variants(self):
        """All total orders consistent with the tree (end ties swapped)."""
        out = []
        for swap_front in (False, True):
            for swap_back in (False, True):
                s = list(self.sequence)
                if swap_front:
                    s[0], s[1] = s[1], s[0]
                if swap_back:
                    s[-1], s[-2] = s[-2], s[-1]
                out.append(tuple(s))
        return out


class PhyloTree:
    """Unrooted binary phylogenetic tree with leaves labeled by a taxon set.

    Vertices are integers; ``adj[v]`` is the tuple of neighbors.  Leaves are
    exactly the vertices of degree 1 (degree 0 for a single-taxon tree), and
    every other vertex has degree 3.  Trees with one or two taxa are
    permitted as degenerate objects (they arise inside ``restrict``) but are
    never produced by the Newick parser.
    """

    __slots__ = ("labels", "adj", "leaf_vertex", "vertex_taxon", "_dist",
                 "_canon", "_hash")

    def __init__(self, labels, adj, leaf_vertex):
        self.labels = tuple(labels)
        self.adj = tuple(tuple(ns) for ns in adj)
        self.leaf_vertex = tuple(leaf_vertex)
        self.vertex_taxon = {v: t for t, v in enumerate(self.leaf_vertex)}
        self._dist = None
        self._canon = None
        self._hash = None
        self._check_invariants()

    # -- construction helpers ------------------------------------------------

    def _check_invariants(self):
        n = len(self.labels)
        if n == 0:
            raise ValueError("empty taxon set")
        if len(set(self.labels)) != n:
            raise NewickError("duplicate labels")
        m = len(self.adj)
        deg = [len(ns) for ns in self.adj]
        edge_count = sum(deg) // 2
        if edge_count != m - 1:
            raise ValueError("not a tree (edge count)")
        # connectivity
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in self.adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != m:
            raise ValueError("not a tree (disconnected)")
        for v in range(m):
            if v in self.vertex_taxon:
                if deg[v] > 1:
                    raise ValueError("labeled vertex is not a leaf")
            elif deg[v] != 3:
                raise ValueError("internal vertex of degree != 3")

    @property
    def n(self) -> int:
        return len(self.labels)

    def taxa(self) -> frozenset:
        return frozenset(range(self.n))

    def taxon_id(self, label: str) -> int:
        return self.labels.index(label)

    def ids_of(self, labels) -> frozenset:
        index = {lab: i for i, lab in enumerate(self.labels)}
        return frozenset(index[lab] for lab in labels)

    def labels_of(self, taxa) -> frozenset:
        return frozenset(self.labels[t] for t in taxa)

    def attach_vertex(self, taxon: int) -> int:
        """The internal vertex a taxon's leaf hangs from (n >= 3)."""
        leaf = self.leaf_vertex[taxon]
        return self.adj[leaf][0]

    def with_universe(self, labels) -> "PhyloTree":
        """Reindex taxa to follow the given label order (same label set)."""
        if tuple(labels) == self.labels:
            return self
        if set(labels) != set(self.labels):
            raise ValueError("mismatched taxon universes")
        old = {lab: t for t, lab in enumerate(self.labels)}
        leaf_vertex = [self.leaf_vertex[old[lab]] for lab in labels]
        return PhyloTree(labels, self.adj, leaf_vertex)

    # -- distances and quartets ----------------------------------------------

    def _distances(self):
        """Leaf-to-leaf topological distances, dist[taxon][taxon]."""
        if self._dist is None:
            m = len(self.adj)
            dist = []
            for t in range(self.n):
                d = [-1] * m
                src = self.leaf_vertex[t]
                d[src] = 0
                frontier = [src]
                while frontier:
                    nxt = []
                    for v in frontier:
                        for w in self.adj[v]:
                            if d[w] < 0:
                                d[w] = d[v] + 1
                                nxt.append(w)
                    frontier = nxt
                dist.append(tuple(d[self.leaf_vertex[u]] for u in range(self.n)))
            self._dist = tuple(dist)
        return self._dist

    def quartet_topology(self, quartet) -> Quartet:
        """The unique topology this tree induces on four distinct taxa.

        Uses the four-point condition on topological distances: among the
        three pairings, the one with strictly smallest distance sum is the
        induced split.
        """
        q = sorted(quartet)
        if len(q) != 4 or len(set(q)) != 4:
            raise ValueError("quartet needs four distinct taxa")
        a, b, c, d = q
        dist = self._distances()
        s_ab = dist[a][b] + dist[c][d]
        s_ac = dist[a][c] + dist[b][d]
        s_ad = dist[a][d] + dist[b][c]
        best = min(s_ab, s_ac, s_ad)
        if s_ab == best:
            split = frozenset((frozenset((a, b)), frozenset((c, d))))
        elif s_ac == best:
            split = frozenset((frozenset((a, c)), frozenset((b, d))))
        else:
            split = frozenset((frozenset((a, d)), frozenset((b, c))))
        return Quartet(frozenset(q), split)

    # -- restriction ----------------------------------------------------------

    def restrict(self, taxa) -> "PhyloTree":
        """The tree induced on a subset of taxa, degree-2 vertices suppressed.

        For one or two taxa the result is a degenerate tree (single vertex or
        single edge); such objects are valid inputs to further restrictions
        but are never compared structurally.
        """
        S = sorted(set(taxa))
        if not S:
            raise ValueError("cannot restrict to the empty set")
        if len(S) == self.n:
            return self
        keep_leaves = {self.leaf_vertex[t] for t in S}
        m = len(self.adj)
        deg = [len(ns) for ns in self.adj]
        alive = [True] * m
        # prune non-kept leaves inward to get the minimal spanning subtree
        stack = [v for v in range(m) if deg[v] <= 1 and v not in keep_leaves]
        for v in range(m):
            if deg[v] == 0 and v not in keep_leaves:
                alive[v] = False
        while stack:
            v = stack.pop()
            if not alive[v]:
                continue
            alive[v] = False
            for w in self.adj[v]:
                if alive[w]:
                    deg[w] -= 1
                    if deg[w] <= 1 and w not in keep_leaves:
                        stack.append(w)
        # suppress degree-2 vertices on the surviving subtree
        nbrs = {v: [w for w in self.adj[v] if alive[w]]
                for v in range(m) if alive[v]}
        for v in list(nbrs):
            if len(nbrs[v]) == 2 and v not in keep_leaves:
                a, b = nbrs[v]
                nbrs[a] = [x for x in nbrs[a] if x != v] + [b]
                nbrs[b] = [x for x in nbrs[b] if x != v] + [a]
                del nbrs[v]
        remap = {v: i for i, v in enumerate(sorted(nbrs))}
        labels = [self.labels[t] for t in S]
        adj = [[] for _ in remap]
        for v, ns in nbrs.items():
            adj[remap[v]] = [remap[w] for w in ns]
        leaf_vertex = [remap[self.leaf_vertex[t]] for t in S]
        return PhyloTree(labels, adj, leaf_vertex)

    # -- canonical form -------------------------------------------------------

    def canonical_form(self):
        """Label-based canonical structure; equal iff trees are equal.

        The tree is rooted at the leaf with the lexicographically smallest
        label and children are ordered by smallest label in their subtree,
        which makes the form independent of vertex numbering and taxon ids.
        """
        if self._canon is None:
            if self.n == 1:
                self._canon = (self.labels[0],)
            elif self.n == 2:
                self._canon = tuple(sorted(self.labels))
            else:
                root_label = min(self.labels)
                root_leaf = self.leaf_vertex[self.labels.index(root_label)]

                def walk(v, parent):
                    if v in self.vertex_taxon:
                        lab = self.labels[self.vertex_taxon[v]]
                        return lab, (lab,)
                    subs = [walk(w, v) for w in self.adj[v] if w != parent]
                    subs.sort(key=lambda s: s[0])
                    return subs[0][0], tuple(s[1] for s in subs)

                _, shape = walk(self.adj[root_leaf][0], root_leaf)
                self._canon = (root_label, shape)
        return self._canon

    def __eq__(self, other):
        if not isinstance(other, PhyloTree):
            return NotImplemented
        return (set(self.labels) == set(other.labels)
                and self.canonical_form() == other.canonical_form())

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.canonical_form())
        return self._hash

    def __repr__(self):
        return f"PhyloTree(n={self.n})"


# -- Newick ------------------------------------------------------------------


def parse_newick(text: str, universe=None) -> PhyloTree:
    """Parse a Newick string into an unrooted binary tree.

    Rooted inputs (top-level bifurcation) are accepted and silently unrooted
    by suppressing the degree-2 root.  Branch lengths and internal labels are
    ignored.  ``universe`` optionally fixes the taxon id order; otherwise ids
    follow first appearance.
    """
    s = text.strip()
    if s.endswith(";"):
        s = s[:-1]
    if not s:
        raise NewickError("empty Newick string")

    pos = 0

    def skip_decoration():
        # drop an optional internal label and/or :length annotation
        nonlocal pos
        while pos < len(s) and s[pos] not in "(),;":
            pos += 1

    def parse_node():
        nonlocal pos
        if pos < len(s) and s[pos] == "(":
            pos += 1
            children = [parse_node()]
            while pos < len(s) and s[pos] == ",":
                pos += 1
                children.append(parse_node())
            if pos >= len(s) or s[pos] != ")":
                raise NewickError("unbalanced parentheses")
            pos += 1
            skip_decoration()
            return children
        start = pos
        while pos < len(s) and s[pos] not in "(),;:":
            pos += 1
        label = s[start:pos].strip()
        if not label:
            raise NewickError("missing taxon label")
        if pos < len(s) and s[pos] == ":":
            skip_decoration()
        return label

    tree = parse_node()
    if pos != len(s):
        raise NewickError("unbalanced parentheses")
    if not isinstance(tree, list):
        raise NewickError("fewer than 3 leaves")

    labels = []
    adj = []
    leaf_of_label = {}

    def new_vertex():
        adj.append([])
        return len(adj) - 1

    def build(node):
        v = new_vertex()
        if isinstance(node, str):
            if node in leaf_of_label:
                raise NewickError(f"duplicate label {node!r}")
            leaf_of_label[node] = v
            labels.append(node)
            return v
        if len(node) != 2:
            raise NewickError("non-binary internal vertex")
        for child in node:
            w = build(child)
            adj[v].append(w)
            adj[w].append(v)
        return v

    if len(tree) == 3:
        root = new_vertex()
        for child in tree:
            w = build(child)
            adj[root].append(w)
            adj[w].append(root)
    elif len(tree) == 2:
        left = build(tree[0])
        right = build(tree[1])
        adj[left].append(right)
        adj[right].append(left)
    else:
        raise NewickError("non-binary internal vertex")

    if len(labels) < 3:
        raise NewickError("fewer than 3 leaves")

    order = list(universe) if universe is not None else labels
    if set(order) != set(labels):
        raise NewickError("universe does not match leaf labels")
    leaf_vertex = [leaf_of_label[lab] for lab in order]
    return PhyloTree(order, adj, leaf_vertex)


def write_newick(tree: PhyloTree) -> str:
    """Canonical Newick: equal trees serialize to identical strings.

    The output is rooted (as a trifurcation) at the internal vertex next to
    the lexicographically smallest label; children are ordered by smallest
    label in their subtree.
    """
    if tree.n == 1:
        return f"{tree.labels[0]};"
    if tree.n == 2:
        a, b = sorted(tree.labels)
        return f"({a},{b});"
    root_label = min(tree.labels)
    root_leaf = tree.leaf_vertex[tree.labels.index(root_label)]
    hub = tree.adj[root_leaf][0]

    def walk(v, parent):
        if v in tree.vertex_taxon:
            lab = tree.labels[tree.vertex_taxon[v]]
            return lab, lab
        subs = sorted(walk(w, v) for w in tree.adj[v] if w != parent)
        return subs[0][0], "(" + ",".join(s[1] for s in subs) + ")"

    subs = sorted(walk(w, hub) for w in tree.adj[hub] if w != root_leaf)
    parts = [root_label] + [s[1] for s in subs]
    return "(" + ",".join(parts) + ");"


# -- comparisons ---------------------------------------------------------------


def trees_equal(t1: PhyloTree, t2: PhyloTree) -> bool:
    """Label-preserving isomorphism, via canonical form comparison."""
    if set(t1.labels) != set(t2.labels):
        raise ValueError("mismatched taxon universes")
    return t1.canonical_form() == t2.canonical_form()


def is_homeomorphic(t1: PhyloTree, t2: PhyloTree, taxa) -> bool:
    """Do the two trees induce the same tree on this taxon set?

    Any set of at most three taxa is homeomorphic in every pair of trees.
    """
    t1, t2 = align_pair(t1, t2)
    S = frozenset(taxa)
    if not S <= t1.taxa():
        raise ValueError("taxa outside universe")
    if len(S) <= 3:
        return True
    return trees_equal(t1.restrict(S), t2.restrict(S))


def align_pair(t1: PhyloTree, t2: PhyloTree):
    """Reindex t2 onto t1's taxon indexing (label sets must agree)."""
    if set(t1.labels) != set(t2.labels):
        raise ValueError("mismatched taxon universes")
    return t1, t2.with_universe(t1.labels)


# -- caterpillars ----------------------------------------------------------------


def caterpillar_order(tree: PhyloTree):
    """Spine order if the tree is a caterpillar, else None (n >= 4)."""
    if tree.n < 4:
        raise ValueError("caterpillar order needs n >= 4")
    internal = [v for v in range(len(tree.adj)) if v not in tree.vertex_taxon]
    inner_deg = {}
    for v in internal:
        ns = [w for w in tree.adj[v] if w not in tree.vertex_taxon]
        inner_deg[v] = len(ns)
        if len(ns) > 2:
            return None
    ends = [v for v in internal if inner_deg[v] <= 1]
    if len(internal) == 1:
        spine = internal
    else:
        if len(ends) != 2:
            return None
        spine = [ends[0]]
        prev = None
        while True:
            v = spine[-1]
            nxt = [w for w in tree.adj[v]
                   if w not in tree.vertex_taxon and w != prev]
            if not nxt:
                break
            prev = v
            spine.append(nxt[0])
        if len(spine) != len(internal):
            return None
    pendants = [sorted(tree.vertex_taxon[w] for w in tree.adj[v]
                       if w in tree.vertex_taxon)
                for v in spine]
    if pendants and (len(pendants[0]) != 2 or len(pendants[-1]) != 2):
        return None
    if any(len(p) != 1 for p in pendants[1:-1]):
        return None
    seq = [t for p in pendants for t in p]
    front = frozenset(pendants[0])
    back = frozenset(pendants[-1])
    # orientation is arbitrary; pick the lexicographically smaller of the two
    # tie-normalized readings so equal trees yield identical orders
    rev = list(reversed(seq))
    rev[0], rev[1] = sorted(rev[:2])
    rev[-2], rev[-1] = sorted(rev[-2:])
    if tuple(rev) < tuple(seq):
        seq, front, back = rev, back, front
    return CaterpillarOrder(tuple(seq), (front, back))


def _caterpillar_from_sequence(labels_in_order) -> PhyloTree:
    """Caterpillar whose spine carries the given labels left to right."""
    labs = list(labels_in_order)
    n = len(labs)
    if n < 4:
        raise ValueError("caterpillar needs n >= 4")
    adj = [[] for _ in range(n + n - 2)]
    leaf_of = {}

    def connect(a, b):
        adj[a].append(b)
        adj[b].append(a)

    # leaves 0..n-1 (in spine order), spine vertices n..2n-3
    for i in range(n - 2):
        v = n + i
        if i > 0:
            connect(v, v - 1)
    connect(n, 0)
    connect(n, 1)
    for i in range(2, n - 2):
        connect(n + i - 1, i)
    connect(2 * n - 3, n - 2)
    connect(2 * n - 3, n - 1)
    for pos in range(n):
        leaf_of[labs[pos]] = pos
    # taxon ids follow sorted label order for a stable universe
    universe = sorted(labs, key=_label_sort_key)
    leaf_vertex = [leaf_of[lab] for lab in universe]
    return PhyloTree(universe, adj, leaf_vertex)


def _label_sort_key(label: str):
    return (0, int(label)) if label.isdigit() else (1, label)


def identity_caterpillar(n: int) -> PhyloTree:
    """Caterpillar with leaves 1..n in ascending spine order."""
    if n < 4:
        raise ValueError("identity caterpillar needs n >= 4")
    return _caterpillar_from_sequence([str(i) for i in range(1, n + 1)])


def permutation_caterpillar(perm) -> PhyloTree:
    """Caterpillar whose i-th spine position carries leaf perm[i].

    ``perm`` is a bijection on 1..n given as a sequence of values.
    """
    values = list(perm)
    n = len(values)
    if sorted(values) != list(range(1, n + 1)):
        raise ValueError("not a permutation of 1..n")
    if n < 4:
        raise ValueError("permutation caterpillar needs n >= 4")
    return _caterpillar_from_sequence([str(v) for v in values])


# -- generation ---------------------------------------------------------------


def random_tree(labels, rng: random.Random) -> PhyloTree:
    """Uniform-ish random unrooted binary tree via sequential leaf insertion."""
    labs = list(labels)
    if len(labs) < 3:
        raise ValueError("random tree needs n >= 3")
    adj = [[], [], [], []]
    edges = []

    def connect(a, b):
        adj[a].append(b)
        adj[b].append(a)
        edges.append((a, b))

    connect(3, 0)
    connect(3, 1)
    connect(3, 2)
    leaf_vertices = [0, 1, 2]
    for _ in labs[3:]:
        u, v = edges[rng.randrange(len(edges))]
        mid = len(adj)
        adj.append([])
        leaf = len(adj)
        adj.append([])
        adj[u].remove(v)
        adj[v].remove(u)
        edges.remove((u, v))
        connect(u, mid)
        connect(mid, v)
        connect(mid, leaf)
        leaf_vertices.append(leaf)
    return PhyloTree(labs, adj, leaf_vertices)


def random_pair(labels, rng: random.Random):
    """Two independent random trees on a shared universe."""
    t1 = random_tree(labels, rng)
    t2 = random_tree(labels, rng)
    return t1, t2


def all_quartets(n: int):
    """All 4-element taxon subsets of range(n), as sorted tuples."""
    return combinations(range(n), 4)


class TreeAssembler:
    """Graph-by-name builder that contracts degree-2 vertices on build.

    Convenient for generators that assemble trees from named parts before
    the attachment points settle their final degrees.
    """

    def __init__(self):
        self.names = {}
        self.adj = []
        self.leaf_label = {}

    def vertex(self, name):
        if name not in self.names:
            self.names[name] = len(self.adj)
            self.adj.append([])
        return self.names[name]

    def edge(self, a, b):
        va, vb = self.vertex(a), self.vertex(b)
        self.adj[va].append(vb)
        self.adj[vb].append(va)

    def path(self, names):
        for a, b in zip(names, names[1:]):
            self.edge(a, b)

    def leaf(self, name, label):
        self.vertex(name)
        self.leaf_label[name] = label

    def caterpillar(self, spine_names, leaf_pairs):
        """A pendant caterpillar: spine path plus one labeled leaf each."""
        self.path(spine_names)
        for spine, (leaf_name, label) in zip(spine_names, leaf_pairs):
            self.leaf(leaf_name, label)
            self.edge(spine, leaf_name)

    def build(self, universe) -> PhyloTree:
        leaf_vertices = {self.names[nm] for nm in self.leaf_label}
        adj = {v: list(ns) for v, ns in enumerate(self.adj)}
        for v in list(adj):
            if len(adj[v]) == 2 and v not in leaf_vertices:
                a, b = adj[v]
                adj[a] = [x for x in adj[a] if x != v] + [b]
                adj[b] = [x for x in adj[b] if x != v] + [a]
                del adj[v]
        remap = {v: i for i, v in enumerate(sorted(adj))}
        out = [[] for _ in remap]
        for v, ns in adj.items():
            out[remap[v]] = [remap[w] for w in ns]
        by_label = {label: remap[self.names[nm]]
                    for nm, label in self.leaf_label.items()}
        return PhyloTree(universe, out, [by_label[lab] for lab in universe])


def spanning_vertices(tree: PhyloTree, taxa) -> frozenset:
    """Vertices of the minimal subtree of the tree connecting the given taxa."""
    keep = {tree.leaf_vertex[t] for t in taxa}
    if not keep:
        raise ValueError("empty taxon set")
    m = len(tree.adj)
    deg = [len(ns) for ns in tree.adj]
    alive = [True] * m
    stack = [v for v in range(m) if deg[v] <= 1 and v not in keep]
    while stack:
        v = stack.pop()
        if not alive[v]:
            continue
        alive[v] = False
        for w in tree.adj[v]:
            if alive[w]:
                deg[w] -= 1
                if deg[w] <= 1 and w not in keep:
                    stack.append(w)
    return frozenset(v for v in range(m) if alive[v])
