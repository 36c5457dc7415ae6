"""Preprocessing for relaxed agreement forests.

Collapsing a cherry shared by both trees into a single taxon preserves the
minimum forest size, so ``subtree_reduce`` applies it to exhaustion.  Common
chains, in contrast, are NOT safe to shrink: shortening one can lower the
optimum.  Chains are therefore only detected and reported, and
``find_chain_unsafety_witness`` searches for a concrete pair exhibiting the
effect.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .raf import RafPartition, mraf_exact, normalize_components
from .trees import PhyloTree, TreeAssembler, align_pair, random_tree


@dataclass(frozen=True)
class ReductionTrace:
    """Record of exhaustive common-cherry merging on a tree pair."""

    steps: tuple  # ((label_a, label_b, merged_label), ...)
    final_pair: tuple  # (PhyloTree, PhyloTree)
    expansion: dict  # reduced label -> frozenset of original labels

    def expand_taxa(self, taxa, reduced_tree: PhyloTree,
                    original_tree: PhyloTree) -> frozenset:
        labels = set()
        for t in taxa:
            labels |= self.expansion[reduced_tree.labels[t]]
        return original_tree.ids_of(labels)

    def expand_partition(self, partition: RafPartition,
                         original_tree: PhyloTree) -> RafPartition:
        reduced = self.final_pair[0]
        comps = [self.expand_taxa(comp, reduced, original_tree)
                 for comp in partition.components]
        return RafPartition(normalize_components(comps), partition.kind)

    def to_json(self) -> str:
        return json.dumps({
            "steps": [list(s) for s in self.steps],
            "expansion_map": {lab: sorted(group)
                              for lab, group in sorted(self.expansion.items())},
        }, indent=2)


def _cherry_pairs(tree: PhyloTree):
    """Label pairs sharing an attachment vertex."""
    by_vertex = {}
    for t in range(tree.n):
        by_vertex.setdefault(tree.attach_vertex(t), []).append(t)
    return {frozenset((tree.labels[a], tree.labels[b]))
            for members in by_vertex.values() if len(members) == 2
            for a, b in (members,)}


def _merge_cherry(tree: PhyloTree, label_a: str, label_b: str,
                  merged: str) -> PhyloTree:
    ta, tb = tree.taxon_id(label_a), tree.taxon_id(label_b)
    va, vb = tree.leaf_vertex[ta], tree.leaf_vertex[tb]
    parent = tree.attach_vertex(ta)
    if tree.attach_vertex(tb) != parent:
        raise ValueError(f"{label_a},{label_b} is not a cherry")
    adj = {v: [w for w in ns if w not in (va, vb)]
           for v, ns in enumerate(tree.adj) if v not in (va, vb)}
    remap = {v: i for i, v in enumerate(sorted(adj))}
    out = [[] for _ in remap]
    for v, ns in adj.items():
        out[remap[v]] = [remap[w] for w in ns]
    keep = min(ta, tb)
    labels = [merged if t == keep else lab
              for t, lab in enumerate(tree.labels) if t != max(ta, tb)]
    leaf_vertex = [remap[parent] if t == keep else remap[tree.leaf_vertex[t]]
                   for t in range(tree.n) if t != max(ta, tb)]
    return PhyloTree(labels, out, leaf_vertex)


def subtree_reduce(t1: PhyloTree, t2: PhyloTree) -> ReductionTrace:
    """Merge common cherries until none remain (or only 3 leaves are left).

    Merged taxa are labeled ``a+b`` recursively; the expansion map recovers
    the original taxa behind every reduced label.
    """
    t1, t2 = align_pair(t1, t2)
    expansion = {lab: frozenset((lab,)) for lab in t1.labels}
    steps = []
    while t1.n > 3:
        common = _cherry_pairs(t1) & _cherry_pairs(t2)
        if not common:
            break
        pair = min(common, key=lambda p: tuple(sorted(p)))
        a, b = sorted(pair)
        merged = f"{a}+{b}"
        steps.append((a, b, merged))
        expansion[merged] = expansion.pop(a) | expansion.pop(b)
        t1 = _merge_cherry(t1, a, b, merged)
        t2 = _merge_cherry(t2, a, b, merged)
    return ReductionTrace(tuple(steps), (t1, t2), expansion)


# -- common chains (diagnostic only) ---------------------------------------------


def find_common_chains(t1: PhyloTree, t2: PhyloTree) -> list:
    """Maximal taxon runs (4 or more) forming a pendant chain in both trees.

    A chain is a contiguous run of pendant taxa: the attachment vertices
    walk along a path, equal attachments are permitted only for the cherry
    pairs at the run's two ends, and the end vertices carry no pendant
    leaves outside the run.  Runs of 3 or fewer are ignored because a chain
    reduction could not shrink them anyway.  Chains are never reduced here
    in any case (shrinking one can change the minimum forest size); this is
    a report for instance inspection.
    """
    t1, t2 = align_pair(t1, t2)
    n = t1.n
    if n < 3:
        return []
    attach = (tuple(t1.attach_vertex(t) for t in range(n)),
              tuple(t2.attach_vertex(t) for t in range(n)))
    trees = (t1, t2)
    pendants = []
    for side in (0, 1):
        by_vertex = {}
        for t in range(n):
            by_vertex.setdefault(attach[side][t], set()).add(t)
        pendants.append(by_vertex)

    def extensions(seq, used, closed):
        if closed[0] or closed[1]:
            return  # an end cherry seals the run
        last = seq[-1]
        for c in range(n):
            if c in seq:
                continue
            new_closed = [closed[0], closed[1]]
            ok = True
            for side in (0, 1):
                ua, uc = attach[side][last], attach[side][c]
                if uc == ua:
                    if len(seq) > 1:
                        new_closed[side] = True
                elif uc in used[side] or uc not in trees[side].adj[ua]:
                    ok = False
                    break
            if ok:
                yield c, new_closed

    def is_chain(seq):
        if len(seq) < 4:
            return False
        members = set(seq)
        for side in (0, 1):
            for end in (seq[0], seq[-1]):
                if not pendants[side][attach[side][end]] <= members:
                    return False
        return True

    found = {}

    def dfs(seq, used, closed):
        has_valid_superset = False
        for c, new_closed in extensions(seq, used, closed):
            if dfs(seq + [c],
                   (used[0] | {attach[0][c]}, used[1] | {attach[1][c]}),
                   new_closed):
                has_valid_superset = True
        if has_valid_superset:
            return True
        if is_chain(seq):
            found.setdefault(frozenset(seq), tuple(seq))
            return True
        return False

    for start in range(n):
        dfs([start], ({attach[0][start]}, {attach[1][start]}),
            [False, False])
    keep = []
    for key in sorted(found, key=lambda s: (-len(s), found[s])):
        if not any(key < other for other in keep):
            keep.append(key)
    return keep


def plant_common_chain(tree: PhyloTree, chain_labels, edge_index: int,
                       reverse: bool = False) -> PhyloTree:
    """Insert a pendant run of new taxa along a subdivided internal edge.

    Internal edges keep the run's ends clean (no alien cherry partners); if
    the tree has none, any edge is used.
    """
    labs = list(chain_labels)
    if reverse:
        labs.reverse()
    g = TreeAssembler()
    edges = []
    leaves = set(tree.leaf_vertex)
    for v, ns in enumerate(tree.adj):
        g.vertex(f"n{v}")
        for w in ns:
            if v < w:
                edges.append((v, w))
    internal = [(v, w) for v, w in edges
                if v not in leaves and w not in leaves]
    pool = internal or edges
    u, v = pool[edge_index % len(pool)]
    for a, b in edges:
        if (a, b) != (u, v):
            g.edge(f"n{a}", f"n{b}")
    spine = [f"chain{i}" for i in range(len(labs))]
    g.path([f"n{u}"] + spine + [f"n{v}"])
    for name, lab in zip(spine, labs):
        g.leaf(f"leaf_{lab}", lab)
        g.edge(name, f"leaf_{lab}")
    for t, lab in enumerate(tree.labels):
        g.leaf_label[f"n{tree.leaf_vertex[t]}"] = lab
    universe = sorted(list(tree.labels) + labs)
    return g.build(universe)


def hang_pendant_chain(tree: PhyloTree, slot_label: str, chain_labels,
                       reverse: bool = False) -> PhyloTree:
    """Replace a pendant leaf by a chain run ending in a member cherry.

    The last chain label sits nearest the attachment point and the first
    two form the cherry at the far extremity (reversed if requested).
    """
    labs = list(chain_labels)
    if reverse:
        labs.reverse()
    if len(labs) < 3:
        raise ValueError("need at least 3 chain taxa")
    g = TreeAssembler()
    for v, ns in enumerate(tree.adj):
        g.vertex(f"n{v}")
        for w in ns:
            if v < w:
                g.edge(f"n{v}", f"n{w}")
    slot = tree.leaf_vertex[tree.taxon_id(slot_label)]
    spine = [f"s{i}" for i in range(len(labs) - 2)]
    g.path([f"n{slot}"] + spine)
    g.leaf(f"leaf_{labs[-1]}", labs[-1])
    g.edge(f"n{slot}", f"leaf_{labs[-1]}")
    for i in range(len(spine) - 1):
        lab = labs[len(labs) - 2 - i]
        g.leaf(f"leaf_{lab}", lab)
        g.edge(spine[i], f"leaf_{lab}")
    for lab in (labs[0], labs[1]):
        g.leaf(f"leaf_{lab}", lab)
        g.edge(spine[-1], f"leaf_{lab}")
    for t, lab in enumerate(tree.labels):
        if lab != slot_label:
            g.leaf_label[f"n{tree.leaf_vertex[t]}"] = lab
    universe = sorted([lab for lab in tree.labels if lab != slot_label] + labs)
    return g.build(universe)


def find_chain_unsafety_witness(seed: int = 0, tries: int = 200,
                                chain_length: int = 5, base_n: int = 5):
    """Search generated pairs with a planted common chain where deleting one
    chain taxon strictly lowers the exact minimum forest size.

    The generator favors chains hung at a tree extremity with the terminal
    cherry at opposite chain ends in the two trees, where the effect lives.
    Returns (t1, t2, chain_labels, deleted_label, before, after) or None.
    """
    rng = random.Random(seed)
    base_labels = [f"g{i}" for i in range(1, base_n + 1)]
    chain_labels = tuple(f"c{i}" for i in range(1, chain_length + 1))

    def generate():
        if rng.random() < 0.8:
            base = random_tree(base_labels + ["X"], rng)
            return hang_pendant_chain(base, "X", chain_labels,
                                      reverse=rng.random() < 0.5)
        base = random_tree(base_labels, rng)
        return plant_common_chain(base, chain_labels,
                                  rng.randrange(2 * base_n - 3),
                                  reverse=rng.random() < 0.5)

    for _ in range(tries):
        t1 = generate()
        t2 = generate().with_universe(t1.labels)
        chain_ids = t1.ids_of(chain_labels)
        if not any(chain_ids <= chain for chain in find_common_chains(t1, t2)):
            continue
        before = mraf_exact(t1, t2).size
        if before < 3:
            continue
        for lab in chain_labels:
            keep = [x for x in t1.labels if x != lab]
            s1 = t1.restrict(t1.ids_of(keep))
            s2 = t2.restrict(t2.ids_of(keep))
            after = mraf_exact(s1, s2).size
            if after < before:
                return t1, t2, chain_labels, lab, before, after
    return None
