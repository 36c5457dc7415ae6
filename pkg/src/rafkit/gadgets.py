"""Instance generators: the permutation-reduction hardness gadget, the
family with constant relaxed forests but linearly growing agreement forests,
and the no-cherry-no-chain caterpillar family.

All generators assemble an explicit graph, contract the degree-2 path
vertices left over by the attachments, and return proper binary trees on a
shared, deterministically ordered universe.
"""

from __future__ import annotations

from dataclasses import dataclass

from .pims import DECREASING, INCREASING, MonotonePartition, check_permutation
from .raf import RafPartition, normalize_components
from .trees import PhyloTree, TreeAssembler


# -- hardness gadget -------------------------------------------------------------


@dataclass(frozen=True)
class HardnessInstance:
    """The tree pair encoding a permutation-partitioning instance."""

    t1: PhyloTree
    t2: PhyloTree
    perm: tuple
    alpha: int
    beta: int
    perm_taxa: frozenset
    side_caterpillars: dict  # name ("L3", "Rh1", ...) -> frozenset of taxa
    class_sets: dict  # the eight aggregated leaf classes -> frozenset

    @property
    def k(self) -> int:
        return self.alpha + self.beta


def _side_leaf(kind: str, i: int, j: int) -> str:
    return f"{kind}{i}_{j}"


def hardness_instance(perm, alpha: int, beta: int) -> HardnessInstance:
    """Build the tree pair whose k-component RAFs mirror partitions of the
    permutation into alpha increasing plus beta decreasing subsequences.

    The permutation's taxa sit on a central caterpillar (identity order in
    the first tree, permuted order in the second); 8k pendant caterpillars
    around it force each component to commit to one monotone direction.
    Leaf count is n + 8k^2.
    """
    values = check_permutation(perm)
    n = len(values)
    if alpha < 1 or beta < 1:
        raise ValueError("alpha and beta must be at least 1")
    k = alpha + beta
    if n >= 1 and k > max(2, 2 * int(n ** 0.5) + 1):
        raise ValueError("k exceeds the 2*sqrt(n) regime of the reduction")

    universe = [f"v{m}" for m in range(1, n + 1)]
    for kind, width in (("l", 2 * alpha), ("r", 2 * alpha),
                        ("lh", 2 * beta), ("rh", 2 * beta)):
        for i in range(1, 2 * k + 1):
            universe.extend(_side_leaf(kind, i, j) for j in range(1, width + 1))

    def assemble(second: bool) -> PhyloTree:
        g = TreeAssembler()
        # central spine: identity order in T1, permuted order in T2
        spine = [f"y{i}" for i in range(1, n + 1)]
        g.path(spine)
        for i in range(1, n + 1):
            m = values[i - 1] if second else i
            g.leaf(f"v{m}", f"v{m}")
            g.edge(f"y{i}", f"v{m}")
        # pendant caterpillars
        for i in range(1, 2 * k + 1):
            g.caterpillar([f"w{i}_{j}" for j in range(1, 2 * alpha + 1)],
                          [(f"l{i}_{j}", _side_leaf("l", i, j))
                           for j in range(1, 2 * alpha + 1)])
            g.caterpillar([f"z{i}_{j}" for j in range(1, 2 * alpha + 1)],
                          [(f"r{i}_{j}", _side_leaf("r", i, j))
                           for j in range(1, 2 * alpha + 1)])
            g.caterpillar([f"wh{i}_{j}" for j in range(1, 2 * beta + 1)],
                          [(f"lh{i}_{j}", _side_leaf("lh", i, j))
                           for j in range(1, 2 * beta + 1)])
            g.caterpillar([f"zh{i}_{j}" for j in range(1, 2 * beta + 1)],
                          [(f"rh{i}_{j}", _side_leaf("rh", i, j))
                           for j in range(1, 2 * beta + 1)])
        sh = [f"sh{i}" for i in range(1, 2 * k + 1)]
        s = [f"s{i}" for i in range(1, 2 * k + 1)]
        th = [f"th{i}" for i in range(1, 2 * k + 1)]
        t = [f"t{i}" for i in range(1, 2 * k + 1)]
        if not second:
            q_start = (sh[:k] + s[:k] + ["s*"]
                       + s[2 * k - 1:k - 1:-1] + sh[2 * k - 1:k - 1:-1])
            q_end = (th[k - 1::-1] + t[k - 1::-1] + ["t*"]
                     + t[k:2 * k] + th[k:2 * k])
        else:
            q_start = (s[:k] + sh[:k] + ["s*"]
                       + sh[2 * k - 1:k - 1:-1] + s[2 * k - 1:k - 1:-1])
            q_end = (t[k - 1::-1] + th[k - 1::-1] + ["t*"]
                     + th[k:2 * k] + t[k:2 * k])
        g.path(q_start)
        g.path(q_end)
        g.edge("s*", "y1")
        g.edge("t*", f"y{n}")
        if not second:
            for i in range(1, 2 * k + 1):
                g.edge(f"s{i}", f"w{i}_{2 * alpha}")
                g.edge(f"t{i}", f"z{i}_1")
                g.edge(f"sh{i}", f"wh{i}_{2 * beta}")
                g.edge(f"th{i}", f"zh{i}_1")
        else:
            for i in range(1, 2 * k + 1):
                g.edge(f"s{i}", f"w{i}_1")
                g.edge(f"t{i}", f"z{i}_{2 * alpha}")
            for i in range(1, k + 1):
                g.edge(f"sh{k - i + 1}", f"zh{i}_{2 * beta}")
                g.edge(f"sh{2 * k - i + 1}", f"zh{k + i}_{2 * beta}")
                g.edge(f"th{k - i + 1}", f"wh{i}_1")
                g.edge(f"th{2 * k - i + 1}", f"wh{k + i}_1")
        return g.build(universe)

    t1 = assemble(second=False)
    t2 = assemble(second=True)
    index = {lab: i for i, lab in enumerate(universe)}

    def group(kind, i, width):
        return frozenset(index[_side_leaf(kind, i, j)]
                         for j in range(1, width + 1))

    side = {}
    for i in range(1, 2 * k + 1):
        side[f"L{i}"] = group("l", i, 2 * alpha)
        side[f"R{i}"] = group("r", i, 2 * alpha)
        side[f"Lh{i}"] = group("lh", i, 2 * beta)
        side[f"Rh{i}"] = group("rh", i, 2 * beta)

    def aggregate(prefix, lo, hi):
        out = frozenset()
        for i in range(lo, hi + 1):
            out |= side[f"{prefix}{i}"]
        return out

    class_sets = {
        "L1": aggregate("L", 1, k), "L2": aggregate("L", k + 1, 2 * k),
        "R1": aggregate("R", 1, k), "R2": aggregate("R", k + 1, 2 * k),
        "Lh1": aggregate("Lh", 1, k), "Lh2": aggregate("Lh", k + 1, 2 * k),
        "Rh1": aggregate("Rh", 1, k), "Rh2": aggregate("Rh", k + 1, 2 * k),
    }
    perm_taxa = frozenset(index[f"v{m}"] for m in range(1, n + 1))
    return HardnessInstance(t1, t2, values, alpha, beta, perm_taxa, side,
                            class_sets)


def pims_solution_to_raf_gadget(inst: HardnessInstance,
                                partition: MonotonePartition) -> RafPartition:
    """Map a monotone partition onto a k-component RAF of the gadget pair.

    The i-th increasing class takes the leaf pair (2i-1, 2i) from every
    unhatted pendant caterpillar, the i-th decreasing class the same pair
    from every hatted one; classes may be empty, so the output always has
    exactly alpha + beta components of at least 8k side taxa each.
    """
    values = inst.perm
    index = {lab: i for i, lab in enumerate(inst.t1.labels)}
    inc, dec = [], []
    flexible = []
    for direction, positions in partition.classes:
        if len(positions) <= 1:
            flexible.append(positions)
        elif direction == INCREASING:
            inc.append(positions)
        else:
            dec.append(positions)
    for positions in flexible:
        (inc if len(inc) < inst.alpha else dec).append(positions)
    if len(inc) > inst.alpha or len(dec) > inst.beta:
        raise ValueError("class counts exceed (alpha, beta)")
    inc += [()] * (inst.alpha - len(inc))
    dec += [()] * (inst.beta - len(dec))

    k = inst.k
    comps = []
    for i, positions in enumerate(inc, start=1):
        taxa = {index[f"v{values[p]}"] for p in positions}
        for j in range(1, 2 * k + 1):
            taxa.update(index[_side_leaf(kind, j, jj)]
                        for kind in ("l", "r")
                        for jj in (2 * i - 1, 2 * i))
        comps.append(frozenset(taxa))
    for i, positions in enumerate(dec, start=1):
        taxa = {index[f"v{values[p]}"] for p in positions}
        for j in range(1, 2 * k + 1):
            taxa.update(index[_side_leaf(kind, j, jj)]
                        for kind in ("lh", "rh")
                        for jj in (2 * i - 1, 2 * i))
        comps.append(frozenset(taxa))
    return RafPartition(tuple(comps))


def check_structural_lemmas(inst: HardnessInstance,
                            partition: RafPartition) -> list:
    """Assert the two structural facts every valid gadget RAF satisfies.

    (a) a component with three or more leaves of one pendant caterpillar
    contains nothing else; (b) no component meets five of the eight
    aggregated leaf classes.  Violations indicate a solver or construction
    bug; the returned list is empty when all checks pass.
    """
    violations = []
    for ci, comp in enumerate(partition.components):
        for name, leaves in inst.side_caterpillars.items():
            inside = comp & leaves
            if len(inside) >= 3 and comp - leaves:
                violations.append(
                    f"component {ci} has {len(inside)} leaves of {name} "
                    f"plus outside taxa")
        met = [name for name, cls in inst.class_sets.items() if comp & cls]
        if len(met) >= 5:
            violations.append(
                f"component {ci} meets {len(met)} leaf classes: {met}")
    return violations


# -- unbounded MAF family ---------------------------------------------------------


def unbounded_maf_instance(base: PhyloTree):
    """Replace every leaf of the base tree by a four-taxon block whose
    cherry pairing differs between the two outputs: the relaxed forest stays
    at two components while any agreement forest needs one per block.
    """
    if base.n < 2:
        raise ValueError("base tree needs at least 2 taxa")
    universe = []
    for lab in base.labels:
        universe.extend(f"{prefix}_{lab}" for prefix in "abcd")

    def expand(pairing) -> PhyloTree:
        g = TreeAssembler()
        for v in range(len(base.adj)):
            g.vertex(f"n{v}")
        for v in range(len(base.adj)):
            for w in base.adj[v]:
                if v < w:
                    g.edge(f"n{v}", f"n{w}")
        for t, lab in enumerate(base.labels):
            hub = f"n{base.leaf_vertex[t]}"
            (p1, p2), (p3, p4) = pairing
            g.edge(hub, f"c1_{lab}")
            g.edge(hub, f"c2_{lab}")
            for cherry, members in ((f"c1_{lab}", (p1, p2)),
                                    (f"c2_{lab}", (p3, p4))):
                for prefix in members:
                    name = f"{prefix}_{lab}"
                    g.leaf(name, name)
                    g.edge(cherry, name)
        return g.build(universe)

    t1 = expand((("a", "b"), ("c", "d")))
    t2 = expand((("a", "c"), ("b", "d")))
    return t1, t2


def unbounded_maf_witness(t1: PhyloTree) -> RafPartition:
    """The two-component RAF: all a/b taxa versus all c/d taxa."""
    ab = frozenset(i for i, lab in enumerate(t1.labels) if lab[0] in "ab")
    cd = frozenset(i for i, lab in enumerate(t1.labels) if lab[0] in "cd")
    return RafPartition(normalize_components((ab, cd)))


# -- no common cherry, no common chain family --------------------------------------


def _letter(i: int, m: int) -> str:
    if m <= 26:
        return chr(ord("a") + i)
    return f"a{i + 1}"


def nochain_caterpillar_family(m: int):
    """Two caterpillars interleaving shared integers with letters in opposite
    sweeps: no common cherries or chains, yet the relaxed forest has just
    two components however large m grows.
    """
    if m < 2:
        raise ValueError("family needs m >= 2")
    letters = [_letter(i, m) for i in range(m)]
    seq1 = []
    seq2 = []
    for i in range(m):
        seq1.extend([str(i + 1), letters[m - 1 - i]])
        seq2.extend([str(i + 1), letters[i]])
    from .trees import _caterpillar_from_sequence

    return (_caterpillar_from_sequence(seq1),
            _caterpillar_from_sequence(seq2))


def nochain_witness(t1: PhyloTree) -> RafPartition:
    """The integers-versus-letters two-component RAF."""
    ints = frozenset(i for i, lab in enumerate(t1.labels) if lab.isdigit())
    rest = frozenset(range(t1.n)) - ints
    return RafPartition(normalize_components((ints, rest)))
