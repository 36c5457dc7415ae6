"""Partitioning a permutation into a minimum number of monotone subsequences.

Permutations are tuples of the values 1..n; positions are 0-indexed.  A
monotone class is a set of positions whose values, read in position order,
are strictly increasing or strictly decreasing.
"""

from __future__ import annotations

import random
import time
from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache
from math import ceil, isqrt

from .raf import SolverTimeout

INCREASING = "increasing"
DECREASING = "decreasing"


@dataclass(frozen=True)
class MonotonePartition:
    """Classes of positions, each strictly monotone in its stated direction."""

    classes: tuple  # tuple[(direction, tuple[int positions]), ...]

    @property
    def size(self) -> int:
        return len(self.classes)

    def positions(self) -> frozenset:
        return frozenset(p for _, ps in self.classes for p in ps)


def check_permutation(perm) -> tuple:
    values = tuple(perm)
    if sorted(values) != list(range(1, len(values) + 1)):
        raise ValueError("not a permutation of 1..n")
    return values


def class_direction(values) -> str | None:
    """Direction of a distinct-value sequence, None if not monotone.

    Sequences of length <= 1 count as increasing by convention.
    """
    if len(values) <= 1:
        return INCREASING
    if all(a < b for a, b in zip(values, values[1:])):
        return INCREASING
    if all(a > b for a, b in zip(values, values[1:])):
        return DECREASING
    return None


def check_monotone_partition(perm, partition: MonotonePartition) -> bool:
    """Classes partition all positions and match their stated directions."""
    values = tuple(perm)
    seen = set()
    for direction, positions in partition.classes:
        ps = list(positions)
        if ps != sorted(ps) or set(ps) & seen:
            return False
        seen.update(ps)
        vals = [values[p] for p in ps]
        actual = class_direction(vals)
        if actual is None:
            return False
        if len(vals) > 1 and actual != direction:
            return False
    return seen == set(range(len(values)))


def _lis_positions(values) -> tuple:
    """Longest strictly increasing subsequence via patience sorting."""
    tail_vals = []
    tail_pos = []
    prev = [-1] * len(values)
    for i, v in enumerate(values):
        j = bisect_left(tail_vals, v)
        if j == len(tail_vals):
            tail_vals.append(v)
            tail_pos.append(i)
        else:
            tail_vals[j] = v
            tail_pos[j] = i
        prev[i] = tail_pos[j - 1] if j > 0 else -1
    if not tail_pos:
        return ()
    out = []
    i = tail_pos[-1]
    while i >= 0:
        out.append(i)
        i = prev[i]
    return tuple(reversed(out))


def lis(perm) -> tuple:
    """Positions of a longest increasing subsequence."""
    return _lis_positions(tuple(perm))


def lds(perm) -> tuple:
    """Positions of a longest decreasing subsequence."""
    return _lis_positions(tuple(-v for v in perm))


def erdos_szekeres_partition(perm) -> MonotonePartition:
    """Strip the longer of LIS/LDS until empty: at most ~2*sqrt(n) classes."""
    values = check_permutation(perm)
    return MonotonePartition(tuple(_strip_monotone(range(len(values)), values)))


def _strip_monotone(positions, values):
    """Greedy monotone stripping of an arbitrary distinct-value subsequence."""
    remaining = list(positions)
    vals = list(values)
    classes = []
    while remaining:
        inc = _lis_positions(vals)
        dec = _lis_positions([-v for v in vals])
        if len(inc) >= len(dec):
            direction, chosen = INCREASING, inc
        else:
            direction, chosen = DECREASING, dec
        classes.append((direction, tuple(remaining[i] for i in chosen)))
        chosen_set = set(chosen)
        remaining = [p for i, p in enumerate(remaining) if i not in chosen_set]
        vals = [v for i, v in enumerate(vals) if i not in chosen_set]
    return classes


def es_class_bound(n: int) -> int:
    """The guaranteed class-count bound of the stripping heuristic."""
    return ceil(2 * n ** 0.5)


@lru_cache(maxsize=8)
def _set_partitions(n: int) -> tuple:
    """All set partitions of range(n) as block tuples, fewest blocks first."""
    if n > 10:
        raise ValueError("partition enumeration is guarded to n <= 10")
    parts = []

    def rec(i, blocks):
        if i == n:
            parts.append(tuple(tuple(b) for b in blocks))
            return
        for b in blocks:
            b.append(i)
            rec(i + 1, blocks)
            b.pop()
        blocks.append([i])
        rec(i + 1, blocks)
        blocks.pop()

    rec(0, [])
    parts.sort(key=len)
    return tuple(parts)


def pims_bruteforce(perm) -> MonotonePartition:
    """Minimum monotone partition by exhaustive set-partition enumeration."""
    values = check_permutation(perm)
    n = len(values)
    if n > 7:
        raise ValueError("pims_bruteforce is guarded to n <= 7")
    if n == 0:
        return MonotonePartition(())
    for blocks in _set_partitions(n):
        classes = []
        for block in blocks:
            vals = [values[p] for p in block]
            direction = class_direction(vals)
            if direction is None:
                break
            classes.append((direction, block))
        else:
            return MonotonePartition(tuple(classes))
    raise AssertionError("singletons always form a monotone partition")


def pims_exact(perm, budget: float | None = None) -> MonotonePartition:
    """Minimum monotone partition by iterative-deepening branch and bound.

    Positions are assigned in order; a class accepts a value only while it
    stays strictly monotone, and a fresh class may be opened only when all
    earlier classes are in use.  The Erdos-Szekeres stripping seeds the
    upper bound.
    """
    values = check_permutation(perm)
    n = len(values)
    if n > 20:
        raise ValueError("pims_exact is guarded to n <= 20")
    if n == 0:
        return MonotonePartition(())
    seed = erdos_szekeres_partition(values)
    deadline = time.monotonic() + budget if budget is not None else None
    nodes = [0]

    def decide(k):
        # class state: [last_value, direction(None until two members), positions]
        classes = []

        def rec(i):
            nodes[0] += 1
            if deadline is not None and nodes[0] & 1023 == 0 \
                    and time.monotonic() > deadline:
                raise SolverTimeout
            if i == n:
                return True
            v = values[i]
            for cls in classes:
                last, direction, ps = cls
                if direction is INCREASING and v < last:
                    continue
                if direction is DECREASING and v > last:
                    continue
                cls[0] = v
                cls[1] = direction if direction else (
                    INCREASING if v > last else DECREASING)
                ps.append(i)
                if rec(i + 1):
                    return True
                ps.pop()
                cls[0], cls[1] = last, direction
            if len(classes) < k:
                classes.append([v, None, [i]])
                if rec(i + 1):
                    return True
                classes.pop()
            return False

        if rec(0):
            return [(c[1] or INCREASING, tuple(c[2])) for c in classes]
        return None

    for k in range(1, seed.size):
        found = decide(k)
        if found is not None:
            return MonotonePartition(tuple(found))
    return seed


def random_permutation(n: int, rng: random.Random) -> tuple:
    values = list(range(1, n + 1))
    rng.shuffle(values)
    return tuple(values)


def erdos_szekeres_floor(n: int) -> int:
    """Guaranteed length of the longest monotone run: ceil(sqrt(n))."""
    r = isqrt(n)
    return r if r * r == n else r + 1
