"""Exact desk-scale references: TSP, best weighted schedule, best tree cover.

These oracles are deliberately small-bounded brute force / dynamic programs.
They exist to certify the fast algorithms: every value they return is exact
for the search space stated in its ``search_bound``, and the planner and tree
cover are tested against them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .instance import Instance
from .mst import minimum_spanning_tree, _normalize_subset
from .schedule import Schedule, UNBOUNDED, _cost_of_gaps, _validate_p

HELD_KARP_MAX = 16
BRUTE_FORCE_MAX_POINTS = 6
BRUTE_FORCE_MAX_PERIOD = 10
PARTITION_MAX_POINTS = 10
PARTITION_MAX_PARTS = 4


@dataclass(frozen=True)
class OracleResult:
    """Exact value, a witness achieving it, and the search space searched."""

    value: float
    witness: Any
    search_bound: dict[str, Any]


def _held_karp_value(dist: np.ndarray) -> tuple[float, list[int]]:
    """Cheapest closed tour visiting every point of ``dist`` exactly once.

    Bitmask DP over (visited set, last point), vectorized over the last
    point; ties in the reconstruction resolve to the lowest index.  Returns
    (cost, order) with the order starting at local index 0.
    """
    m = dist.shape[0]
    if m == 1:
        return 0.0, [0]
    full = (1 << m) - 1
    dp = np.full((full + 1, m), np.inf)
    dp[1, 0] = 0.0

    masks = np.arange(full + 1, dtype=np.int64)
    popcnt = np.zeros(full + 1, dtype=np.int8)
    for b in range(m):
        popcnt += ((masks >> b) & 1).astype(np.int8)

    for c in range(2, m + 1):
        layer = masks[(popcnt == c) & ((masks & 1) == 1)]
        if layer.size == 0:
            continue
        for j in range(1, m):
            bit = 1 << j
            sel = layer[(layer & bit) != 0]
            if sel.size == 0:
                continue
            prev = sel ^ bit
            dp[sel, j] = np.min(dp[prev] + dist[:, j], axis=1)

    closing = dp[full] + dist[:, 0]
    closing[0] = np.inf
    j = int(np.argmin(closing))
    value = float(closing[j])

    order = [j]
    mask = full
    while mask != (1 | (1 << j)) and j != 0:
        prev = mask ^ (1 << j)
        cand = dp[prev] + dist[:, j]
        j = int(np.argmin(cand))
        mask = prev
        order.append(j)
    if order[-1] != 0:
        order.append(0)
    order.reverse()
    return value, order


def held_karp_tsp(inst: Instance, subset: Sequence[int] | None = None) -> OracleResult:
    """Exact TSP over ``subset`` (at most 16 points).

    Fewer than two points trivially cost 0.  The witness is a Schedule
    visiting each subset point exactly once.
    """
    verts = _normalize_subset(inst, subset)
    m = len(verts)
    if m > HELD_KARP_MAX:
        raise ValueError(f"exact TSP is limited to {HELD_KARP_MAX} points, got {m}")
    bound = {"method": "held-karp", "points": m}
    if m == 1:
        return OracleResult(0.0, Schedule((verts[0],)), bound)
    sub = inst.dist[np.ix_(verts, verts)]
    value, order = _held_karp_value(sub)
    return OracleResult(value, Schedule(tuple(verts[i] for i in order)), bound)


def brute_force_weighted_opt(inst: Instance, p: float, max_period: int) -> OracleResult:
    """Best weighted objective over all short cyclic visit sequences.

    Enumerates every sequence of length n..max_period that starts at point 0
    (rotations are equivalent), has no immediate repeats, and visits every
    point, and minimizes ``weighted_objective`` at order ``p``.  This is an
    upper bound on the true optimum — longer periods could do better — which
    ``search_bound`` records.
    """
    p = _validate_p(p)
    n = inst.n
    if n > BRUTE_FORCE_MAX_POINTS:
        raise ValueError(
            f"brute force is limited to {BRUTE_FORCE_MAX_POINTS} points, got {n}")
    if max_period > BRUTE_FORCE_MAX_PERIOD:
        raise ValueError(
            f"brute force is limited to period {BRUTE_FORCE_MAX_PERIOD}, got {max_period}")
    if max_period < n:
        raise ValueError(f"max_period {max_period} cannot cover all {n} points")
    bound = {"method": "exhaustive", "max_period": max_period,
             "upper_bound_only": True}
    if n == 1:
        return OracleResult(0.0, Schedule((0,)), bound)

    dist = inst.dist.tolist()
    weights = inst.weights.tolist()
    is_inf = math.isinf(p)
    best = math.inf
    best_seq: tuple[int, ...] | None = None

    def evaluate(seq: list[int]) -> float:
        length = len(seq)
        cum = [0.0] * length
        acc = 0.0
        for i in range(1, length):
            acc += dist[seq[i - 1]][seq[i]]
            cum[i] = acc
        period = acc + dist[seq[-1]][seq[0]]
        worst = 0.0
        for x in range(n):
            ts = [cum[i] for i in range(length) if seq[i] == x]
            gaps = [b - a for a, b in zip(ts, ts[1:])]
            gaps.append(period - ts[-1] + ts[0])
            if is_inf:
                c = max(gaps)
            else:
                c = _cost_of_gaps(gaps, p)
            wc = weights[x] * c
            if wc > worst:
                worst = wc
        return worst

    seq = [0]

    def extend(seen_mask: int, nseen: int, length: int) -> None:
        nonlocal best, best_seq
        if length == target_len:
            if nseen == n and seq[-1] != 0:
                value = evaluate(seq)
                if value < best:
                    best = value
                    best_seq = tuple(seq)
            return
        if n - nseen > target_len - length:
            return  # not enough slots left to visit every point
        last = seq[-1]
        for v in range(n):
            if v == last:
                continue
            bit = 1 << v
            seq.append(v)
            extend(seen_mask | bit, nseen + (0 if seen_mask & bit else 1), length + 1)
            seq.pop()

    for target_len in range(n, max_period + 1):
        extend(1, 1, 1)

    assert best_seq is not None
    return OracleResult(float(best), Schedule(best_seq), bound)


def _partitions_upto(items: tuple[int, ...], max_parts: int):
    """All set partitions of ``items`` into at most ``max_parts`` blocks.

    Canonical enumeration: each item joins an existing block or opens the
    next one (restricted growth), so no partition appears twice.
    """
    parts: list[list[int]] = []

    def rec(i: int):
        if i == len(items):
            yield tuple(tuple(p) for p in parts)
            return
        x = items[i]
        for p in parts:
            p.append(x)
            yield from rec(i + 1)
            p.pop()
        if len(parts) < max_parts:
            parts.append([x])
            yield from rec(i + 1)
            parts.pop()

    yield from rec(0)


def partition_tree_cover_oracle(inst: Instance, subset: Sequence[int] | None,
                                k: int) -> OracleResult:
    """Exact min-max tree cover value by enumerating all vertex partitions.

    For every partition of the subset into at most k blocks, the cheapest
    way to connect each block is its MST; the oracle minimizes the maximum
    block MST cost.  The witness is the minimizing partition.
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    verts = _normalize_subset(inst, subset)
    m = len(verts)
    if m > PARTITION_MAX_POINTS:
        raise ValueError(
            f"partition oracle is limited to {PARTITION_MAX_POINTS} points, got {m}")
    if k > PARTITION_MAX_PARTS:
        raise ValueError(
            f"partition oracle is limited to {PARTITION_MAX_PARTS} parts, got {k}")

    mst_cache: dict[tuple[int, ...], float] = {}

    def block_cost(block: tuple[int, ...]) -> float:
        c = mst_cache.get(block)
        if c is None:
            c = minimum_spanning_tree(inst, block).cost
            mst_cache[block] = c
        return c

    best = math.inf
    best_partition: tuple[tuple[int, ...], ...] | None = None
    for partition in _partitions_upto(verts, k):
        worst = 0.0
        for block in partition:
            c = block_cost(block)
            if c > worst:
                worst = c
            if worst >= best:
                break
        if worst < best:
            best = worst
            best_partition = partition
    assert best_partition is not None
    return OracleResult(float(best), best_partition,
                        {"method": "set-partitions", "points": m, "parts": k})


def _tsp_or_mst_cost(inst: Instance, verts: tuple[int, ...]) -> float:
    """Exact TSP cost when small enough, else the (never larger) MST cost."""
    if len(verts) <= HELD_KARP_MAX:
        if len(verts) < 2:
            return 0.0
        value, _ = _held_karp_value(inst.dist[np.ix_(verts, verts)])
        return value
    return minimum_spanning_tree(inst, verts).cost


def lower_bound(inst: Instance) -> float:
    """Certified lower bound on the best achievable weighted max-absence.

    Two families of bounds, maximized jointly:

    * for every weight level w, any schedule leaves some point of weight
      >= w unvisited for at least the tour cost of all such points, so
      ``w * TSP({x : weight(x) >= w})`` is a bound (MST substitutes for TSP
      above 16 points; it is never larger, so validity is preserved);
    * the full distance between any two points (some weight-1 point must
      keep returning to both sides).
    """
    n = inst.n
    best = float(np.max(inst.dist)) if n > 1 else 0.0
    weights = inst.weights
    for w in sorted(set(weights.tolist()), reverse=True):
        verts = tuple(int(i) for i in np.flatnonzero(weights >= w))
        best = max(best, w * _tsp_or_mst_cost(inst, verts))
    return float(best)
