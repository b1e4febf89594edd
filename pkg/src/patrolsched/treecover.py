"""Min-max tree covers: split a point set into <= k cheap connected trees.

The goal is k subtrees that together touch every point of a subset while the
most expensive subtree is as cheap as possible.  ``try_budget`` tests one
candidate budget B: it drops every edge longer than B, builds the minimum
spanning forest of what remains, and chops each component MST into edge-
disjoint pieces — at most one piece lighter than 2B per component, all other
pieces weighing in [2B, 4B).  If the pieces fit into k trees the budget is
feasible.  ``minmax_tree_cover`` then binary-searches the smallest feasible
budget; every tree it returns costs at most 4*(1+eps) times the optimal
min-max tree cost.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence

from .instance import Instance
from .mst import Tree, UnionFind, _kruskal, _normalize_subset, _subset_edges


@dataclass(frozen=True)
class TreeCover:
    """Trees covering a subset; every tree costs at most ``4 * budget_used``."""

    trees: tuple[Tree, ...]
    budget_used: float
    k: int

    @property
    def max_cost(self) -> float:
        return max(t.cost for t in self.trees)


def _tree_from_edges(edges: list[tuple[int, int, float]]) -> Tree:
    verts = sorted({v for u, w, _ in edges for v in (u, w)})
    pairs = tuple(sorted((min(u, v), max(u, v)) for u, v, _ in edges))
    return Tree(vertices=tuple(verts), edges=pairs, cost=float(sum(w for _, _, w in edges)))


def decompose_tree(inst: Instance, tree: Tree, budget: float) -> list[Tree]:
    """Split a tree whose edges are all <= budget into edge-disjoint subtrees.

    At most one piece costs less than 2*budget; every other piece costs in
    [2*budget, 4*budget).  Pieces are grown bottom-up from the lowest-index
    root: each child subtree hands its leftover edges (cost < 2B) to its
    parent, and whenever the accumulated bundle at a vertex reaches 2B it is
    emitted as one connected piece.  A bundle never exceeds 4B because each
    increment is itself below 3B (leftover < 2B plus one edge <= B) and is
    emitted on its own when it reaches 2B.
    """
    if budget <= 0.0:
        raise ValueError(f"budget must be positive, got {budget!r}")
    dist = inst.dist
    for u, v in tree.edges:
        if dist[u, v] > budget:
            raise ValueError(
                f"tree edge ({u}, {v}) has length {dist[u, v]!r} > budget {budget!r}")
    target = 2.0 * budget
    if tree.cost < target:
        return [tree]

    adj: dict[int, list[int]] = {v: [] for v in tree.vertices}
    for u, v in tree.edges:
        adj[u].append(v)
        adj[v].append(u)
    for v in adj:
        adj[v].sort()
    root = min(tree.vertices)

    pieces: list[list[tuple[int, int, float]]] = []

    # Iterative version of: for each child c of v, take the child's leftover
    # bundle, add edge (v, c); emit it alone if it already weighs >= 2B, else
    # fold it into v's bundle, emitting that when it reaches 2B.
    # Frame: [vertex, parent, child iterator, bundle edges, bundle cost, pending child]
    frames: list[list] = [[root, -1, iter(adj[root]), [], 0.0, -1]]
    ret: tuple[list[tuple[int, int, float]], float] | None = None
    while frames:
        fr = frames[-1]
        if ret is not None:
            sub_edges, sub_cost = ret
            ret = None
            c = fr[5]
            w = float(dist[fr[0], c])
            sub_edges.append((fr[0], c, w))
            sub_cost += w
            if sub_cost >= target:
                pieces.append(sub_edges)  # in [2B, 3B)
            else:
                fr[3].extend(sub_edges)
                fr[4] += sub_cost
                if fr[4] >= target:
                    pieces.append(fr[3])  # in [2B, 4B)
                    fr[3], fr[4] = [], 0.0
        descended = False
        for c in fr[2]:
            if c != fr[1]:
                fr[5] = c
                frames.append([c, fr[0], iter(adj[c]), [], 0.0, -1])
                descended = True
                break
        if not descended:
            ret = (fr[3], fr[4])
            frames.pop()

    assert ret is not None
    leftover_edges, _ = ret
    if leftover_edges:
        pieces.append(leftover_edges)  # < 2B
    return [_tree_from_edges(e) for e in pieces]


def _forest_at_budget(
    us: list[int], vs: list[int], ws: list[float], budget: float,
    verts: Sequence[int],
) -> list[tuple[tuple[int, ...], list[tuple[int, int, float]], float]]:
    """Per-component (vertices, MST edges, MST cost) after dropping edges > budget."""
    limit = bisect_right(ws, budget)
    accepted = _kruskal(us, vs, ws, limit, verts)
    uf = UnionFind(verts)
    for u, v, _ in accepted:
        uf.union(u, v)
    comp_verts: dict[int, list[int]] = {}
    for v in verts:
        comp_verts.setdefault(uf.find(v), []).append(v)
    comp_edges: dict[int, list[tuple[int, int, float]]] = {r: [] for r in comp_verts}
    for u, v, w in accepted:
        comp_edges[uf.find(u)].append((u, v, w))
    out = []
    for root in sorted(comp_verts, key=lambda r: min(comp_verts[r])):
        edges = comp_edges[root]
        out.append((tuple(sorted(comp_verts[root])), edges,
                    float(sum(w for _, _, w in edges))))
    return out


def _try_budget_presorted(
    inst: Instance, us: list[int], vs: list[int], ws: list[float],
    verts: Sequence[int], k: int, budget: float,
) -> TreeCover | None:
    comps = _forest_at_budget(us, vs, ws, budget, verts)
    needed = 0
    for _, _, cost in comps:
        needed += math.floor(cost / (2.0 * budget)) + 1
        if needed > k:
            return None
    trees: list[Tree] = []
    for comp_vs, edges, cost in comps:
        if not edges:
            trees.append(Tree(vertices=comp_vs, edges=(), cost=0.0))
        else:
            comp_tree = _tree_from_edges(edges)
            trees.extend(decompose_tree(inst, comp_tree, budget))
    return TreeCover(trees=tuple(trees), budget_used=float(budget), k=k)


def try_budget(inst: Instance, subset: Sequence[int] | None, k: int, budget: float) -> TreeCover | None:
    """Tree cover of ``subset`` under a fixed budget, or None if infeasible.

    Feasibility: after dropping edges longer than ``budget``, each component's
    MST of cost c supports floor(c / (2*budget)) + 1 pieces; the budget fails
    when those counts sum past ``k``.  Feasibility is monotone in the budget.
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if budget <= 0.0:
        raise ValueError(f"budget must be positive, got {budget!r}")
    verts = _normalize_subset(inst, subset)
    if len(verts) == 1:
        return TreeCover(trees=(Tree(verts, (), 0.0),), budget_used=float(budget), k=k)
    us, vs, ws = _subset_edges(inst, verts)
    return _try_budget_presorted(inst, us, vs, ws, verts, k, budget)


def minmax_tree_cover(inst: Instance, subset: Sequence[int] | None, k: int,
                      eps: float = 1e-6) -> TreeCover:
    """Cover ``subset`` with <= k trees, max tree cost <= 4*(1+eps)*optimum.

    Binary search over the budget on [min distance / 2, MST cost] down to
    relative precision ``eps``; the budget range's upper end is always
    feasible, so a cover always exists.  After the search the budget is
    snapped down to the smallest feasible critical value (an edge length or a
    component-MST fraction) inside the final bracket, which makes small
    hand-traceable cases exact.
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    verts = _normalize_subset(inst, subset)
    if len(verts) == 1:
        return TreeCover(trees=(Tree(verts, (), 0.0),), budget_used=0.0, k=k)

    us, vs, ws = _subset_edges(inst, verts)

    def probe(budget: float) -> TreeCover | None:
        return _try_budget_presorted(inst, us, vs, ws, verts, k, budget)

    lo = ws[0] / 2.0  # below this every edge is dropped: n singletons
    cover = probe(lo)
    if cover is not None:
        return cover
    mst_cost = sum(w for _, _, w in _kruskal(us, vs, ws, len(ws), verts))
    hi = max(mst_cost, ws[-1])  # keeps every edge light even under triangle slack
    best = probe(hi)
    if best is None:  # cannot happen: a single-piece cover always fits k >= 1
        raise RuntimeError("tree cover search failed at its upper budget bound")

    while hi - lo > eps * lo:
        mid = 0.5 * (lo + hi)
        attempt = probe(mid)
        if attempt is None:
            lo = mid
        else:
            hi, best = mid, attempt

    # Snap to the smallest feasible critical budget in (lo, hi]: feasibility
    # only changes where the dropped-edge set changes (an edge length) or
    # where some floor(cost / 2B) changes (cost / (2m)).
    cands = {w for w in ws if lo < w <= hi}
    for _, _, cost in _forest_at_budget(us, vs, ws, hi, verts):
        if cost <= 0.0:
            continue
        m_lo = max(1, math.ceil(cost / (2.0 * hi)))
        m_hi = math.floor(cost / (2.0 * lo)) if lo > 0 else m_lo + 4
        for m in range(m_lo, min(m_hi, m_lo + 64) + 1):
            b = cost / (2.0 * m)
            if lo < b <= hi:
                cands.add(b)
    for b in sorted(cands):
        if b == hi:
            break
        attempt = probe(b)
        if attempt is not None:
            return attempt
    return best
