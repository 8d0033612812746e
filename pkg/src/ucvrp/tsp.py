"""Exact and 2-approximate TSP tours on customer subsets, plus
shortcutting of closed walks.

The exact solver is a Held-Karp subset dynamic program capped at 18
customers (override via the UCVRP_HELDKARP_CAP environment variable).
The approximate solver doubles a minimum spanning tree and shortcuts the
resulting Euler walk, guaranteeing cost at most twice the optimum.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

from ucvrp.instance import Instance

COST_TOL = 1e-9


class SubsetTooLarge(ValueError):
    pass


class KeepNotVisited(ValueError):
    def __init__(self, v: int):
        self.customer = v
        super().__init__(f"vertex {v} requested but not visited by the walk")


def heldkarp_cap() -> int:
    return int(os.environ.get("UCVRP_HELDKARP_CAP", "18"))


@dataclass(frozen=True)
class Tour:
    """A depot-rooted cycle: vertices[0] == vertices[-1] == 0."""

    vertices: tuple[int, ...]
    cost: float
    quality_tag: str  # exact | two_approx | external

    @property
    def customers(self) -> frozenset[int]:
        return frozenset(self.vertices[1:-1])

    def recompute_cost(self, inst: Instance) -> float:
        return inst.route_cost(self.vertices)


def empty_tour(tag: str = "exact") -> Tour:
    return Tour((0, 0), 0.0, tag)


def exact_tsp(inst: Instance, subset: Iterable[int]) -> Tour:
    """Minimum-cost tour through the depot and every vertex of ``subset``.

    Ties are broken toward the lexicographically smallest vertex sequence
    (comparing the tour against its reversal as well) so results are
    reproducible across runs.
    """
    subset = sorted(set(subset))
    if not subset:
        return empty_tour()
    cap = heldkarp_cap()
    if len(subset) > cap:
        raise SubsetTooLarge(f"{len(subset)} customers exceeds cap {cap}")
    if len(subset) == 1:
        v = subset[0]
        return Tour((0, v, 0), 2.0 * inst.depot_cost(v), "exact")

    m = inst.metric
    s = len(subset)
    full = (1 << s) - 1
    INF = float("inf")
    # dp[mask][i]: cheapest path depot -> ... -> subset[i] covering mask.
    dp = [[INF] * s for _ in range(full + 1)]
    for i in range(s):
        dp[1 << i][i] = float(m[0, subset[i]])
    for mask in range(1, full + 1):
        row = dp[mask]
        for i in range(s):
            cur = row[i]
            if cur == INF or not (mask >> i) & 1:
                continue
            vi = subset[i]
            for j in range(s):
                if (mask >> j) & 1:
                    continue
                nmask = mask | (1 << j)
                cand = cur + float(m[vi, subset[j]])
                if cand < dp[nmask][j]:
                    dp[nmask][j] = cand
    best = min(dp[full][i] + float(m[subset[i], 0]) for i in range(s))

    def finish_cost(rest: int, v: int) -> float:
        # Cheapest path v -> (all of rest) -> depot.  By symmetry of c this
        # is the reversal of a depot-rooted path ending at some i in rest.
        if not rest:
            return float(m[v, 0])
        return min(
            dp[rest][i] + float(m[subset[i], v])
            for i in range(s)
            if (rest >> i) & 1
        )

    # Greedy front-to-back reconstruction, scanning candidates in ascending
    # vertex order, yields the lexicographically smallest optimal sequence.
    seq = [0]
    mask, last, target = full, 0, best
    while mask:
        for j in range(s):
            if not (mask >> j) & 1:
                continue
            step = float(m[last, subset[j]])
            if step + finish_cost(mask ^ (1 << j), subset[j]) <= target + COST_TOL:
                seq.append(subset[j])
                target -= step
                last = subset[j]
                mask ^= 1 << j
                break
        else:
            raise AssertionError("tour reconstruction failed")
    seq.append(0)
    return Tour(tuple(seq), best, "exact")


def approx_tsp(inst: Instance, subset: Iterable[int]) -> Tour:
    """MST-doubling tour: cost at most twice the optimal tour cost."""
    subset = sorted(set(subset))
    if not subset:
        return empty_tour("two_approx")
    m = inst.metric
    nodes = [0] + subset
    # Prim with deterministic tie-break by vertex index.
    in_tree = {0}
    children: dict[int, list[int]] = {v: [] for v in nodes}
    best_edge = {v: (float(m[0, v]), 0) for v in subset}
    while len(in_tree) < len(nodes):
        v = min(
            (u for u in subset if u not in in_tree),
            key=lambda u: (best_edge[u][0], u),
        )
        w = best_edge[v][1]
        children[w].append(v)
        in_tree.add(v)
        for u in subset:
            if u not in in_tree and float(m[v, u]) < best_edge[u][0]:
                best_edge[u] = (float(m[v, u]), v)
    # Preorder walk of the tree == shortcut of the doubled Euler tour.
    order = []
    stack = [0]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(sorted(children[v], reverse=True))
    seq = tuple(order) + (0,)
    return Tour(seq, inst.route_cost(seq), "two_approx")


def shortcut(inst: Instance, walk: Sequence[int], keep: Iterable[int]) -> Tour:
    """Shortcut a closed depot-rooted walk down to ``keep``.

    The kept customers are visited in order of first appearance; by the
    triangle inequality the cost never exceeds the walk's cost.
    """
    if walk[0] != 0 or walk[-1] != 0:
        raise ValueError("walk must start and end at the depot")
    visited = set(walk)
    keep = set(keep)
    for v in keep:
        if v not in visited and v != 0:
            raise KeepNotVisited(v)
    seq = [0]
    seen = set()
    for v in walk:
        if v in keep and v not in seen:
            seen.add(v)
            seq.append(v)
    seq.append(0)
    if len(seq) == 2:
        return empty_tour("external")
    return Tour(tuple(seq), inst.route_cost(seq), "external")


def tour_costs_all_subsets(inst: Instance, ground: Sequence[int]) -> list[float]:
    """Optimal tour cost for every subset of ``ground`` in one Held-Karp
    pass; entry ``mask`` prices {ground[i] : bit i of mask set}.

    Used to price whole tour catalogs and by the exact CVRP solver.
    """
    ground = list(ground)
    s = len(ground)
    if s > heldkarp_cap():
        raise SubsetTooLarge(f"{s} customers exceeds cap {heldkarp_cap()}")
    m = inst.metric
    full = (1 << s) - 1
    INF = float("inf")
    dp = [[INF] * s for _ in range(full + 1)]
    for i in range(s):
        dp[1 << i][i] = float(m[0, ground[i]])
    for mask in range(1, full + 1):
        row = dp[mask]
        for i in range(s):
            cur = row[i]
            if cur == INF or not (mask >> i) & 1:
                continue
            vi = ground[i]
            for j in range(s):
                if (mask >> j) & 1:
                    continue
                nmask = mask | (1 << j)
                cand = cur + float(m[vi, ground[j]])
                if cand < dp[nmask][j]:
                    dp[nmask][j] = cand
    out = [0.0] * (full + 1)
    for mask in range(1, full + 1):
        row = dp[mask]
        out[mask] = min(
            row[i] + float(m[ground[i], 0])
            for i in range(s)
            if (mask >> i) & 1
        )
    return out
