"""Serve every customer with normalized demand above 1/3 via a
minimum-cost pair/solo cover.

Two such customers can share a tour only if their demands fit together,
and no tour fits three of them, so the cheapest way to serve this group
with dedicated tours is a minimum-weight matching: pair (u, v) costs
c(r,u) + c(u,v) + c(v,r), a solo costs 2 c(r,v).  Shortcutting any
optimal solution down to this group yields some pair/solo cover, so the
optimal cover costs at most the overall optimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import networkx as nx

from ucvrp.instance import Instance
from ucvrp.itp import delta_itp
from ucvrp.solution import Solution, merge
from ucvrp.tsp import Tour, shortcut

BIG_THRESHOLD = Fraction(1, 3)


@dataclass(frozen=True)
class MatchingPlan:
    pairs: frozenset[tuple[int, int]]
    solos: frozenset[int]
    cost: float

    def to_json_dict(self) -> dict:
        return {
            "pairs": sorted([list(p) for p in self.pairs]),
            "solos": sorted(self.solos),
            "cost": self.cost,
        }


def _pair_cost(inst: Instance, u: int, v: int) -> float:
    return inst.depot_cost(u) + inst.cost(u, v) + inst.depot_cost(v)


def _plan_to_solution(inst: Instance, plan: MatchingPlan) -> Solution:
    tours: list[Tour] = []
    assignment: dict[int, int] = {}
    for u, v in sorted(plan.pairs):
        seq = (0, u, v, 0)
        tours.append(Tour(seq, inst.route_cost(seq), "external"))
        assignment[u] = assignment[v] = len(tours) - 1
    for v in sorted(plan.solos):
        tours.append(Tour((0, v, 0), 2.0 * inst.depot_cost(v), "external"))
        assignment[v] = len(tours) - 1
    return Solution(tuple(tours), assignment)


def serve_big_by_matching(inst: Instance) -> tuple[MatchingPlan, Solution]:
    """Optimal pair/solo cover of {v : d_v/k > 1/3}.

    Solved as maximum-weight matching on the savings graph: pairing u and
    v saves c(r,u) + c(r,v) - c(u,v) >= 0 over two solos.
    """
    big = sorted(v for v in inst.customers if inst.norm_demand(v) > BIG_THRESHOLD)
    if not big:
        plan = MatchingPlan(frozenset(), frozenset(), 0.0)
        return plan, Solution((), {})
    g = nx.Graph()
    g.add_nodes_from(big)
    for i, u in enumerate(big):
        for v in big[i + 1:]:
            if inst.norm_demand(u) + inst.norm_demand(v) <= 1:
                saving = inst.depot_cost(u) + inst.depot_cost(v) - inst.cost(u, v)
                g.add_edge(u, v, weight=saving)
    mate = nx.max_weight_matching(g, maxcardinality=False)
    pairs = frozenset(tuple(sorted(e)) for e in mate)
    matched = {v for e in pairs for v in e}
    solos = frozenset(v for v in big if v not in matched)
    cost = sum(_pair_cost(inst, u, v) for u, v in pairs) + sum(
        2.0 * inst.depot_cost(v) for v in solos
    )
    plan = MatchingPlan(pairs, solos, float(cost))
    return plan, _plan_to_solution(inst, plan)


def best_cover_bruteforce(inst: Instance, big: Iterable[int]) -> float:
    """Exhaustive pair/solo cover enumeration; cross-checks the matching
    solver on small groups."""
    big = sorted(big)
    if len(big) > 12:
        raise ValueError("brute-force cover capped at 12 customers")

    def rec(remaining: tuple[int, ...]) -> float:
        if not remaining:
            return 0.0
        u, rest = remaining[0], remaining[1:]
        best = 2.0 * inst.depot_cost(u) + rec(rest)
        for j, v in enumerate(rest):
            if inst.norm_demand(u) + inst.norm_demand(v) <= 1:
                cand = _pair_cost(inst, u, v) + rec(rest[:j] + rest[j + 1:])
                best = min(best, cand)
        return best

    return rec(tuple(big))


def subalg1(inst: Instance, tour: Tour) -> Solution:
    """Matching for demand > 1/3, then 1/3-threshold tour partition on the
    remaining customers over the shortcut of ``tour``."""
    if tour.customers != set(inst.customers):
        raise ValueError("tour must cover all customers")
    _, big_sol = serve_big_by_matching(inst)
    rest = [v for v in inst.customers if inst.norm_demand(v) <= BIG_THRESHOLD]
    if not rest:
        return big_sol
    sub_tour = shortcut(inst, tour.vertices, rest)
    rest_sol, _ = delta_itp(inst, rest, sub_tour, BIG_THRESHOLD)
    if not big_sol.tours:
        return rest_sol
    return merge(big_sol, rest_sol)


def subalg1_bound(inst: Instance, tour_cost: float, matching_cost: float) -> float:
    """c(tour) + (3/2) sum_{small} 2 d_v c(r,v) + matching cost."""
    small_term = sum(
        2.0 * float(inst.norm_demand(v)) * inst.depot_cost(v)
        for v in inst.customers
        if inst.norm_demand(v) <= BIG_THRESHOLD
    )
    return tour_cost + 1.5 * small_term + matching_cost
