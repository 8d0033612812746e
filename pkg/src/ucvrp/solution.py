"""Solutions to the unsplittable CVRP and their feasibility check."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ucvrp.instance import Instance
from ucvrp.tsp import Tour

COST_TOL = 1e-9


@dataclass(frozen=True)
class Solution:
    """A set of tours plus an unsplittable assignment of each customer to
    the single tour serving it."""

    tours: tuple[Tour, ...]
    assignment: Mapping[int, int]  # customer -> index into tours

    @property
    def cost(self) -> float:
        return float(sum(t.cost for t in self.tours))

    def tour_of(self, v: int) -> Tour:
        return self.tours[self.assignment[v]]


@dataclass(frozen=True)
class FeasibilityReport:
    ok: bool
    violations: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def check_feasible(inst: Instance, sol: Solution) -> FeasibilityReport:
    """Verify the unsplittable feasibility conditions.

    Checks, in order: every customer assigned exactly once; the assigned
    tour actually visits the customer; per-tour assigned demand at most
    the capacity.  Violations are reported, not raised.
    """
    problems: list[str] = []
    assigned = set(sol.assignment)
    for v in inst.customers:
        if v not in assigned:
            problems.append(f"CustomerUnserved({v})")
    for v in sol.assignment:
        if v not in set(inst.customers):
            problems.append(f"UnknownCustomer({v})")
    for v, ti in sol.assignment.items():
        if ti < 0 or ti >= len(sol.tours):
            problems.append(f"BadTourIndex({v},{ti})")
        elif v not in sol.tours[ti].customers:
            problems.append(f"ServedOffTour({v},{ti})")
    loads: dict[int, int] = {}
    known = set(inst.customers)
    for v, ti in sol.assignment.items():
        if v in known:
            loads[ti] = loads.get(ti, 0) + inst.demand(v)
    for ti, load in loads.items():
        if load > inst.capacity:
            problems.append(f"CapacityExceeded({ti}:{load}>{inst.capacity})")
    for ti, t in enumerate(sol.tours):
        if abs(t.cost - t.recompute_cost(inst)) > 1e-6:
            problems.append(f"CostMismatch({ti})")
    return FeasibilityReport(not problems, tuple(problems))


def merge(*sols: Solution) -> Solution:
    """Union of solutions over disjoint customer sets."""
    tours: list[Tour] = []
    assignment: dict[int, int] = {}
    for sol in sols:
        offset = len(tours)
        tours.extend(sol.tours)
        for v, ti in sol.assignment.items():
            if v in assignment:
                raise ValueError(f"customer {v} assigned by two solutions")
            assignment[v] = ti + offset
    return Solution(tuple(tours), assignment)


def trivial_solution(inst: Instance, customers: Sequence[int]) -> Solution:
    """One trivial tour (depot, v, depot) per listed customer."""
    tours = tuple(
        Tour((0, v, 0), 2.0 * inst.depot_cost(v), "external")
        for v in customers
    )
    return Solution(tours, {v: i for i, v in enumerate(customers)})
