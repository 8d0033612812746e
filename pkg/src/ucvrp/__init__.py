"""Unsplittable CVRP toolkit: tour-partition heuristics, matching and
LP-rounding pipelines, exact baselines, and the analytic constants behind
their approximation guarantees."""

from ucvrp.instance import Instance, gen_instance, line3, validate_instance
from ucvrp.solution import Solution, check_feasible
from ucvrp.tsp import Tour, approx_tsp, exact_tsp, shortcut

__all__ = [
    "Instance",
    "Solution",
    "Tour",
    "approx_tsp",
    "check_feasible",
    "exact_tsp",
    "gen_instance",
    "line3",
    "shortcut",
    "validate_instance",
]
