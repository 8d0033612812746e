"""Tour-partition heuristics.

Given a depot-rooted tour and a demand threshold delta, ``delta_itp``
lays the customers' normalized demands end to end on a line in tour
order, cuts the line at offset eta + m*(1 - delta), and turns each
resulting segment into one tour.  A customer straddling a cut is either
absorbed whole into an adjacent segment (when the resulting load still
fits the vehicle) or served by a trivial tour.  The offset is
derandomized: the cost is piecewise constant in eta, so evaluating every
breakpoint residue and the midpoints between them and keeping the
cheapest outcome is at least as good as the uniform-offset expectation.

``delta_itp_plus`` first serves every customer with normalized demand
above 1/2 by a trivial tour and runs ``delta_itp`` on the remainder,
which never costs more.

``itp_bound`` evaluates the closed-form cost guarantees the two
procedures are tested against:

  variant "lemma1" (delta = 0):
      c(tour) + sum_v 4 d_v c(r,v)
  variant "lemma3":
      c(tour) + 1/(1-delta) * sum_small 2 d_v c(r,v)
              + 2/(1-delta) * sum_nonsmall 2 d_v c(r,v)
              - delta/(1-delta) * sum_nonsmall 2 c(r,v)
  variant "lemma4" (trivial tours for demand > 1/2):
      as "lemma3" with the demand > 1/2 terms replaced by sum 2 c(r,v)

with demands normalized by the capacity and small/non-small decided
relative to delta inside the served subset.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from ucvrp.instance import Instance
from ucvrp.solution import Solution, merge, trivial_solution
from ucvrp.tsp import Tour


class DemandExceedsCapacity(ValueError):
    def __init__(self, v: int):
        self.customer = v
        super().__init__(f"customer {v} has normalized demand above 1")


@dataclass(frozen=True)
class PartitionTrace:
    """Witness of one derandomized partition run (the winning offset)."""

    offset: Fraction
    breakpoints: tuple[Fraction, ...]
    dispositions: dict[int, str]  # in-segment | absorbed-left | absorbed-right | trivial-tour
    segments: tuple[tuple[int, ...], ...]
    candidate_costs: tuple[tuple[Fraction, float], ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "offset": str(self.offset),
            "breakpoints": [str(b) for b in self.breakpoints],
            "dispositions": {str(v): d for v, d in self.dispositions.items()},
            "segments": [list(s) for s in self.segments],
            "candidate_costs": [[str(e), c] for e, c in self.candidate_costs],
        }


def _segment_solution(
    inst: Instance,
    order: Sequence[int],
    segments: Sequence[Sequence[int]],
    trivial: Sequence[int],
) -> Solution:
    pos = {v: i for i, v in enumerate(order)}
    tours: list[Tour] = []
    assignment: dict[int, int] = {}
    for seg in segments:
        if not seg:
            continue
        members = sorted(seg, key=pos.__getitem__)
        seq = (0, *members, 0)
        tours.append(Tour(seq, inst.route_cost(seq), "external"))
        for v in members:
            assignment[v] = len(tours) - 1
    for v in trivial:
        tours.append(Tour((0, v, 0), 2.0 * inst.depot_cost(v), "external"))
        assignment[v] = len(tours) - 1
    return Solution(tuple(tours), assignment)


def _evaluate_offset(
    inst: Instance,
    order: Sequence[int],
    prefix: Sequence[Fraction],
    span: Fraction,
    eta: Fraction,
) -> tuple[list[list[int]], list[int], dict[int, str], list[Fraction]]:
    """Partition ``order`` for one offset; returns (segments, trivial
    customers, dispositions, cut positions)."""
    total = prefix[-1]
    cuts: list[Fraction] = []
    pos = eta if eta > 0 else eta + span
    while pos < total:
        cuts.append(pos)
        pos += span

    bounds = [Fraction(0), *cuts, total]
    nseg = len(bounds) - 1
    seg_members: list[list[int]] = [[] for _ in range(nseg)]
    seg_load: list[Fraction] = [Fraction(0)] * nseg
    disposition: dict[int, str] = {}

    # Straddlers: customer i straddles a cut strictly inside its interval
    # (prefix[i], prefix[i+1]].  Demand <= span, so at most one cut each.
    straddler_at: dict[int, int] = {}  # cut index -> customer position
    for i, v in enumerate(order):
        lo, hi = prefix[i], prefix[i + 1]
        inside = None
        for ci, cut in enumerate(cuts):
            if lo < cut < hi:
                inside = ci
                break
            if cut >= hi:
                break
        if inside is None:
            # Fully inside the segment whose bounds bracket the interval.
            for j in range(nseg):
                if bounds[j] <= lo and hi <= bounds[j + 1]:
                    seg_members[j].append(v)
                    seg_load[j] += hi - lo
                    disposition[v] = "in-segment"
                    break
        else:
            straddler_at[inside] = i

    one = Fraction(1)
    for ci in sorted(straddler_at):
        i = straddler_at[ci]
        v = order[i]
        d = prefix[i + 1] - prefix[i]
        left_portion = cuts[ci] - prefix[i]
        right_portion = prefix[i + 1] - cuts[ci]
        left, right = ci, ci + 1  # segment indices around this cut
        fits_left = seg_load[left] + d <= one
        fits_right = seg_load[right] + d <= one
        if fits_left and fits_right:
            side = left if left_portion >= right_portion else right
        elif fits_left:
            side = left
        elif fits_right:
            side = right
        else:
            side = None
        if side is None:
            disposition[v] = "trivial-tour"
        else:
            seg_members[side].append(v)
            seg_load[side] += d
            disposition[v] = "absorbed-left" if side == left else "absorbed-right"

    trivial = [v for v, disp in disposition.items() if disp == "trivial-tour"]
    return seg_members, trivial, disposition, cuts


def delta_itp(
    inst: Instance,
    subset: Iterable[int],
    tour: Tour,
    delta: Fraction,
) -> tuple[Solution, PartitionTrace]:
    """Derandomized threshold tour partition over ``subset``.

    The returned solution is feasible and its cost never exceeds
    ``itp_bound(..., "lemma3")``; with delta = 0 this is the classic
    partition with the "lemma1" guarantee.
    """
    delta = Fraction(delta)
    if not 0 <= delta < Fraction(1, 2):
        raise ValueError(f"delta must lie in [0, 1/2), got {delta}")
    subset = set(subset)
    if tour.customers != subset:
        raise ValueError("tour must visit exactly the requested subset")
    for v in subset:
        if inst.norm_demand(v) > 1:
            raise DemandExceedsCapacity(v)

    span = 1 - delta
    full_order = [v for v in tour.vertices[1:-1]]
    # Customers wider than the cut spacing would contain a cut regardless
    # of the offset; serving them by trivial tours up front is always
    # within the "lemma3" budget (their demand exceeds 1/2) and leaves
    # every remaining demand at most the spacing.
    oversize = [v for v in full_order if inst.norm_demand(v) > span]
    order = [v for v in full_order if inst.norm_demand(v) <= span]

    if not order:
        sol = trivial_solution(inst, oversize)
        trace = PartitionTrace(
            Fraction(0), (), {v: "trivial-tour" for v in oversize}, ()
        )
        return sol, trace

    prefix = [Fraction(0)]
    for v in order:
        prefix.append(prefix[-1] + inst.norm_demand(v))

    residues = sorted({p % span for p in prefix})
    candidates = set(residues)
    for a, b in zip(residues, residues[1:]):
        candidates.add((a + b) / 2)
    candidates.add((residues[-1] + span) / 2)
    candidates.add(Fraction(0))

    best = None
    candidate_costs: list[tuple[Fraction, float]] = []
    for eta in sorted(candidates):
        segs, trivial, disp, cuts = _evaluate_offset(inst, order, prefix, span, eta)
        sol = _segment_solution(inst, order, segs, trivial + oversize)
        for v in oversize:
            disp[v] = "trivial-tour"
        candidate_costs.append((eta, sol.cost))
        if best is None or sol.cost < best[1] - 1e-12:
            best = (eta, sol.cost, sol, segs, disp, cuts)

    eta, _, sol, segs, disp, cuts = best
    trace = PartitionTrace(
        offset=eta,
        breakpoints=tuple(cuts),
        dispositions=disp,
        segments=tuple(tuple(s) for s in segs if s),
        candidate_costs=tuple(candidate_costs),
    )
    return sol, trace


def delta_itp_plus(
    inst: Instance,
    subset: Iterable[int],
    tour: Tour,
    delta: Fraction,
) -> Solution:
    """Trivial tours for every customer with normalized demand above 1/2,
    ``delta_itp`` for the rest.  ``tour`` must cover exactly the
    non-large part of ``subset``."""
    subset = set(subset)
    half = Fraction(1, 2)
    large = sorted(v for v in subset if inst.norm_demand(v) > half)
    rest = subset - set(large)
    if tour.customers != rest:
        raise ValueError("tour must cover exactly the non-large customers")
    parts = []
    if large:
        parts.append(trivial_solution(inst, large))
    if rest:
        parts.append(delta_itp(inst, rest, tour, delta)[0])
    if not parts:
        return Solution((), {})
    return merge(*parts)


def itp_bound(
    inst: Instance,
    subset: Iterable[int],
    tour_cost: float,
    delta: Fraction,
    variant: str,
) -> float:
    delta = Fraction(delta)
    subset = set(subset)
    half = Fraction(1, 2)
    scale = 1.0 / (1.0 - float(delta))
    total = tour_cost
    if variant == "lemma1":
        return tour_cost + sum(
            4.0 * float(inst.norm_demand(v)) * inst.depot_cost(v) for v in subset
        )
    if variant not in ("lemma3", "lemma4"):
        raise ValueError(f"unknown bound variant {variant!r}")
    for v in subset:
        d = inst.norm_demand(v)
        c = inst.depot_cost(v)
        if d <= delta:
            total += scale * 2.0 * float(d) * c
        elif variant == "lemma4" and d > half:
            total += 2.0 * c
        else:
            total += scale * (2.0 * float(d) - float(delta)) * 2.0 * c
    return total
