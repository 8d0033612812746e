"""Tour catalogs, the fractional covering LP over them, and randomized
rounding of the fractional solution.

Catalog variants:
  lp1        — all demand-feasible customer sets; every customer must be
               covered.
  lp2(delta) — demand-feasible sets of non-small customers only
               (normalized demand > delta); only those must be covered.

Each catalog entry is priced with the optimal tour cost of its set, so
the LP optimum is a valid lower bound on the optimal solution cost.
Rounding selects each tour independently with probability
min{1, gamma * x*_T}; draws are keyed by (seed, tour content) so the
outcome does not depend on enumeration order.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from ucvrp.instance import Instance
from ucvrp.tsp import SubsetTooLarge, heldkarp_cap, tour_costs_all_subsets

LP_TOL = 1e-9
DEFAULT_SIZE_CAP = 5_000_000


class CatalogTooLarge(ValueError):
    def __init__(self, estimate: int, cap: int):
        self.estimate = estimate
        super().__init__(f"catalog would hold ~{estimate} tours (cap {cap})")


class LpInfeasible(RuntimeError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    customers: frozenset[int]
    cost: float
    digest: int  # stable 64-bit hash of the customer set


@dataclass(frozen=True)
class TourCatalog:
    variant: str  # "lp1" | "lp2"
    delta: Optional[Fraction]
    tours: tuple[CatalogEntry, ...]
    cover_set: frozenset[int]
    exact_priced: bool = True

    def to_json_dict(self) -> dict:
        return {
            "variant": self.variant,
            "delta": None if self.delta is None else str(self.delta),
            "cover_set": sorted(self.cover_set),
            "tours": [
                {"customers": sorted(t.customers), "cost": t.cost}
                for t in self.tours
            ],
        }


@dataclass(frozen=True)
class LpSolution:
    values: tuple[float, ...]  # x*_T, aligned with catalog.tours
    objective: float
    duals: Optional[tuple[float, ...]] = None  # per cover-set customer

    def to_json_dict(self) -> dict:
        return {
            "objective": self.objective,
            "values": list(self.values),
            "duals": None if self.duals is None else list(self.duals),
        }


@dataclass(frozen=True)
class RoundingOutcome:
    selected: tuple[int, ...]  # indices into catalog.tours
    uncovered: frozenset[int]
    cost: float


def _digest(customers: frozenset[int]) -> int:
    payload = ",".join(str(v) for v in sorted(customers)).encode()
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "big")


def enumerate_tours(
    inst: Instance,
    variant: str,
    delta: Optional[Fraction] = None,
    size_cap: int = DEFAULT_SIZE_CAP,
) -> TourCatalog:
    """All demand-feasible customer sets of the relevant ground set, each
    priced by its optimal tour cost, in deterministic order."""
    if variant == "lp1":
        ground = list(inst.customers)
        cover = frozenset(inst.customers)
    elif variant == "lp2":
        if delta is None:
            raise ValueError("lp2 requires delta")
        delta = Fraction(delta)
        ground = [v for v in inst.customers if inst.norm_demand(v) > delta]
        cover = frozenset(ground)
    else:
        raise ValueError(f"unknown catalog variant {variant!r}")

    s = len(ground)
    if s > 24:
        # Rough count of sets of size up to the per-tour customer limit.
        import math
        per_tour = inst.capacity if variant == "lp1" else max(
            1, int(1 / delta) if delta else inst.capacity
        )
        est = sum(math.comb(s, i) for i in range(1, min(per_tour, s) + 1))
        raise CatalogTooLarge(est, size_cap)
    if not ground:
        return TourCatalog(variant, delta, (), cover)

    demands = [inst.demand(v) for v in ground]
    full = (1 << s) - 1
    dsum = [0] * (full + 1)
    for mask in range(1, full + 1):
        low = mask & -mask
        dsum[mask] = dsum[mask ^ low] + demands[low.bit_length() - 1]
    feasible = [mask for mask in range(1, full + 1) if dsum[mask] <= inst.capacity]
    if len(feasible) > size_cap:
        raise CatalogTooLarge(len(feasible), size_cap)

    exact = True
    try:
        all_costs = tour_costs_all_subsets(inst, ground)
        cost_of = all_costs.__getitem__
    except SubsetTooLarge:
        # Out of reach of the shared pass; price greedily and flag it.
        exact = False
        from ucvrp.tsp import approx_tsp

        def cost_of(mask: int) -> float:
            members = [ground[i] for i in range(s) if (mask >> i) & 1]
            return approx_tsp(inst, members).cost

    entries = []
    for mask in feasible:
        members = frozenset(ground[i] for i in range(s) if (mask >> i) & 1)
        entries.append(CatalogEntry(members, cost_of(mask), _digest(members)))
    entries.sort(key=lambda e: (len(e.customers), sorted(e.customers)))
    return TourCatalog(variant, delta, tuple(entries), cover, exact)


def solve_covering_lp(catalog: TourCatalog) -> LpSolution:
    """Optimal fractional cover of the catalog's cover set."""
    cover = sorted(catalog.cover_set)
    if not cover:
        return LpSolution((0.0,) * len(catalog.tours), 0.0, ())
    covered = set()
    for t in catalog.tours:
        covered |= t.customers
    missing = [v for v in cover if v not in covered]
    if missing:
        raise LpInfeasible(f"customers {missing} appear in no catalog tour")

    m, n = len(cover), len(catalog.tours)
    a = np.zeros((m, n))
    row = {v: i for i, v in enumerate(cover)}
    for j, t in enumerate(catalog.tours):
        for v in t.customers:
            if v in row:
                a[row[v], j] = 1.0
    c = np.array([t.cost for t in catalog.tours])
    res = linprog(c, A_ub=-a, b_ub=-np.ones(m), bounds=(0, None), method="highs")
    if not res.success:
        raise LpInfeasible(f"LP solver failed: {res.message}")
    x = np.asarray(res.x)
    residual = a @ x - 1.0
    if residual.min() < -1e-7:
        raise LpInfeasible(f"coverage residual {residual.min():.3g}")
    duals = None
    if res.ineqlin is not None and res.ineqlin.marginals is not None:
        duals = tuple(-float(y) for y in res.ineqlin.marginals)
    return LpSolution(tuple(float(v) for v in x), float(res.fun), duals)


def _mix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


def _uniform_draw(seed: int, digest: int) -> float:
    return _mix64(_mix64(seed & 0xFFFFFFFFFFFFFFFF) ^ digest) / 2.0 ** 64


def round_tours(
    catalog: TourCatalog,
    lpsol: LpSolution,
    gamma: float,
    seed: int,
) -> RoundingOutcome:
    """Independent per-tour selection with probability min{1, gamma x*}."""
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    selected = []
    covered: set[int] = set()
    cost = 0.0
    if gamma > 0:
        for j, (t, x) in enumerate(zip(catalog.tours, lpsol.values)):
            p = min(1.0, gamma * x)
            if p > 0 and _uniform_draw(seed, t.digest) < p:
                selected.append(j)
                covered |= t.customers
                cost += t.cost
    uncovered = frozenset(catalog.cover_set - covered)
    return RoundingOutcome(tuple(selected), uncovered, cost)


def rounding_monte_carlo(
    catalog: TourCatalog,
    lpsol: LpSolution,
    gamma: float,
    seeds: Sequence[int],
) -> tuple[np.ndarray, dict[int, float]]:
    """Vectorized replay of ``round_tours`` over many seeds.

    Returns (selected cost per seed, per-customer uncovered frequency).
    Bit-identical to calling ``round_tours`` seed by seed.
    """
    tours = catalog.tours
    digests = np.array([t.digest for t in tours], dtype=np.uint64)
    probs = np.minimum(1.0, gamma * np.asarray(lpsol.values))
    costs = np.array([t.cost for t in tours])
    seeds_arr = np.array([s & 0xFFFFFFFFFFFFFFFF for s in seeds], dtype=np.uint64)

    def mix(z: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            z = z + np.uint64(0x9E3779B97F4A7C15)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
            return z ^ (z >> np.uint64(31))

    draws = mix(mix(seeds_arr)[:, None] ^ digests[None, :]) / 2.0 ** 64
    picked = (draws < probs[None, :]) & (probs[None, :] > 0) & (gamma > 0)
    # Accumulate left to right per seed so the totals match the scalar
    # path bit for bit (a matmul would reassociate the additions).
    cost_list = costs.tolist()
    sel_cost = np.empty(len(seeds_arr))
    for i in range(len(seeds_arr)):
        acc = 0.0
        for j in np.flatnonzero(picked[i]):
            acc += cost_list[j]
        sel_cost[i] = acc
    uncovered_freq: dict[int, float] = {}
    for v in sorted(catalog.cover_set):
        member = np.array([v in t.customers for t in tours])
        cov = picked[:, member].any(axis=1)
        uncovered_freq[v] = float(1.0 - cov.mean())
    return sel_cost, uncovered_freq
