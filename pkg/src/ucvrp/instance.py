"""Instance model for the unsplittable CVRP.

An instance is a depot (index 0), n customers (indices 1..n) with integer
demands, an integer vehicle capacity, and a symmetric metric cost matrix
over all n+1 points.  Demands are compared as exact rationals d_v / k so
that threshold classifications (small / big / large) are tie-free; costs
stay 64-bit floats.

Also provided here: instance generators, JSON and TSPLIB I/O, the radial
lower bound on the optimum, and the demand-profile integral

    int_l^r x^t dF(x) = sum_{v: l < d_v/k <= r} 2 (d_v/k)^t c(r,v)
                        / sum_v 2 (d_v/k) c(r,v),   t in {0, 1},

which the ratio analysis of every algorithm in this package is written in
terms of.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

METRIC_TOL = 1e-9


class InstanceError(ValueError):
    """Base class for instance validation failures."""


class TriangleViolation(InstanceError):
    def __init__(self, x: int, y: int, z: int, slack: float):
        self.triple = (x, y, z)
        super().__init__(
            f"triangle inequality violated: c({x},{y}) > c({x},{z}) + c({z},{y}) "
            f"by {slack:.3g}"
        )


class AsymmetricCost(InstanceError):
    def __init__(self, x: int, y: int):
        self.pair = (x, y)
        super().__init__(f"cost matrix not symmetric at ({x},{y})")


class DemandOutOfRange(InstanceError):
    def __init__(self, v: int, demand: int, capacity: int):
        self.customer = v
        super().__init__(
            f"demand of customer {v} is {demand}, outside [1, {capacity}]"
        )


class ZeroRadialMass(InstanceError):
    def __init__(self) -> None:
        super().__init__("all customers sit at the depot; dF is undefined")


@dataclass(frozen=True)
class Instance:
    """An unsplittable CVRP instance.

    ``metric`` is an (n+1) x (n+1) array; row/column 0 is the depot.
    ``demands[i]`` is the demand of customer i+1.  ``coords`` is kept when
    the metric was derived from planar points (serialization round-trips
    through the coordinates in that case).
    """

    name: str
    capacity: int
    demands: tuple[int, ...]
    metric: np.ndarray
    coords: Optional[tuple[tuple[float, float], ...]] = None

    def __post_init__(self) -> None:
        m = np.asarray(self.metric, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "metric", m)
        object.__setattr__(self, "demands", tuple(int(d) for d in self.demands))

    @property
    def n(self) -> int:
        return len(self.demands)

    @property
    def customers(self) -> range:
        return range(1, self.n + 1)

    def demand(self, v: int) -> int:
        return self.demands[v - 1]

    def norm_demand(self, v: int) -> Fraction:
        """Demand of customer v scaled to a unit-capacity vehicle."""
        return Fraction(self.demands[v - 1], self.capacity)

    def cost(self, x: int, y: int) -> float:
        return float(self.metric[x, y])

    def depot_cost(self, v: int) -> float:
        return float(self.metric[0, v])

    def route_cost(self, vertices: Sequence[int]) -> float:
        return float(
            sum(self.metric[a, b] for a, b in zip(vertices, vertices[1:]))
        )

    def to_json_dict(self) -> dict:
        if self.coords is not None:
            metric = {"type": "euc2d", "coords": [list(p) for p in self.coords]}
        else:
            metric = {"type": "explicit", "matrix": self.metric.tolist()}
        return {
            "name": self.name,
            "capacity": self.capacity,
            "demands": list(self.demands),
            "metric": metric,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


@dataclass(frozen=True)
class DemandClass:
    """Partition of the customers by normalized demand against a threshold
    delta: small (<= delta), big (in (delta, 1/2]), large (> 1/2)."""

    small: frozenset[int]
    big: frozenset[int]
    large: frozenset[int]


def validate_instance(inst: Instance) -> Instance:
    """Check all instance invariants; return the instance unchanged.

    Raises the first violation found: matrix shape/symmetry/reflexivity,
    the triangle inequality over all triples (additive tolerance 1e-9),
    and 1 <= d_v <= k for every customer.
    """
    n = inst.n
    m = inst.metric
    if m.shape != (n + 1, n + 1):
        raise InstanceError(
            f"metric shape {m.shape} inconsistent with {n} customers"
        )
    if not np.all(np.isfinite(m)) or np.any(m < -METRIC_TOL):
        raise InstanceError("metric entries must be finite and non-negative")
    if np.any(np.abs(np.diag(m)) > METRIC_TOL):
        raise InstanceError("metric diagonal must be zero")
    asym = np.argwhere(np.abs(m - m.T) > METRIC_TOL)
    if len(asym):
        x, y = (int(i) for i in asym[0])
        raise AsymmetricCost(x, y)
    # Exhaustive triangle check; n is desk-scale so O(n^3) with numpy is fine.
    # slack[x, y, z] = c(x,y) - c(x,z) - c(z,y)
    slack = m[:, :, None] - m[:, None, :] - m.T[None, :, :]
    bad = np.argwhere(slack > METRIC_TOL)
    if len(bad):
        x, y, z = (int(i) for i in bad[0])
        raise TriangleViolation(x, y, z, float(m[x, y] - m[x, z] - m[z, y]))
    for v in inst.customers:
        d = inst.demand(v)
        if not 1 <= d <= inst.capacity:
            raise DemandOutOfRange(v, d, inst.capacity)
    return inst


def radial_lower_bound(inst: Instance) -> float:
    """sum_v 2 (d_v/k) c(r,v); never exceeds the optimal solution cost."""
    return float(
        sum(2.0 * float(inst.norm_demand(v)) * inst.depot_cost(v)
            for v in inst.customers)
    )


def classify(inst: Instance, delta: Fraction) -> DemandClass:
    """Split customers into small / big / large relative to ``delta``."""
    delta = Fraction(delta)
    if not 0 <= delta <= Fraction(1, 2):
        raise ValueError(f"delta must lie in [0, 1/2], got {delta}")
    half = Fraction(1, 2)
    small, big, large = set(), set(), set()
    for v in inst.customers:
        dv = inst.norm_demand(v)
        if dv <= delta:
            small.add(v)
        elif dv <= half:
            big.add(v)
        else:
            large.add(v)
    return DemandClass(frozenset(small), frozenset(big), frozenset(large))


def f_integral(inst: Instance, l: Fraction, r: Fraction, t: int) -> float:
    """Demand-profile integral over the half-open interval (l, r].

    Membership of a customer is decided by exact rational comparison of
    its normalized demand against l and r; the returned value is a float
    ratio of radial masses.
    """
    l, r = Fraction(l), Fraction(r)
    if not 0 <= l <= r <= 1:
        raise ValueError(f"need 0 <= l <= r <= 1, got l={l}, r={r}")
    if t not in (0, 1):
        raise ValueError(f"t must be 0 or 1, got {t}")
    denom = sum(
        2.0 * float(inst.norm_demand(v)) * inst.depot_cost(v)
        for v in inst.customers
    )
    if denom == 0.0:
        raise ZeroRadialMass()
    num = 0.0
    for v in inst.customers:
        dv = inst.norm_demand(v)
        if l < dv <= r:
            num += 2.0 * float(dv) ** t * inst.depot_cost(v)
    return num / denom


def line3() -> Instance:
    """Canonical worked example: depot at 0 and customers a, b, c at line
    positions 1, 2, 3 with unit demands and capacity 2."""
    positions = [0.0, 1.0, 2.0, 3.0]
    m = np.abs(np.subtract.outer(positions, positions))
    return Instance(name="LINE3", capacity=2, demands=(1, 1, 1), metric=m)


def _draw_demands(rng: np.random.Generator, n: int, k: int, law: str) -> tuple[int, ...]:
    if law == "uniform":
        return tuple(int(d) for d in rng.integers(1, k + 1, size=n))
    if law == "heavy":
        # Mix of light loads and near-capacity loads.
        out = []
        for _ in range(n):
            if rng.random() < 0.5:
                out.append(int(rng.integers(1, max(1, k // 3) + 1)))
            else:
                out.append(int(rng.integers((k + 1) // 2, k + 1)))
        return tuple(out)
    raise ValueError(f"unknown demand law {law!r}")


def gen_instance(
    kind: str,
    n: int,
    k: int,
    demand_law: str = "uniform",
    seed: int = 0,
) -> Instance:
    """Deterministic random instance generator.

    ``euclidean``: points uniform in the unit square, exact-float
    Euclidean distances, depot drawn like any other point.
    ``random_metric``: symmetric edge weights uniform in (0, 1], closed
    under all-pairs shortest paths so the triangle inequality holds.
    """
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    rng = np.random.default_rng(seed)
    name = f"{kind}-n{n}-k{k}-{demand_law}-s{seed}"
    if kind == "euclidean":
        pts = rng.random((n + 1, 2))
        diff = pts[:, None, :] - pts[None, :, :]
        m = np.sqrt((diff ** 2).sum(axis=2))
        demands = _draw_demands(rng, n, k, demand_law)
        coords = tuple((float(x), float(y)) for x, y in pts)
        return Instance(name, k, demands, m, coords)
    if kind == "random_metric":
        w = 1.0 - rng.random((n + 1, n + 1))
        w = np.minimum(w, w.T)
        np.fill_diagonal(w, 0.0)
        # Floyd-Warshall closure.
        for mid in range(n + 1):
            w = np.minimum(w, w[:, mid, None] + w[None, mid, :])
        demands = _draw_demands(rng, n, k, demand_law)
        return Instance(name, k, demands, w)
    raise ValueError(f"unknown instance kind {kind!r}")


def from_json_dict(data: dict) -> Instance:
    metric = data["metric"]
    if metric["type"] == "euc2d":
        coords = tuple((float(x), float(y)) for x, y in metric["coords"])
        pts = np.array(coords)
        diff = pts[:, None, :] - pts[None, :, :]
        m = np.sqrt((diff ** 2).sum(axis=2))
    elif metric["type"] == "explicit":
        coords = None
        m = np.array(metric["matrix"], dtype=float)
    else:
        raise InstanceError(f"unknown metric type {metric['type']!r}")
    return Instance(
        name=str(data["name"]),
        capacity=int(data["capacity"]),
        demands=tuple(int(d) for d in data["demands"]),
        metric=m,
        coords=coords,
    )


def load_json(path: str) -> Instance:
    with open(path) as fh:
        return from_json_dict(json.load(fh))


def save_json(inst: Instance, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(inst.to_json())
        fh.write("\n")


_TSPLIB_KEYS = {
    "NAME", "TYPE", "COMMENT", "DIMENSION", "CAPACITY",
    "EDGE_WEIGHT_TYPE", "EDGE_WEIGHT_FORMAT", "DISPLAY_DATA_TYPE",
}


def load_tsplib(path: str, round_distances: bool = False) -> Instance:
    """Import the supported TSPLIB-CVRP subset.

    Supported: EDGE_WEIGHT_TYPE EUC_2D or EXPLICIT with FULL_MATRIX,
    NODE_COORD_SECTION, DEMAND_SECTION, DEPOT_SECTION with depot 1.
    Anything else is rejected.  Distances stay exact floats unless
    ``round_distances`` asks for TSPLIB integer rounding.
    """
    header: dict[str, str] = {}
    sections: dict[str, list[str]] = {}
    current = None
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line == "EOF":
                continue
            if ":" in line and line.split(":")[0].strip() in _TSPLIB_KEYS:
                key, _, val = line.partition(":")
                header[key.strip()] = val.strip()
                current = None
            elif line.endswith("_SECTION"):
                current = line
                sections[current] = []
            elif current is not None:
                sections[current].append(line)
            else:
                raise InstanceError(f"unsupported TSPLIB line: {line!r}")

    dim = int(header["DIMENSION"])
    cap = int(header["CAPACITY"])
    ewt = header.get("EDGE_WEIGHT_TYPE", "")
    if ewt == "EUC_2D":
        rows = sections.get("NODE_COORD_SECTION")
        if rows is None:
            raise InstanceError("EUC_2D requires NODE_COORD_SECTION")
        coords_by_id = {}
        for row in rows:
            idx, x, y = row.split()[:3]
            coords_by_id[int(idx)] = (float(x), float(y))
        pts = np.array([coords_by_id[i] for i in range(1, dim + 1)])
        diff = pts[:, None, :] - pts[None, :, :]
        m = np.sqrt((diff ** 2).sum(axis=2))
        if round_distances:
            m = np.floor(m + 0.5)
        coords = tuple((float(x), float(y)) for x, y in pts)
    elif ewt == "EXPLICIT":
        if header.get("EDGE_WEIGHT_FORMAT") != "FULL_MATRIX":
            raise InstanceError("only FULL_MATRIX explicit weights are supported")
        vals = [float(x) for row in sections["EDGE_WEIGHT_SECTION"] for x in row.split()]
        if len(vals) != dim * dim:
            raise InstanceError("EDGE_WEIGHT_SECTION has wrong length")
        m = np.array(vals).reshape(dim, dim)
        coords = None
    else:
        raise InstanceError(f"unsupported EDGE_WEIGHT_TYPE {ewt!r}")

    demands_by_id = {}
    for row in sections.get("DEMAND_SECTION", []):
        idx, d = row.split()[:2]
        demands_by_id[int(idx)] = int(d)
    depot_rows = [int(r) for r in sections.get("DEPOT_SECTION", []) if int(r) != -1]
    if depot_rows and depot_rows != [1]:
        raise InstanceError("only depot node 1 is supported")
    if demands_by_id.get(1, 0) != 0:
        raise InstanceError("depot must carry zero demand")
    demands = tuple(demands_by_id[i] for i in range(2, dim + 1))
    name = header.get("NAME", path)
    return Instance(name, cap, demands, m, coords)
