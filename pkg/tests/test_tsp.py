import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ucvrp.instance import Instance, gen_instance
from ucvrp.tsp import (
    KeepNotVisited,
    SubsetTooLarge,
    Tour,
    approx_tsp,
    empty_tour,
    exact_tsp,
    shortcut,
    tour_costs_all_subsets,
)

from conftest import instance_mix


def brute_force_tour_cost(inst, subset):
    """Reference optimum by permutation enumeration."""
    subset = sorted(subset)
    best = float("inf")
    for perm in itertools.permutations(subset):
        seq = (0, *perm, 0)
        best = min(best, inst.route_cost(seq))
    return best


class TestExactTsp:
    def test_line3_full(self, inst_line3):
        t = exact_tsp(inst_line3, [1, 2, 3])
        assert t.cost == pytest.approx(6.0, abs=1e-12)
        assert t.vertices == (0, 1, 2, 3, 0)
        assert t.quality_tag == "exact"

    def test_line3_pair(self, inst_line3):
        t = exact_tsp(inst_line3, [2, 3])
        assert t.cost == pytest.approx(6.0, abs=1e-12)
        assert t.vertices == (0, 2, 3, 0)

    def test_empty_and_singleton(self, inst_line3):
        assert exact_tsp(inst_line3, []).vertices == (0, 0)
        t = exact_tsp(inst_line3, [2])
        assert t.vertices == (0, 2, 0)
        assert t.cost == pytest.approx(4.0)

    def test_matches_brute_force(self):
        for inst in instance_mix(12, max_n=7, max_k=4, seed_base=100):
            t = exact_tsp(inst, inst.customers)
            assert t.cost == pytest.approx(
                brute_force_tour_cost(inst, inst.customers), abs=1e-9
            )
            assert t.vertices[0] == t.vertices[-1] == 0
            assert set(t.vertices[1:-1]) == set(inst.customers)
            assert t.cost == pytest.approx(t.recompute_cost(inst), abs=1e-9)

    def test_relabel_invariant(self):
        inst = gen_instance("euclidean", 7, 3, seed=42)
        perm = [0, 3, 1, 7, 5, 2, 6, 4]  # depot fixed
        m = inst.metric[np.ix_(perm, perm)]
        demands = tuple(inst.demands[perm[i] - 1] for i in range(1, 8))
        relabeled = Instance("perm", inst.capacity, demands, m)
        a = exact_tsp(inst, inst.customers)
        b = exact_tsp(relabeled, relabeled.customers)
        assert a.cost == pytest.approx(b.cost, abs=1e-9)

    def test_cap_enforced(self, inst_line3, monkeypatch):
        monkeypatch.setenv("UCVRP_HELDKARP_CAP", "2")
        with pytest.raises(SubsetTooLarge):
            exact_tsp(inst_line3, [1, 2, 3])


class TestApproxTsp:
    def test_within_twice_optimal(self):
        for inst in instance_mix(15, max_n=9, max_k=4, seed_base=200):
            opt = exact_tsp(inst, inst.customers).cost
            t = approx_tsp(inst, inst.customers)
            assert t.quality_tag == "two_approx"
            assert set(t.vertices[1:-1]) == set(inst.customers)
            assert opt - 1e-9 <= t.cost <= 2.0 * opt + 1e-9

    def test_empty(self, inst_line3):
        assert approx_tsp(inst_line3, []).vertices == (0, 0)

    def test_deterministic(self):
        inst = gen_instance("euclidean", 12, 3, seed=9)
        a = approx_tsp(inst, inst.customers)
        b = approx_tsp(inst, inst.customers)
        assert a.vertices == b.vertices


class TestShortcut:
    def test_line3_keep_ends(self, inst_line3):
        t = shortcut(inst_line3, (0, 1, 2, 3, 0), [1, 3])
        assert t.vertices == (0, 1, 3, 0)
        assert t.cost == pytest.approx(6.0)

    def test_first_appearance_order(self, inst_line3):
        t = shortcut(inst_line3, (0, 2, 1, 2, 3, 0), [1, 2])
        assert t.vertices == (0, 2, 1, 0)

    def test_empty_keep(self, inst_line3):
        t = shortcut(inst_line3, (0, 1, 2, 3, 0), [])
        assert t.vertices == (0, 0)
        assert t.cost == 0.0

    def test_keep_not_visited(self, inst_line3):
        with pytest.raises(KeepNotVisited):
            shortcut(inst_line3, (0, 1, 0), [2])

    def test_requires_closed_walk(self, inst_line3):
        with pytest.raises(ValueError):
            shortcut(inst_line3, (0, 1, 2), [1])

    @given(data=st.data())
    @settings(max_examples=40, deadline=None)
    def test_cost_never_increases(self, data):
        seed = data.draw(st.integers(0, 10_000))
        inst = gen_instance("euclidean", 8, 3, seed=seed)
        walk_mid = data.draw(
            st.lists(st.integers(0, 8), min_size=1, max_size=15)
        )
        walk = (0, *walk_mid, 0)
        visited = [v for v in set(walk) if v != 0]
        keep = data.draw(st.sets(st.sampled_from(visited)) if visited else st.just(set()))
        t = shortcut(inst, walk, keep)
        assert t.cost <= inst.route_cost(walk) + 1e-9
        assert t.customers == frozenset(keep)


class TestAllSubsets:
    def test_matches_per_subset_exact(self):
        inst = gen_instance("random_metric", 6, 3, seed=77)
        ground = list(inst.customers)
        costs = tour_costs_all_subsets(inst, ground)
        for mask in range(1, 1 << 6):
            members = [ground[i] for i in range(6) if (mask >> i) & 1]
            assert costs[mask] == pytest.approx(
                exact_tsp(inst, members).cost, abs=1e-9
            )

    def test_cap(self, inst_line3, monkeypatch):
        monkeypatch.setenv("UCVRP_HELDKARP_CAP", "2")
        with pytest.raises(SubsetTooLarge):
            tour_costs_all_subsets(inst_line3, [1, 2, 3])


def test_tour_customers_property():
    t = Tour((0, 4, 2, 0), 5.0, "external")
    assert t.customers == frozenset({2, 4})
    assert empty_tour().customers == frozenset()
