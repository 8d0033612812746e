import json
from fractions import Fraction

import pytest

import ucvrp.algorithms as algorithms
from ucvrp.algorithms import alg1, alg2, default_tour, lp_itp_pipeline
from ucvrp.instance import gen_instance
from ucvrp.lp_round import enumerate_tours, solve_covering_lp
from ucvrp.oracle import exact_cvrp
from ucvrp.solution import check_feasible

from conftest import instance_mix

THIRD = Fraction(1, 3)
FIFTH = Fraction(1, 5)


class TestPipeline:
    def test_gamma_zero_skips_lp(self, inst_line3, monkeypatch):
        def boom(*args, **kwargs):
            raise AssertionError("catalog construction must not run")

        monkeypatch.setattr(algorithms, "enumerate_tours", boom)
        tour = default_tour(inst_line3)
        sol, rep = lp_itp_pipeline(inst_line3, "lp1", 0.0, THIRD, 0, tour)
        assert not rep.lp_solved
        assert check_feasible(inst_line3, sol).ok

    def test_feasible_across_instances(self):
        for inst in instance_mix(10, max_n=8, max_k=4, seed_base=600):
            tour = default_tour(inst)
            sol, rep = lp_itp_pipeline(inst, "lp1", 1.0, THIRD, 1, tour)
            assert check_feasible(inst, sol).ok
            assert rep.feasible
            assert rep.cost == pytest.approx(sol.cost)

    def test_restricted_variant_serves_small_by_partition(self):
        for inst in instance_mix(8, max_n=8, max_k=6, seed_base=610):
            tour = default_tour(inst)
            sol, rep = lp_itp_pipeline(
                inst, "lp2", 1.0, THIRD, 2, tour, delta_lp=FIFTH
            )
            assert check_feasible(inst, sol).ok

    def test_tour_must_cover_everything(self, inst_line3):
        from ucvrp.tsp import exact_tsp

        with pytest.raises(ValueError):
            lp_itp_pipeline(
                inst_line3, "lp1", 1.0, THIRD, 0, exact_tsp(inst_line3, [1])
            )

    def test_precomputed_lp_matches(self):
        inst = gen_instance("euclidean", 7, 3, seed=13)
        tour = default_tour(inst)
        cat = enumerate_tours(inst, "lp1")
        lp = solve_covering_lp(cat)
        a, _ = lp_itp_pipeline(inst, "lp1", 1.0, THIRD, 7, tour)
        b, _ = lp_itp_pipeline(
            inst, "lp1", 1.0, THIRD, 7, tour, catalog=cat, lpsol=lp
        )
        assert a.cost == pytest.approx(b.cost, abs=1e-12)
        assert [t.vertices for t in a.tours] == [t.vertices for t in b.tours]


class TestAlg1:
    def test_line3_hits_optimum(self, inst_line3):
        sol, rep = alg1(inst_line3, seed=0)
        assert sol.cost == pytest.approx(8.0, abs=1e-9)
        assert rep.feasible
        assert rep.cost == pytest.approx(min(rep.branch_costs.values()), abs=1e-12)

    def test_feasible_and_reported(self):
        for inst in instance_mix(10, max_n=8, max_k=4, seed_base=620):
            sol, rep = alg1(inst, seed=1)
            assert check_feasible(inst, sol).ok
            assert rep.algorithm == "alg1"
            assert rep.lower_bounds["radial"] <= sol.cost + 1e-9
            json.loads(rep.to_json())  # report must serialize

    def test_seed_determinism(self):
        inst = gen_instance("euclidean", 7, 3, seed=31)
        a, _ = alg1(inst, seed=5)
        b, _ = alg1(inst, seed=5)
        assert a.cost == pytest.approx(b.cost, abs=1e-12)
        assert [t.vertices for t in a.tours] == [t.vertices for t in b.tours]

    def test_large_catalog_falls_back(self):
        inst = gen_instance("euclidean", 25, 3, seed=2)
        sol, rep = alg1(inst, seed=0)
        assert check_feasible(inst, sol).ok
        assert not rep.lp_solved
        assert any("catalog" in n for n in rep.notes)


class TestAlg2:
    def test_feasible_and_reported(self):
        for inst in instance_mix(8, max_n=8, max_k=6, seed_base=630):
            sol, rep = alg2(inst, FIFTH, seed=2)
            assert check_feasible(inst, sol).ok
            assert rep.algorithm == "alg2"
            assert rep.cost == pytest.approx(min(rep.branch_costs.values()), abs=1e-12)

    def test_delta_domain(self, inst_line3):
        with pytest.raises(ValueError):
            alg2(inst_line3, Fraction(1, 3))
        with pytest.raises(ValueError):
            alg2(inst_line3, Fraction(0))

    def test_never_far_from_optimum_small(self):
        for inst in instance_mix(6, max_n=7, max_k=4, seed_base=640):
            opt = exact_cvrp(inst).opt_cost
            sol, _ = alg2(inst, FIFTH, seed=0)
            assert opt - 1e-9 <= sol.cost <= 3.2 * opt + 1e-9
