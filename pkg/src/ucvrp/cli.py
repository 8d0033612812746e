"""Command-line surface: instance generation, solving, exact baselines,
constants reporting, invariant checking, and benchmark tables."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from ucvrp import algorithms, big_matching, constants, itp, lp_round, oracle, tsp
from ucvrp.instance import (
    Instance,
    f_integral,
    gen_instance,
    load_json,
    radial_lower_bound,
    save_json,
    validate_instance,
)
from ucvrp.solution import check_feasible

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2


def _parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def cmd_gen(args) -> int:
    inst = gen_instance(args.kind, args.n, args.k, args.demand_law, args.seed)
    validate_instance(inst)
    save_json(inst, args.out)
    print(f"wrote {args.out}: n={inst.n} k={inst.capacity}")
    return EXIT_OK


def _solve_one(inst: Instance, args):
    tour = algorithms.default_tour(inst)
    delta = args.delta
    trace_payload = None
    g = constants.default_gammas()

    if args.alg == "itp":
        sol, trace = itp.delta_itp(inst, set(inst.customers), tour, Fraction(0))
        trace_payload = trace.to_json_dict()
        report = None
    elif args.alg == "ditp":
        if delta is None:
            raise SystemExit("--delta required for ditp")
        sol, trace = itp.delta_itp(inst, set(inst.customers), tour, delta)
        trace_payload = trace.to_json_dict()
        report = None
    elif args.alg == "ditp+":
        if delta is None:
            raise SystemExit("--delta required for ditp+")
        half = Fraction(1, 2)
        rest = [v for v in inst.customers if inst.norm_demand(v) <= half]
        sub_tour = tsp.shortcut(inst, tour.vertices, rest)
        sol = itp.delta_itp_plus(inst, set(inst.customers), sub_tour, delta)
        report = None
    elif args.alg == "subalg1":
        plan, _ = big_matching.serve_big_by_matching(inst)
        sol = big_matching.subalg1(inst, tour)
        trace_payload = plan.to_json_dict()
        report = None
    elif args.alg == "subalg2":
        gamma = args.gamma if args.gamma is not None else g.gamma_star
        sol, report = algorithms.lp_itp_pipeline(
            inst, "lp1", gamma, Fraction(1, 3), args.seed, tour
        )
    elif args.alg == "subalg3":
        if delta is None:
            raise SystemExit("--delta required for subalg3")
        gamma = args.gamma if args.gamma is not None else g.gamma1
        sol, report = algorithms.lp_itp_pipeline(
            inst, "lp2", gamma, Fraction(1, 3), args.seed, tour, delta_lp=delta
        )
    elif args.alg == "subalg4":
        if delta is None:
            raise SystemExit("--delta required for subalg4")
        gamma = args.gamma if args.gamma is not None else g.gamma2
        sol, report = algorithms.lp_itp_pipeline(
            inst, "lp2", gamma, delta, args.seed, tour, delta_lp=delta
        )
    elif args.alg == "alg1":
        sol, report = algorithms.alg1(inst, seed=args.seed, gamma=args.gamma)
    elif args.alg == "alg2":
        if delta is None:
            raise SystemExit("--delta required for alg2")
        sol, report = algorithms.alg2(inst, delta, seed=args.seed)
    else:
        raise SystemExit(f"unknown algorithm {args.alg!r}")
    return sol, report, tour, trace_payload


def cmd_solve(args) -> int:
    inst = validate_instance(load_json(args.instance))
    sol, report, tour, trace_payload = _solve_one(inst, args)
    feas = check_feasible(inst, sol)
    out = {
        "algorithm": args.alg,
        "cost": sol.cost,
        "tours": [list(t.vertices) for t in sol.tours],
        "feasible": feas.ok,
        "violations": list(feas.violations),
        "lower_bounds": {"radial": radial_lower_bound(inst)},
        "alpha_tag": tour.quality_tag,
        "seed": args.seed,
    }
    if report is not None:
        out["report"] = report.to_json_dict()
    if args.trace and trace_payload is not None:
        out["trace"] = trace_payload
    if args.dump_lp and args.alg in ("subalg2", "subalg3", "subalg4"):
        variant = "lp1" if args.alg == "subalg2" else "lp2"
        catalog = lp_round.enumerate_tours(inst, variant, args.delta)
        lpsol = lp_round.solve_covering_lp(catalog)
        out["lp"] = {
            "catalog": catalog.to_json_dict(),
            "solution": lpsol.to_json_dict(),
        }
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK if feas.ok else EXIT_VIOLATION


def cmd_exact(args) -> int:
    inst = validate_instance(load_json(args.instance))
    res = oracle.exact_cvrp(inst)
    print(json.dumps({
        "opt_cost": res.opt_cost,
        "partition": [sorted(g) for g in res.partition],
        "group_costs": list(res.group_costs),
    }, sort_keys=True))
    return EXIT_OK


def cmd_constants(args) -> int:
    rep = constants.constants_report(args.eps_fixed, args.eps_general)
    if args.format == "json":
        print(json.dumps(rep, sort_keys=True))
    else:
        for key, val in rep.items():
            print(f"{key:32s} {val}")
    return EXIT_OK


def check_instance_invariants(inst: Instance) -> list[str]:
    """One pass over every testable guarantee for a single instance."""
    failures: list[str] = []
    validate_instance(inst)
    if radial_lower_bound(inst) > 0:
        total = f_integral(inst, Fraction(0), Fraction(1), 1)
        if abs(total - 1.0) > 1e-12:
            failures.append(f"demand-profile identity violated: {total}")

    tour = algorithms.default_tour(inst)
    for delta in (Fraction(0), Fraction(1, 10), Fraction(1, 3), Fraction(49, 100)):
        sol, _ = itp.delta_itp(inst, set(inst.customers), tour, delta)
        bound3 = itp.itp_bound(inst, inst.customers, tour.cost, delta, "lemma3")
        if sol.cost > bound3 + 1e-6:
            failures.append(f"partition bound exceeded at delta={delta}")
        if not check_feasible(inst, sol).ok:
            failures.append(f"partition infeasible at delta={delta}")
        half = Fraction(1, 2)
        rest = [v for v in inst.customers if inst.norm_demand(v) <= half]
        sub_tour = tsp.shortcut(inst, tour.vertices, rest)
        plus = itp.delta_itp_plus(inst, set(inst.customers), sub_tour, delta)
        bound4 = itp.itp_bound(inst, inst.customers, tour.cost, delta, "lemma4")
        if plus.cost > bound4 + 1e-6:
            failures.append(f"trivial-tour bound exceeded at delta={delta}")
        if bound4 > bound3 + 1e-9:
            failures.append(f"bound ordering violated at delta={delta}")

    plan, _ = big_matching.serve_big_by_matching(inst)
    sol1 = big_matching.subalg1(inst, tour)
    if sol1.cost > big_matching.subalg1_bound(inst, tour.cost, plan.cost) + 1e-6:
        failures.append("matching-branch bound exceeded")

    if inst.n <= oracle.DEFAULT_ORACLE_CAP and tour.quality_tag == "exact":
        opt = oracle.exact_cvrp(inst).opt_cost
        if radial_lower_bound(inst) > opt + 1e-6:
            failures.append("radial bound exceeds OPT")
        if tour.cost > opt + 1e-6:
            failures.append("tour lower bound exceeds OPT")
        if plan.cost > opt + 1e-6:
            failures.append("matching cost exceeds OPT")
        if inst.n <= 10:
            catalog = lp_round.enumerate_tours(inst, "lp1")
            lpsol = lp_round.solve_covering_lp(catalog)
            if lpsol.objective > opt + 1e-6:
                failures.append("LP objective exceeds OPT")
    return failures


def cmd_check(args) -> int:
    paths = sorted(Path(args.directory).glob("*.json"))
    if not paths:
        print(f"no instance files in {args.directory}", file=sys.stderr)
        return EXIT_USAGE
    bad = 0
    for path in paths:
        inst = load_json(str(path))
        failures = check_instance_invariants(inst)
        status = "ok" if not failures else "FAIL"
        print(f"{path.name}: {status}")
        for f in failures:
            print(f"  {f}")
        bad += bool(failures)
    return EXIT_OK if bad == 0 else EXIT_VIOLATION


def cmd_bench(args) -> int:
    rows = []
    if args.suite == "small":
        specs = [("euclidean", n, k) for n in (5, 7, 9) for k in (2, 3, 4)]
        algs = ["subalg1", "alg1"]
    elif args.suite == "ratio":
        specs = [("euclidean", n, k) for n in (5, 6, 7, 8, 9) for k in (3, 4)]
        algs = ["alg1"]
    else:
        print(f"unknown suite {args.suite!r}", file=sys.stderr)
        return EXIT_USAGE
    for kind, n, k in specs:
        for seed in range(args.seeds):
            inst = gen_instance(kind, n, k, seed=seed)
            opt = oracle.exact_cvrp(inst).opt_cost
            for alg in algs:
                t0 = time.perf_counter()
                if alg == "alg1":
                    sol, rep = algorithms.alg1(inst, seed=seed)
                    params = rep.params
                else:
                    sol = big_matching.subalg1(inst, algorithms.default_tour(inst))
                    params = {}
                wall = time.perf_counter() - t0
                rows.append({
                    "instance": inst.name,
                    "n": n,
                    "k": k,
                    "algorithm": alg,
                    "params": json.dumps(params, sort_keys=True),
                    "cost": sol.cost,
                    "opt": opt,
                    "ratio": sol.cost / opt,
                    "radial_lb": radial_lower_bound(inst),
                    "wall_time": round(wall, 6),
                    "seed": seed,
                })
    if args.format == "json":
        print(json.dumps(rows, sort_keys=True))
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
        print(buf.getvalue(), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ucvrp")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance JSON file")
    g.add_argument("--kind", choices=["euclidean", "random_metric"], default="euclidean")
    g.add_argument("-n", type=int, required=True)
    g.add_argument("-k", type=int, required=True)
    g.add_argument("--demand-law", choices=["uniform", "heavy"], default="uniform")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run a solver on an instance file")
    s.add_argument("instance")
    s.add_argument("--alg", required=True, choices=[
        "itp", "ditp", "ditp+", "subalg1", "subalg2", "subalg3",
        "subalg4", "alg1", "alg2",
    ])
    s.add_argument("--delta", type=_parse_fraction, default=None)
    s.add_argument("--gamma", type=float, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trace", action="store_true")
    s.add_argument("--dump-lp", action="store_true")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("exact", help="exact optimum by subset DP")
    e.add_argument("instance")
    e.set_defaults(func=cmd_exact)

    c = sub.add_parser("constants", help="print the constants report")
    c.add_argument("--eps-fixed", type=float, default=0.000335)
    c.add_argument("--eps-general", type=float, default=0.000334)
    c.add_argument("--format", choices=["json", "table"], default="json")
    c.set_defaults(func=cmd_constants)

    k = sub.add_parser("check", help="run the invariant suite on a directory")
    k.add_argument("directory")
    k.set_defaults(func=cmd_check)

    b = sub.add_parser("bench", help="benchmark table")
    b.add_argument("--suite", choices=["small", "ratio"], default="small")
    b.add_argument("--seeds", type=int, default=3)
    b.add_argument("--format", choices=["json", "csv"], default="json")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
