"""Command-line interface: solve, sweep, generate, schedule."""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .colgen import TIME_LIMIT, solve_cg
from .decomposition import decompose
from .errors import CapacityError, InputError, NetmonError
from .fileio import (instance_to_dict, load_instance, load_strategy,
                     save_instance, strategy_to_dict)
from .generators import generate
from .instance import evaluate_strategy, node_basis, require_valid
from .mwu import solve_mwu
from .oracle import solve_exact
from .pipeline import solve_approx, solve_gcs, upper_bound
from .reporting import METHODS, SweepLimits, run_sweep, sample_schedule

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CAPACITY = 3
EXIT_TIME_LIMIT = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netmon",
        description="Randomized sensor-monitoring strategies with bound "
                    "certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one instance with one method")
    solve.add_argument("--instance", required=True)
    solve.add_argument("--r", type=int, default=None,
                       help="sensor budget (defaults to the instance file's)")
    solve.add_argument("--method", default="approx",
                       choices=("approx", "gcs", "ub", "exact", "cg", "mwu"))
    solve.add_argument("--max-support", type=int, default=None,
                       help="cap on the number of monitored locations")
    solve.add_argument("--tol", type=float, default=1e-7)
    solve.add_argument("--time-limit", type=float, default=600.0)
    solve.add_argument("--seed", type=int, default=0,
                       help="reserved for sampling; solvers are deterministic")
    solve.add_argument("--epsilon", type=float, default=0.1,
                       help="target absolute gap for mwu")
    solve.add_argument("--iterations", type=int, default=None,
                       help="explicit mwu iteration count (overrides epsilon)")
    solve.add_argument("--mwu-mode", default="exact",
                       choices=("exact", "greedy"))
    solve.add_argument("--out", default=None)

    sweep = sub.add_parser("sweep", help="run methods over a budget range")
    sweep.add_argument("--instance", required=True)
    sweep.add_argument("--r-from", type=int, required=True)
    sweep.add_argument("--r-to", type=int, required=True)
    sweep.add_argument("--methods", default=",".join(METHODS),
                       help="comma-separated subset of gcs,ub,exact,cg,mwu")
    sweep.add_argument("--tol", type=float, default=1e-7)
    sweep.add_argument("--time-limit", type=float, default=600.0)
    sweep.add_argument("--epsilon", type=float, default=0.1)
    sweep.add_argument("--mwu-mode", default="exact",
                       choices=("exact", "greedy"))
    sweep.add_argument("--max-support", type=int, default=None)
    sweep.add_argument("--out", default=None,
                       help="base path; writes BASE.csv and BASE.json")

    gen = sub.add_parser("generate", help="write a synthetic instance")
    gen.add_argument("--kind", required=True,
                     choices=("random", "disjoint", "homogeneous", "grid"))
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--locations", type=int, default=None)
    gen.add_argument("--components", type=int, default=None)
    gen.add_argument("--density", type=float, default=None)
    gen.add_argument("--level", type=float, default=None)
    gen.add_argument("--components-per-location", type=int, default=None)
    gen.add_argument("--rows", type=int, default=None)
    gen.add_argument("--cols", type=int, default=None)
    gen.add_argument("--budget", type=int, default=None)
    gen.add_argument("--out", default=None)

    sched = sub.add_parser("schedule", help="sample a day-by-day schedule")
    sched.add_argument("--strategy", required=True,
                       help="strategy JSON (a solve report works)")
    sched.add_argument("--days", type=int, required=True)
    sched.add_argument("--seed", type=int, default=0)
    sched.add_argument("--mode", default="iid", choices=("iid", "cycle"))
    sched.add_argument("--out", default=None)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _report(payload: dict, out: str | None) -> None:
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", out)


def _cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    budget = args.r if args.r is not None else instance.budget
    if budget < 1:
        raise InputError(f"budget must be >= 1, got {budget}")
    require_valid(instance)
    started = time.perf_counter()
    payload: dict = {"method": args.method, "budget": budget}
    exit_code = EXIT_OK

    if args.method == "approx":
        sol = solve_approx(instance, budget, args.max_support)
        payload.update(
            value=sol.achieved_value, lower_bound=sol.lower_bound,
            upper_bound=sol.upper_bound, gap=sol.gap,
            relative_gap=sol.relative_gap,
            chosen_locations=list(sol.chosen_locations),
            witness_packing=list(sol.witness_packing),
            worst_components=list(sol.worst_components),
            node_basis_size=len(node_basis(sol.strategy)),
            support_size=sol.strategy.support_size(),
            strategy=strategy_to_dict(sol.strategy))
    elif args.method == "gcs":
        value, chosen, rho = solve_gcs(instance, budget, args.max_support)
        strategy = decompose(rho, budget)
        achieved, _ = evaluate_strategy(instance, strategy)
        payload.update(value=achieved, lower_bound=value,
                       chosen_locations=list(chosen),
                       node_basis_size=len(node_basis(strategy)),
                       support_size=strategy.support_size(),
                       strategy=strategy_to_dict(strategy))
    elif args.method == "ub":
        value, packing = upper_bound(instance, budget)
        payload.update(value=value, upper_bound=value,
                       witness_packing=list(packing))
    elif args.method == "exact":
        value, strategy = solve_exact(instance, budget)
        payload.update(value=value, lower_bound=value, upper_bound=value,
                       node_basis_size=len(node_basis(strategy)),
                       support_size=strategy.support_size(),
                       strategy=strategy_to_dict(strategy))
    elif args.method == "cg":
        result = solve_cg(instance, budget, tolerance=args.tol,
                          time_limit=args.time_limit)
        payload.update(value=result.value, iterations=result.iterations,
                       termination=result.termination,
                       columns_generated=len(result.columns),
                       node_basis_size=len(node_basis(result.strategy)),
                       support_size=result.strategy.support_size(),
                       strategy=strategy_to_dict(result.strategy))
        if result.termination == TIME_LIMIT:
            exit_code = EXIT_TIME_LIMIT
    elif args.method == "mwu":
        result = solve_mwu(instance, budget, epsilon=args.epsilon,
                           iterations=args.iterations, mode=args.mwu_mode)
        payload.update(value=result.achieved_value,
                       guarantee_slack=result.guarantee_slack,
                       eta=result.eta, iterations=result.iterations,
                       mwu_mode=result.mode,
                       node_basis_size=len(node_basis(result.strategy)),
                       support_size=result.strategy.support_size(),
                       strategy=strategy_to_dict(result.strategy))

    payload["runtime_seconds"] = time.perf_counter() - started
    _report(payload, args.out)
    return exit_code


def _cmd_sweep(args) -> int:
    instance = load_instance(args.instance)
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    limits = SweepLimits(cg_tolerance=args.tol,
                         cg_time_limit=args.time_limit,
                         mwu_epsilon=args.epsilon,
                         mwu_mode=args.mwu_mode,
                         max_support=args.max_support)
    if args.r_from < 1 or args.r_to < args.r_from:
        raise InputError("need 1 <= r-from <= r-to")
    report = run_sweep(instance, range(args.r_from, args.r_to + 1), methods,
                       limits)
    if args.out:
        Path(args.out + ".csv").write_text(report.to_csv())
        Path(args.out + ".json").write_text(report.to_json())
    else:
        sys.stdout.write(report.to_csv())
    timed_out = any("time_limit" in err for row in report.rows
                    for err in row.errors.values())
    return EXIT_TIME_LIMIT if timed_out else EXIT_OK


def _cmd_generate(args) -> int:
    params = {}
    mapping = {
        "locations": "num_locations", "components": "num_components",
        "density": "density", "level": "level",
        "components_per_location": "components_per_location",
        "rows": "rows", "cols": "cols", "budget": "budget",
    }
    for attr, param in mapping.items():
        value = getattr(args, attr)
        if value is not None:
            params[param] = value
    if args.kind == "grid" and "num_components" in params:
        pass  # grid reads num_components as the edge-count target
    instance = generate(args.kind, args.seed, **params)
    text = json.dumps(instance_to_dict(instance), indent=2, sort_keys=True) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _cmd_schedule(args) -> int:
    strategy = load_strategy(args.strategy)
    plan = sample_schedule(strategy, args.days, seed=args.seed, mode=args.mode)
    payload = {
        "days": args.days,
        "mode": args.mode,
        "seed": args.seed,
        "schedule": [list(p.locations) for p in plan],
    }
    _report(payload, args.out)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "solve": _cmd_solve,
        "sweep": _cmd_sweep,
        "generate": _cmd_generate,
        "schedule": _cmd_schedule,
    }
    try:
        return handlers[args.command](args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (InputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NetmonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
