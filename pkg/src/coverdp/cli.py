"""Command-line front end.

Subcommands: ``design`` (gen / verify / bounds / bench), ``estimate``,
``experiment``, ``audit``, ``lowerbound``.  Configuration is a single JSON
document; ``--seed`` overrides the config seed.  Exit codes: 0 on success,
1 on usage errors, 2 when a privacy audit or bound check fails.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone

from .data import load_dataset
from .designs import (
    erdos_spencer_upper_bound,
    generate_complete,
    generate_partition,
    generate_random,
    generate_single,
    load_design,
    save_design,
    schonheim_lower_bound,
    verify,
)
from .estimator import PlanChoice, estimate, plan_tradeoff
from .experiments import (
    AdversaryConfig,
    AuditConfig,
    BenchConfig,
    ExperimentConfig,
    _base_row,
    budget_from_dict,
    make_statistic,
    render_csv,
    run_design_bench,
    run_dp_audit,
    run_lowerbound_demo,
    run_statistical_experiment,
    write_csv,
)
from .losses import OutputGrid
from .mechanisms import NoiseSource

USAGE_ERROR = 1
AUDIT_FAILURE = 2


def _timestamp_comment() -> str:
    return "generated_at: " + datetime.now(timezone.utc).isoformat()


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _grid_from_config(obj) -> OutputGrid:
    if isinstance(obj, dict):
        return OutputGrid.from_range(obj["low"], obj["high"])
    return OutputGrid(tuple(obj))


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out", help="output file path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coverdp",
        description="Private black-box estimation with covering designs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    design = sub.add_parser("design", help="covering design utilities")
    dsub = design.add_subparsers(dest="design_command", required=True)

    gen = dsub.add_parser("gen", help="generate a design and write it to a file")
    gen.add_argument("-n", type=int, required=True)
    gen.add_argument("-m", type=int)
    gen.add_argument("-t", type=int, required=True)
    gen.add_argument(
        "--kind",
        choices=["random", "partition", "complete", "single"],
        default="random",
    )
    gen.add_argument("--cover-fail-prob", type=float, default=0.1)
    _add_common(gen)

    ver = dsub.add_parser("verify", help="exhaustively verify a design file")
    ver.add_argument("--design", required=True, help="design file to check")
    _add_common(ver)

    bounds = dsub.add_parser("bounds", help="print size bounds for (n, m, t)")
    bounds.add_argument("-n", type=int, required=True)
    bounds.add_argument("-m", type=int, required=True)
    bounds.add_argument("-t", type=int, required=True)
    _add_common(bounds)

    bench = dsub.add_parser("bench", help="sweep parameters, tabulate bounds vs generated k")
    _add_common(bench)

    est = sub.add_parser("estimate", help="one private estimate on a dataset file")
    est.add_argument("--data", required=True, help="dataset file, one record per line")
    _add_common(est)

    exp = sub.add_parser("experiment", help="statistical accuracy experiment")
    _add_common(exp)

    audit = sub.add_parser("audit", help="exact small-scale privacy audit")
    _add_common(audit)

    lower = sub.add_parser("lowerbound", help="hidden-set oracle hit-rate demo")
    _add_common(lower)

    return parser


def _cmd_design_gen(args) -> int:
    cfg = _load_config(args.config)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    if args.kind == "partition":
        design = generate_partition(args.n, args.t)
    elif args.kind == "complete":
        design = generate_complete(args.n, args.t)
    elif args.kind == "single":
        design = generate_single(args.n, args.t)
    else:
        if args.m is None:
            print("design gen --kind random requires -m", file=sys.stderr)
            return USAGE_ERROR
        design = generate_random(args.n, args.m, args.t, seed, args.cover_fail_prob)
    if args.out:
        save_design(design, args.out)
        print(f"wrote ({design.n}, {design.m}, {design.t}) design of size {design.k} to {args.out}")
    else:
        print(f"{design.n} {design.m} {design.t} {design.k}")
        for s in design.sets:
            print(" ".join(str(i) for i in sorted(s)))
    return 0


def _cmd_design_verify(args) -> int:
    design = load_design(args.design)
    ok = verify(design)
    print(f"({design.n}, {design.m}, {design.t}) design of size {design.k}: "
          f"{'valid' if ok else 'INVALID'}")
    return 0 if ok else AUDIT_FAILURE


def _cmd_design_bounds(args) -> int:
    lower = schonheim_lower_bound(args.n, args.m, args.t)
    upper = erdos_spencer_upper_bound(args.n, args.m, args.t) if args.t >= 1 else 1
    print(f"schonheim_lower_bound: {lower}")
    print(f"erdos_spencer_upper_bound: {upper}")
    return 0


def _cmd_design_bench(args) -> int:
    cfg_obj = _load_config(args.config)
    if args.seed is not None:
        cfg_obj["seed"] = args.seed
    cfg = BenchConfig.from_dict(cfg_obj)
    rows, times = run_design_bench(cfg)
    comments = [
        _timestamp_comment(),
        f"total_wall_ms: {sum(times):.3f}",
        "row_wall_ms: " + json.dumps([round(t, 3) for t in times]),
    ]
    _emit(args.out, rows, comments)
    return 0


def _cmd_estimate(args) -> int:
    cfg = _load_config(args.config)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    grid = _grid_from_config(cfg["grid"])
    budget = budget_from_dict(cfg["budget"])
    choice = PlanChoice.from_dict(cfg["plan"])
    x = load_dataset(args.data)
    plan = plan_tradeoff(x.n, grid, budget, choice, rng_seed=seed)
    stat = make_statistic(cfg.get("statistic", "median"), grid)
    started = time.perf_counter()
    report = estimate(stat, x, plan, NoiseSource(seed))
    wall = (time.perf_counter() - started) * 1000.0
    row = _base_row(
        experiment_id="estimate:cli",
        seed=seed,
        n=plan.n,
        m=plan.m,
        t=plan.t,
        k=plan.k,
        flavor=plan.flavor,
        epsilon_or_rho=budget.scale_label(),
        beta=budget.beta,
        y=report.y,
        sandwich_lo=report.sandwich_lo,
        sandwich_hi=report.sandwich_hi,
        sandwich_ok=report.sandwich_holds,
        oracle_calls=report.oracle_calls,
    )
    comments = [_timestamp_comment(), f"total_wall_ms: {wall:.3f}"]
    _emit(args.out, [row], comments)
    print(f"estimate: {report.y} (sandwich [{report.sandwich_lo}, {report.sandwich_hi}], "
          f"{report.oracle_calls} oracle calls)")
    return 0


def _cmd_experiment(args) -> int:
    cfg_obj = _load_config(args.config)
    if args.seed is not None:
        cfg_obj["seed"] = args.seed
    cfg = ExperimentConfig.from_dict(cfg_obj)
    result = run_statistical_experiment(cfg)
    comments = [_timestamp_comment()]
    comments += [f"summary_{key}: {value}" for key, value in result.summary.items() if key != "wall_ms"]
    comments.append(f"total_wall_ms: {result.summary['wall_ms']:.3f}")
    _emit(args.out, result.rows, comments)
    for key, value in result.summary.items():
        print(f"{key}: {value}")
    return 0


def _cmd_audit(args) -> int:
    cfg_obj = _load_config(args.config)
    seed = args.seed if args.seed is not None else cfg_obj.get("seed", 0)
    cfg = AuditConfig.from_dict(cfg_obj)
    started = time.perf_counter()
    report = run_dp_audit(cfg, seed=seed)
    wall = (time.perf_counter() - started) * 1000.0
    comments = [_timestamp_comment(), f"total_wall_ms: {wall:.3f}",
                f"pairs_checked: {report.pairs_checked}"]
    _emit(args.out, report.rows, comments)
    for eps in cfg.epsilons:
        print(f"epsilon={eps}: max log-ratio {report.max_log_ratio[eps]:.12f} "
              f"(bound {eps}); distance-{report.group_distance} "
              f"{report.group_log_ratio[eps]:.12f} (bound {report.group_distance * eps})")
    print("audit " + ("PASSED" if report.passed else "FAILED"))
    return 0 if report.passed else AUDIT_FAILURE


def _cmd_lowerbound(args) -> int:
    cfg_obj = _load_config(args.config)
    if args.seed is not None:
        cfg_obj["seed"] = args.seed
    cfg = AdversaryConfig.from_dict(cfg_obj)
    started = time.perf_counter()
    report = run_lowerbound_demo(cfg)
    wall = (time.perf_counter() - started) * 1000.0
    comments = [
        _timestamp_comment(),
        f"total_wall_ms: {wall:.3f}",
        f"combinatorial_bound: {report.combinatorial_bound!r}",
        f"collision_slack: {report.collision_slack!r}",
        f"implied_min_queries: {report.implied_min_queries!r}",
    ]
    _emit(args.out, report.rows, comments)
    print(f"hit rate {report.hit_rate} vs bound {report.combinatorial_bound} "
          f"+ slack {report.collision_slack} (se {report.standard_error:.2e})")
    print(f"implied minimum query count: {report.implied_min_queries}")
    print("lowerbound check " + ("PASSED" if report.passed else "FAILED"))
    return 0 if report.passed else AUDIT_FAILURE


def _emit(out: str | None, rows, comments) -> None:
    if out:
        write_csv(out, rows, comments)
    else:
        sys.stdout.write(render_csv(rows, comments))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        if args.command == "design":
            handler = {
                "gen": _cmd_design_gen,
                "verify": _cmd_design_verify,
                "bounds": _cmd_design_bounds,
                "bench": _cmd_design_bench,
            }[args.design_command]
            return handler(args)
        handler = {
            "estimate": _cmd_estimate,
            "experiment": _cmd_experiment,
            "audit": _cmd_audit,
            "lowerbound": _cmd_lowerbound,
        }[args.command]
        return handler(args)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
