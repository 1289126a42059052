#!/usr/bin/env python3
"""Exact privacy audit of the pure mechanism on exhaustively small instances.

Every dataset over a three-point value universe (plus the null sentinel) is
enumerated; output laws are closed-form, so the reported ratios are exact.
Exits with status 2 if any neighbouring pair exceeds its epsilon.
"""

import argparse
import sys
from pathlib import Path

from coverdp.experiments import AuditConfig, run_dp_audit, write_csv


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--epsilons", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    parser.add_argument("--beta", type=float, default=0.1)
    parser.add_argument("--outdir", type=Path, default=Path("results"))
    args = parser.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)

    instances = [
        ("n4_partition_t1", AuditConfig(n=4, grid_points=(0.0, 1.0, 2.0),
                                        epsilons=tuple(args.epsilons), beta=args.beta,
                                        design_kind="partition", design_t=1)),
        ("n5_partition_t4", AuditConfig(n=5, grid_points=(0.0, 1.0, 2.0),
                                        epsilons=tuple(args.epsilons), beta=args.beta,
                                        design_kind="partition", design_t=4)),
        ("n5_random_m3_t2", AuditConfig(n=5, grid_points=(0.0, 1.0, 2.0),
                                        epsilons=tuple(args.epsilons), beta=args.beta,
                                        design_kind="random", design_t=2, design_m=3,
                                        design_seed=11)),
    ]
    all_passed = True
    for label, cfg in instances:
        report = run_dp_audit(cfg)
        out = args.outdir / f"audit_{label}.csv"
        write_csv(out, report.rows, [f"pairs_checked: {report.pairs_checked}"])
        status = "PASS" if report.passed else "FAIL"
        worst = max(report.max_log_ratio.values())
        print(f"{label}: {status}, {report.pairs_checked} pairs, worst log-ratio {worst:.9f} -> {out}")
        all_passed &= report.passed
    return 0 if all_passed else 2


if __name__ == "__main__":
    sys.exit(main())
