#!/usr/bin/env python3
"""Discrepancy trends of f(n) mod q across an x ladder.

Runs one shared sieve pass per modulus and prints the per-x discrepancy,
total-variation distance, and coprime counts; optionally dumps the full
per-class reports.

Example:
    python scripts/distribution_trends.py --poly phi --q 5 7 11 --xmax 1e7
"""

import argparse
import sys
from pathlib import Path

from wudlab.lab import export_report, run_distribution_multi
from wudlab.poly import parse_poly
from wudlab.sieve import MultiplicativeSpec


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--poly", default="phi")
    ap.add_argument("--rule", default="euler-like")
    ap.add_argument("--q", type=int, nargs="+", default=[3, 5, 7, 11])
    ap.add_argument("--xmax", type=float, default=1e6)
    ap.add_argument("--ladder", type=int, default=3,
                    help="number of decade checkpoints ending at xmax")
    ap.add_argument("--out", type=Path, default=None, help="JSON report path")
    args = ap.parse_args()

    spec = MultiplicativeSpec(F=parse_poly(args.poly), rule=args.rule)
    xs = [int(args.xmax / 10**k) for k in reversed(range(args.ladder))]
    all_reports = []
    print(f"spec = {spec.label()}, x checkpoints = {xs}")
    print(f"{'q':>5} {'x':>10} {'N_coprime':>10} {'discrepancy':>12} {'tv':>8}")
    for q in args.q:
        reports = run_distribution_multi(spec, q, xs, J=1)
        all_reports.extend(reports)
        for rep in reports:
            print(f"{q:>5} {rep.x:>10} {rep.n_coprime:>10} "
                  f"{rep.discrepancy:>12.4f} {rep.tv_distance:>8.4f}")
    if args.out:
        export_report(all_reports, "json", args.out)
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
