"""Shared argument handling for the study scripts."""

import argparse
import sys

from proxhull.study import StudyConfig, run_study, write_rows


def run(oracle, hs, lams, scheme, description, **extra):
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--h", type=float, nargs="+", default=hs)
    ap.add_argument("--lambda", dest="lams", type=float, nargs="+", default=lams)
    ap.add_argument("--scheme", choices=("moreau", "convex", "both"), default=scheme)
    ap.add_argument("--time-limit", type=float, default=120.0,
                    help="seconds per convex row before it prints '-'")
    ap.add_argument("--output", "-o", help="CSV path (default: stdout)")
    args = ap.parse_args()
    cfg = StudyConfig(args.h, args.lams, scheme=args.scheme, oracle=oracle,
                      convex_time_limit=args.time_limit, **extra)

    def progress(row):
        print(f"  h={row.h:g} lambda={row.lam:g} {row.scheme}: m={row.m} "
              f"err={row.linf_error} ({row.seconds:.2f}s)", file=sys.stderr)

    text = write_rows(run_study(cfg, progress), args.output)
    if not args.output:
        sys.stdout.write(text)
