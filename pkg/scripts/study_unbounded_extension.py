"""Approximate the unbounded extension of the radial field by a constant M on a
margin of width a, for a sweep of margins.

Prints one CSV block per margin, each preceded by a ``# a=...`` comment line.
"""

import argparse
import sys

from proxhull.study import StudyConfig, run_study, write_rows

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, nargs="+", default=[0.0, 0.2, 0.5, 1.0])
    ap.add_argument("--h", type=float, nargs="+", default=[0.01])
    ap.add_argument("--lambda", dest="lams", type=float, nargs="+", default=[1.0])
    ap.add_argument("--big-m", type=float, default=1e3)
    args = ap.parse_args()
    for a in args.a:
        cfg = StudyConfig(args.h, args.lams, oracle="ex2d_inf", extension=a, big_m=args.big_m)
        sys.stdout.write(f"# a={a:g}\n" + write_rows(run_study(cfg)))
