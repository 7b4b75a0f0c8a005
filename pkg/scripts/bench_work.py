"""Per-step work of random sessions against the rebuild budget.

    python3 scripts/bench_work.py --engine det --steps 200 cyclic:64 product:cyclic:4xcyclic:16
"""
import argparse
import csv
import math
import sys

import numpy as np

from cayleydyn.cli import bench_rows
from cayleydyn.tables import parse_spec


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("specs", nargs="+")
    ap.add_argument("--engine", choices=("det", "rand"), default="det")
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", help="write per-step rows here")
    args = ap.parse_args(argv)

    out_rows = []
    print(f"{'spec':28} {'n':>5} {'w':>3} {'W':>7} {'max rebuild':>12} {'ceil(W/w)':>10} {'max/W':>7} {'2/w':>6}")
    for spec in args.specs:
        t = parse_spec(spec, np.random.default_rng(args.seed))
        session, rows = bench_rows(t, args.engine, args.steps, None, args.seed)
        W = max(session.W_history)
        top = max(r["rebuild"] for r in rows)
        ratio = max(r["rebuild"] / r["W"] for r in rows if r["W"] >= session.w) if W >= session.w else float("nan")
        print(f"{spec:28} {t.n:5d} {session.w:3d} {W:7d} {top:12d} {math.ceil(W / session.w):10d} "
              f"{ratio:7.3f} {2 / session.w:6.3f}")
        out_rows.extend({"spec": spec, **{k: r[k] for k in ("clock", "rebuild", "change", "query", "W", "budget")}}
                        for r in rows)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            wr = csv.DictWriter(fh, fieldnames=list(out_rows[0]))
            wr.writeheader()
            wr.writerows(out_rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
