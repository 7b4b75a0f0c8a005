"""Recovery rate of the majority decoder as corruption grows.

    python3 scripts/decode_experiment.py --sizes 16 32 64 --trials 50
"""
import argparse
import sys

import numpy as np

from cayleydyn.decoder import corrupt, decode
from cayleydyn.tables import random_abelian


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 64, 128])
    ap.add_argument("--deltas", type=float, nargs="+", default=[0.03, 0.05, 0.07, 0.1, 0.2, 0.3])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    print("n      " + " ".join(f"d={d:<5}" for d in args.deltas))
    for n in args.sizes:
        cells = []
        for d in args.deltas:
            exact = fail = 0
            for _ in range(args.trials):
                t = random_abelian(n, rng)
                out = decode(corrupt(t, d, rng)[0])
                exact += out == t
                fail += out is None
            # exact / wrong-group; the rest returned None
            cells.append(f"{exact:3d}/{args.trials - exact - fail:<3d}")
        print(f"{n:<6} " + " ".join(f"{c:7}" for c in cells))
    print("cells: exact recoveries / wrong tables (remaining trials returned no table)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
