"""KS distance of truncated Haar unitaries against the compressed Brown measure.

    python3 scripts/truncated_haar.py --s 2 --sizes 256 512 1024 --trials 20
"""

import argparse
import math

import numpy as np

from freebrown.measures import point_mass
from freebrown.rmt import EnsembleSpec, run_experiment
from freebrown.semigroup import CompressionParams, compressed_brown


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--s", type=float, default=2.0)
    ap.add_argument("--sizes", type=int, nargs="+", default=[256, 512, 1024])
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--parallel", type=int, default=1)
    args = ap.parse_args()

    pred = compressed_brown(point_mass(1.0), CompressionParams(args.s, "sqrt_s"))
    print(f"{'n':>6} {'m':>6} {'pooled KS':>10} {'median KS':>10} {'seconds':>8}")
    for n in args.sizes:
        spec = EnsembleSpec("truncated_haar", n, args.trials, args.seed, s=args.s)
        pooled = run_experiment(spec, pred, math.sqrt(args.s), args.parallel)
        single = [
            run_experiment(EnsembleSpec("truncated_haar", n, 1, args.seed + i, s=args.s), pred, math.sqrt(args.s)).ks
            for i in range(args.trials)
        ]
        print(f"{n:>6} {spec.m:>6} {pooled.ks:>10.4f} {np.median(single):>10.4f} {pooled.wall_time_s:>8.1f}")


if __name__ == "__main__":
    main()
