"""Sup-distance to the uniform disk along s = 2^k for a few unit-variance h^2.

    python3 scripts/disk_convergence.py --kmax 10
"""

import argparse

from freebrown.measures import PositiveRealMeasure, free_poisson, point_mass
from freebrown.semigroup import disk_convergence_gap

MEASURES = {
    "haar (delta_1)": point_mass(1.0),
    "bernoulli {0.25, 1.75}": PositiveRealMeasure.from_atoms([(0.25, 0.5), (1.75, 0.5)]),
    "atom at 0 (0.5 delta_0 + 0.5 delta_2)": PositiveRealMeasure.from_atoms([(2.0, 0.5)], atom0=0.5),
    "free poisson(1)": free_poisson(1.0),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--kmax", type=int, default=10)
    ap.add_argument("--grid", type=int, default=512)
    args = ap.parse_args()

    for name, mu in MEASURES.items():
        gaps = [disk_convergence_gap(mu, 2.0**k, args.grid) for k in range(args.kmax + 1)]
        print(f"{name}")
        for k, g in enumerate(gaps):
            bound = "" if k == 0 else f"   haar bound 1/(2(s-1)) = {1 / (2 * (2**k - 1)):.2e}"
            print(f"  s=2^{k:<2d} gap={g:.3e}{bound}")


if __name__ == "__main__":
    main()
