"""Quantiles, absolute moments and tail constants of the stable family.

    python3 scripts/stable_table.py --betas 0 0.5 1 2
"""

import argparse
import math

from freebrown.stable import mu_beta_abs_moment, mu_beta_quantile, mu_beta_radial_density, nu_beta_moment


def fmt(x):
    return "inf" if x.unbounded else f"{x.value:.6f}"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--betas", type=float, nargs="+", default=[0.0, 0.5, 1.0, 2.0])
    args = ap.parse_args()

    print(f"{'beta':>5} {'Q(.25)':>9} {'Q(.5)':>9} {'Q(.9)':>9} {'E|Z|':>9} {'E|Z|^2':>9} {'nu^(1/4)':>9} {'tail':>9}")
    for b in args.betas:
        qs = [mu_beta_quantile(b, t) for t in (0.25, 0.5, 0.9)]
        nu = fmt(nu_beta_moment(b, 0.25)) if b > 0 else "-"
        # rho(r) * pi * beta * r^(2 + 2/beta) should approach 1 at large r
        tail = f"{mu_beta_radial_density(b, 1e4) * math.pi * b * 1e4 ** (2 + 2 / b):.5f}" if b > 0 else "-"
        row = [f"{q:9.5f}" for q in qs] + [f"{fmt(mu_beta_abs_moment(b, k)):>9}" for k in (1, 2)]
        print(f"{b:5.2f} " + " ".join(row) + f" {nu:>9} {tail:>9}")


if __name__ == "__main__":
    main()
