"""Ratio of the Monte Carlo E sup |D| to N^(1-sigma)/log N over a grid of N."""

import argparse

from dirichlet_sup.montecarlo import ratio_table
from dirichlet_sup.numbertheory import sieve_primes


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmin", type=int, default=8, help="smallest N is 2**kmin")
    ap.add_argument("--kmax", type=int, default=14)
    ap.add_argument("--tau", default="pi(N)", help='"pi(N)", "sqrt(N)", "rs-optimal" or an integer')
    ap.add_argument("--sigma", type=float, default=0.0)
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    grid = [2**k for k in range(args.kmin, args.kmax + 1)]
    tau = int(args.tau) if args.tau.isdigit() else args.tau
    rows = ratio_table(grid, tau, args.sigma, "z-exact", args.reps, args.seed, sieve_primes(grid[-1]))
    print(f"{'N':>8} {'tau':>6} {'estimate':>12} {'stderr':>9} {'ratio':>7} {'upper':>12} {'l1':>10}")
    for r in rows:
        rec = r.record
        print(f"{r.N:8d} {r.tau:6d} {rec.estimate:12.4f} {rec.stderr:9.4f} {r.ratio:7.3f} {r.thm11_upper:12.2f} {r.l1:10.1f}")
    ratios = [r.ratio for r in rows]
    print(f"band max/min = {max(ratios) / min(ratios):.3f}  (rate N^(1-sigma)/log N, sigma={args.sigma})")


if __name__ == "__main__":
    main()
