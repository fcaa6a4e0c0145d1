"""Per-draw bracket: exact Z-lattice supremum, certified torus bracket and the l1 envelope."""

import argparse

from dirichlet_sup.montecarlo import estimate_esup
from dirichlet_sup.numbertheory import sieve_primes
from dirichlet_sup.polynomial import e_tau_spec


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[100, 500, 2000])
    ap.add_argument("--tau", type=int, nargs="+", default=[4, 8, 0], help="0 means pi(N)")
    ap.add_argument("--sigma", type=float, nargs="+", default=[0.0, 0.25])
    ap.add_argument("--reps", type=int, default=50)
    ap.add_argument("--budget", type=int, default=1024)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    table = sieve_primes(max(args.n))
    print(f"{'N':>6} {'tau':>5} {'sigma':>5} {'sup_Z':>10} {'torus lo':>10} {'torus hi':>10} {'l1':>10} {'viol':>4}")
    for N in args.n:
        for tau in args.tau:
            tau = tau or table.pi(N)
            for sigma in args.sigma:
                spec = e_tau_spec(N, tau, table, sigma)
                rec = estimate_esup(spec, tau, "torus-grid", args.reps, args.seed, args.budget, 1, workers=args.workers)
                lo, hi = rec.bracket
                print(f"{N:6d} {tau:5d} {sigma:5.2f} {rec.lower_z:10.3f} {lo:10.3f} {hi:10.3f} {rec.l1:10.2f} {rec.violations:4d}")


if __name__ == "__main__":
    main()
