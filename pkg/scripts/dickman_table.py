"""Tabulate rho(u) next to log rho(u) / (-u log u), and the density Psi(N, N^(1/u))/N."""

import argparse
import math

from dirichlet_sup.dickman import DickmanTable
from dirichlet_sup.numbertheory import psi


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--umax", type=float, default=50.0)
    ap.add_argument("--n", type=int, default=10**6, help="N for the exact density column")
    args = ap.parse_args()

    t = DickmanTable.build(u_max=args.umax)
    print(f"collocation residual {t.residual_max():.2e}")
    print(f"{'u':>5} {'rho(u)':>14} {'logrho/(-u log u)':>18} {'Psi/N':>12}")
    for u in [1.5, 2, 2.5, 3, 4, 5, 6, 8, 10, 20, 30, 50]:
        if u > args.umax:
            break
        lr = t.log_rho(u)
        M = int(args.n ** (1 / u))
        dens = psi(args.n, M) / args.n if M >= 2 else float("nan")
        print(f"{u:5g} {math.exp(lr):14.6e} {lr / (-u * math.log(u)):18.4f} {dens:12.4e}")


if __name__ == "__main__":
    main()
