#!/usr/bin/env python3
"""Monte Carlo harmonic measure of X(n, n) under a random walk, with a log-linear fit.

The default walk is uniform on R, L and their inverses.  The tree model
(uniform on R, L) is available with --model tree and has exact answers 2^-n
for odd n to compare against.
"""

import argparse
import time

from rauzylab.torus_lab import measure_X
from rauzylab.walk_sim import XTarget, decay_fit, free_model, harmonic_estimates, tree_model, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", choices=["uniform4", "tree"], default="uniform4")
    ap.add_argument("--nmax", type=int, default=10)
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=9)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()

    mu = free_model() if args.model == "uniform4" else tree_model()
    ns = list(range(2, args.nmax + 1))
    t0 = time.perf_counter()
    ests = harmonic_estimates(mu, [XTarget(n, n) for n in ns], args.steps, args.trials, args.seed, args.threads)
    print(f"{'n':>3} {'nu_hat':>10} {'ci_lo':>10} {'ci_hi':>10} {'indet':>7} {'n*l_lo':>8} {'n*l_hi':>8}")
    for n, e in zip(ns, ests):
        lo, hi = measure_X(n, n, 50)
        print(f"{n:>3} {e.point:>10.5f} {e.ci_lo:>10.5f} {e.ci_hi:>10.5f} {e.indeterminate_frac:>7.4f} {float(n * lo):>8.4f} {float(n * hi):>8.4f}")
    fit = decay_fit(list(zip(ns, ests)))
    print(f"rate {fit.rate:.4f}  r2 {fit.r_squared:.4f}  curvature {fit.curvature:.2e}  ({time.perf_counter() - t0:.1f}s)")
    if args.csv:
        write_csv(args.csv, zip(ns, ests))


if __name__ == "__main__":
    main()
