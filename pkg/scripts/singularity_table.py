#!/usr/bin/env python3
"""Lebesgue vs harmonic mass of X(n, n) on the torus, odd n.

Prints one row per n: certified Lebesgue bracket, exact tree-walk harmonic
measure, and the running sums of both.  The Lebesgue sums grow like a
harmonic series while the harmonic ones stay below 2/3.
"""

import argparse
from fractions import Fraction

from rauzylab.torus_lab import measure_X, tree_harmonic_X


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nmax", type=int, default=41)
    ap.add_argument("--budget", type=int, default=50)
    args = ap.parse_args()

    leb_lo = leb_hi = nu_sum = Fraction(0)
    print(f"{'n':>4} {'l_lo':>10} {'l_hi':>10} {'nu':>12} {'sum l_lo':>10} {'sum nu':>10}")
    for n in range(1, args.nmax + 1, 2):
        lo, hi = measure_X(n, n, args.budget)
        nu = tree_harmonic_X(n)
        leb_lo += lo
        leb_hi += hi
        nu_sum += nu
        print(f"{n:>4} {float(lo):>10.6f} {float(hi):>10.6f} {float(nu):>12.4e} {float(leb_lo):>10.5f} {float(nu_sum):>10.7f}")


if __name__ == "__main__":
    main()
