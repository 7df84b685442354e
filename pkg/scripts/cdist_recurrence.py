#!/usr/bin/env python3
"""How often, and how soon, sampled expansions return C-distributed to the start node."""

import argparse

from rauzylab.iet_core import torus
from rauzylab.surface_builder import build_phi0, cdist_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", nargs="+", default=["1,1", "0,4", "0,5"], help="g,m pairs")
    ap.add_argument("--C", type=int, default=100)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--max-steps", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    for spec in args.cases:
        g, m = map(int, spec.split(","))
        comb = torus() if (g, m) == (1, 1) else build_phi0(g, m)
        rep = cdist_experiment(comb, args.C, args.trials, args.max_steps, args.seed)
        print(
            f"({g},{m}) d={comb.d}: hit {float(rep['hit_fraction']):.3f}"
            f"  late {float(rep['late_hit_fraction']):.3f}  halted {rep['halted']}"
            f"  mean hits {rep['mean_hits']:.1f}"
        )
        for bucket, k in rep["histogram"].items():
            print(f"    first hit in {bucket:>12}: {k}")


if __name__ == "__main__":
    main()
