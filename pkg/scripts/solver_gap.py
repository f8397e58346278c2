"""How often does the default PCA grid reach the exact optimum at small N?

    python scripts/solver_gap.py --sizes 12 16 20 --instances 100
"""
import argparse
import time

import numpy as np

from rqubo import StandardGaussian, brute_force, generate
from rqubo.solvers import Objective, best_of, default_grid, pca_solve_batch


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[12, 16, 20])
    ap.add_argument("--instances", type=int, default=100)
    ap.add_argument("--sweeps", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print("n,objective,hit_rate,mean_rel_gap,seconds")
    for n in args.sizes:
        for obj in (Objective.MIN, Objective.MAX):
            t0 = time.perf_counter()
            hits, gaps = 0, []
            for r in range(args.instances):
                j = generate(n, StandardGaussian(), args.seed * 1_000_003 + 1000 * n + r)
                exact = brute_force(j, obj).best_energy
                got = best_of(pca_solve_batch(j, default_grid(args.sweeps, r), obj)).best_energy
                gap = (exact - got) * obj.sign / abs(exact) if exact else 0.0
                hits += gap <= 1e-12
                gaps.append(gap)
            print(f"{n},{obj.value},{hits / args.instances:.3f},{np.mean(gaps):.2e},"
                  f"{time.perf_counter() - t0:.1f}")


if __name__ == "__main__":
    main()
