"""Per-particle optimum reached by each (beta, q) point of a grid.

Helps choose a grid for large N: prints the mean |H|/N per grid point and how
often each point supplied the best value over the grid.
"""
import argparse

import numpy as np

from rqubo import StandardGaussian, generate
from rqubo.solvers import Objective, default_grid, pca_solve_batch


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--instances", type=int, default=10)
    ap.add_argument("--sweeps", type=int, default=2000)
    ap.add_argument("--betas", type=float, nargs="+", default=[1, 2, 4])
    ap.add_argument("--qs", type=float, nargs="+", default=[0.5, 1, 2])
    ap.add_argument("--ramp", type=float, default=2.0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    grid = default_grid(args.sweeps, 0, args.betas, args.qs, args.ramp)
    m = np.zeros((args.instances, 2, len(grid)))
    for r in range(args.instances):
        j = generate(args.n, StandardGaussian(), 7_000 + r)
        for k, obj in enumerate((Objective.MIN, Objective.MAX)):
            runs = pca_solve_batch(j, default_grid(args.sweeps, r, args.betas, args.qs, args.ramp),
                                   obj, args.threads)
            m[r, k] = [abs(x.best_energy) / args.n for x in runs]
    wins = np.bincount(m.argmax(-1).ravel(), minlength=len(grid))
    print("beta,q,mean_m,wins")
    for g, p in enumerate(grid):
        print(f"{p.beta:g},{p.q:g},{m[..., g].mean():.4f},{wins[g]}")
    print(f"# best over grid: {m.max(-1).mean():.4f} over {args.instances} instances, n={args.n}")


if __name__ == "__main__":
    main()
