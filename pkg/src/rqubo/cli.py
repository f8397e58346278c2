"""Command line: ``rqubo {generate,solve,experiment,bench}``.

Experiment configs are flat ``key = value`` text files (``#`` comments, lists
comma separated); see ``configs/`` for examples.  Recognized keys::

    experiment   optimum | concentration | universality | blocks | ordering
    dist         gaussian | exponential | uniform_int | diluted   (dists: list)
    delta        dilution exponent for diluted distributions
    sizes / n    list of sizes / single size
    replicas, sweeps, solver, betas, qs, ramp, bins, seed, zero_diagonal
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

from . import bench_io, experiments
from .energy import energy
from .errors import CapacityError, FormatError
from .instance import generate, make_distribution, symmetrize
from .solvers import (DEFAULT_BETAS, DEFAULT_QS, Objective, PcaParams, brute_force,
                      default_grid, metropolis_solve, pca_solve, pca_solve_batch, best_of,
                      worker_count)

EXPERIMENTS = ("optimum", "concentration", "universality", "blocks", "ordering")


@dataclass
class ExperimentConfig:
    experiment: str = "optimum"
    dist: str = "gaussian"
    dists: list = field(default_factory=list)
    delta: float = 2.0
    sizes: list = field(default_factory=lambda: [100])
    replicas: int = 100
    sweeps: int = 2000
    solver: str = "pca"
    betas: list = field(default_factory=lambda: list(DEFAULT_BETAS))
    qs: list = field(default_factory=lambda: list(DEFAULT_QS))
    ramp: float = 2.0
    bins: int = 64
    seed: int = 0
    zero_diagonal: bool = False

    def solver_config(self):
        return experiments.SolverConfig(self.solver, self.sweeps, tuple(self.betas),
                                        tuple(self.qs), self.ramp)

    def distributions(self):
        names = self.dists or [self.dist]
        return [make_distribution(d, self.delta if d == "diluted" else None) for d in names]


def _convert(kind, value):
    if kind is bool:
        return value.lower() in ("1", "true", "yes", "on")
    return kind(value)


def parse_config(text):
    """Parse the flat key-value format into an :class:`ExperimentConfig`."""
    cfg = ExperimentConfig()
    types = {f.name: f for f in fields(cfg)}
    list_types = {"dists": str, "sizes": int, "betas": float, "qs": float}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"expected key = value, got {line!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "n":
            key, value = "sizes", value
        if key not in types:
            raise FormatError(f"unknown key {key!r}", lineno)
        try:
            if key in list_types:
                value = [list_types[key](v.strip()) for v in value.split(",") if v.strip()]
            else:
                value = _convert(type(getattr(cfg, key)), value)
        except ValueError as exc:
            raise FormatError(f"bad value for {key}: {exc}", lineno) from None
        setattr(cfg, key, value)
    if cfg.experiment not in EXPERIMENTS:
        raise FormatError(f"unknown experiment {cfg.experiment!r}")
    return cfg


def _write_rows(path, rows):
    if not rows:
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: format(v, ".6g") if isinstance(v, float) else v for k, v in r.items()})


def _matrix_rows(name, mat):
    return [{"stat": name, "k": k + 1, "l": l + 1, "value": float(mat[k, l])}
            for k in range(4) for l in range(4)]


def cmd_generate(args):
    if args.n < 1:
        raise SystemExit("error: --n must be positive")
    dist = make_distribution(args.dist, args.delta, args.lo, args.hi)
    j = generate(args.n, dist, args.seed, args.zero_diagonal)
    out = Path(args.out) if args.out else Path(f"{args.dist}_n{args.n}_s{args.seed}.txt")
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8", newline="\n") as fh:
        bench_io.write_instance(symmetrize(j), fh)
    meta = (f"dist={args.dist} delta={experiments.dist_delta(dist)} seed={args.seed} "
            f"n={args.n} density={j.density():.6g} w={j.w!r}\n")
    Path(str(out) + ".meta").write_text(meta, encoding="utf-8")
    print(out)
    return 0


def _read_meta(path):
    meta = Path(str(path) + ".meta")
    if not meta.exists():
        return {}
    return dict(kv.split("=", 1) for kv in meta.read_text(encoding="utf-8").split())


def load_instance(path, rho=None, w=None):
    """Parse an instance file and attach W from --w, --rho (benchmark) or the sidecar."""
    with open(path, encoding="utf-8") as fh:
        j = bench_io.parse_instance(fh)
    if w is not None:
        return j.with_w(w)
    if rho is not None:
        return bench_io.normalize_for_benchmark(j, rho)
    meta = _read_meta(path)
    return j.with_w(float(meta["w"])) if "w" in meta else j


def _solve_one(j, args, objective):
    if args.solver == "brute":
        return brute_force(j, objective)
    if args.solver == "metropolis":
        return metropolis_solve(j, args.beta, args.sweeps, args.seed, objective)
    if args.grid == "default":
        grid = default_grid(args.sweeps, args.seed)
        return best_of(pca_solve_batch(j, grid, objective, worker_count(args.threads)))
    ramp = (args.beta, args.beta * args.ramp) if args.ramp != 1 else None
    return pca_solve(j, PcaParams(args.beta, args.q, args.sweeps, args.seed, ramp), objective)


def cmd_solve(args):
    j = load_instance(args.instance, args.rho, args.w)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    objectives = [Objective.MIN, Objective.MAX] if args.objective == "both" \
        else [Objective(args.objective)]
    rows = []
    for obj in objectives:
        res = _solve_one(j, args, obj)
        assert math.isclose(res.best_energy, energy(j, res.best_config), rel_tol=1e-9, abs_tol=1e-12)
        rows.append({
            "instance": Path(args.instance).name, "solver": args.solver, "objective": obj.value,
            "seed": args.seed, "n": j.n, "energy": repr(res.best_energy),
            "m": abs(res.best_energy) / j.n, "alpha": res.best_config.ones / j.n,
            "sweeps_to_best": res.sweeps_to_best,
        })
        (out / f"best_{obj.value}.txt").write_text(
            "".join(map(str, res.best_config.bits.tolist())) + "\n", encoding="utf-8")
        print(f"{obj.value}: energy={res.best_energy!r} m={abs(res.best_energy) / j.n:.6g}")
    _write_rows(out / "solve.csv", rows)
    return 0


def run_experiment(cfg, out, threads=1, progress=None):
    """Run one configured experiment, writing its CSVs into ``out``."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    journal = experiments.Journal(out / "journal.jsonl")
    solver = cfg.solver_config()
    dists = cfg.distributions()
    common = dict(seed_base=cfg.seed, threads=threads, journal=journal)
    name = cfg.experiment
    if name in ("optimum", "concentration"):
        fn = experiments.optimum_table if name == "optimum" else experiments.concentration_experiment
        rows, reps = [], []
        for d in dists:
            r, rs = fn(d, cfg.sizes, cfg.replicas, solver, **common)
            rows += r
            reps += rs
        _write_rows(out / f"{name}_summary.csv", rows)
    elif name == "universality":
        rows, reps = experiments.universality_experiment(dists, cfg.sizes[0], cfg.replicas,
                                                         solver, **common)
        _write_rows(out / "universality_summary.csv", rows)
    elif name == "blocks":
        stats, reps = experiments.block_experiment(dists[0], cfg.sizes[0], cfg.replicas,
                                                   solver, **common)
        rows = [{"stat": "alpha", "k": k + 1, "l": 0, "value": float(a)}
                for k, a in enumerate(stats.alphas)]
        rows += _matrix_rows("mu", stats.mu) + _matrix_rows("sigma_tilde", stats.sigma_tilde)
        _write_rows(out / "blocks_summary.csv", rows)
    else:
        curve, reps = experiments.ordering_experiment(dists[0], cfg.sizes[0], cfg.replicas,
                                                      solver, cfg.bins, **common)
        rows = [{"rank": float(curve.ranks[b]), "p_min": float(curve.p_min[b]),
                 "p_max": float(curve.p_max[b]), "p_joint": float(curve.p_joint[b]),
                 "ratio": float(curve.ratio[b]), "ratio_se": float(curve.ratio_se[b])}
                for b in range(len(curve.ranks))]
        _write_rows(out / "ordering_summary.csv", rows)
    with open(out / "results.csv", "w", newline="", encoding="utf-8") as fh:
        bench_io.emit_results([rec for rep in reps for rec in rep.records()], fh)
    return rows


def cmd_experiment(args):
    cfg = parse_config(Path(args.config).read_text(encoding="utf-8"))
    if args.seed is not None:
        cfg.seed = args.seed
    if args.replicas is not None:
        cfg.replicas = args.replicas

    def progress(rep):
        if args.verbose:
            print(f"{rep.experiment} n={rep.n} {rep.dist} #{rep.replica}: "
                  f"m_min={rep.m_min:.4f} m_max={rep.m_max:.4f}", file=sys.stderr)

    try:
        run_experiment(cfg, args.out, worker_count(args.threads), progress)
    except KeyboardInterrupt:
        print("interrupted; finished replicas are kept in the journal", file=sys.stderr)
        return 130
    print(Path(args.out))
    return 0


def cmd_bench(args):
    if args.instance:
        j = load_instance(args.instance, args.rho)
        res = best_of(pca_solve_batch(j, default_grid(args.sweeps, args.seed), Objective.MAX,
                                      worker_count(args.threads)))
        print(f"{Path(args.instance).name}: max={res.best_energy!r} m={res.best_energy / j.n:.6g}")
        return 0
    rows = [{"instance": r.instance_id, "n": r.n, "rho": r.rho, "best_known": r.best_known,
             "m_n": round(r.m_n, 6), "reported": rep, "diff": round(r.m_n - rep, 6)}
            for r, (*_, rep) in zip(bench_io.benchmark_records(), bench_io.BENCHMARK_TABLE)]
    w = csv.DictWriter(sys.stdout, list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: all cores, or $RQUBO_THREADS)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="output file or directory")

    p = argparse.ArgumentParser(prog="rqubo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write a random instance file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--dist", default="gaussian",
                   choices=["gaussian", "exponential", "uniform_int", "diluted"])
    g.add_argument("--delta", type=float, default=None)
    g.add_argument("--lo", type=int, default=-100)
    g.add_argument("--hi", type=int, default=100)
    g.add_argument("--zero-diagonal", action="store_true")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", parents=[common], help="optimize one instance file")
    s.add_argument("instance")
    s.add_argument("--solver", choices=["pca", "metropolis", "brute"], default="pca")
    s.add_argument("--objective", choices=["min", "max", "both"], default="both")
    s.add_argument("--grid", choices=["default", "none"], default="none")
    s.add_argument("--beta", type=float, default=4.0)
    s.add_argument("--q", type=float, default=2.0)
    s.add_argument("--ramp", type=float, default=2.0)
    s.add_argument("--sweeps", type=int, default=2000)
    s.add_argument("--rho", type=float, default=None, help="benchmark density for W")
    s.add_argument("--w", type=float, default=None, help="explicit normalization W")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("experiment", parents=[common], help="run a configured experiment")
    e.add_argument("config")
    e.add_argument("--replicas", type=int, default=None, help="override the config")
    e.add_argument("-v", "--verbose", action="store_true")
    e.set_defaults(func=cmd_experiment)

    b = sub.add_parser("bench", parents=[common], help="benchmark-table utilities")
    b.add_argument("--instance", default=None, help="solve a benchmark file for its maximum")
    b.add_argument("--rho", type=float, default=1.0)
    b.add_argument("--sweeps", type=int, default=2000)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("solve", "experiment") and args.out is None:
        args.out = "out"
    if args.seed is None and args.command != "experiment":
        args.seed = 0
    try:
        return args.func(args)
    except (CapacityError, FormatError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
