"""Replica harness and the experiment suite built on it.

A replica is one coupling matrix solved in both directions.  Seeds come from
``derive_seed(seed_base, experiment, dist, n, replica)`` so that every number
can be regenerated from the configuration, and finished replicas are appended
to a JSON-lines journal that makes reruns resume instead of recompute.
"""
from __future__ import annotations

import json
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .analysis import BlockAccumulator, OrderingAccumulator, block_partition, optimum_stats
from .instance import Diluted, generate
from .rng import derive_seed
from .solvers import (DEFAULT_BETAS, DEFAULT_QS, Objective, brute_force, metropolis_solve,
                      pca_best)


@dataclass(frozen=True)
class SolverConfig:
    solver: str = "pca"
    sweeps: int = 2000
    betas: tuple = DEFAULT_BETAS
    qs: tuple = DEFAULT_QS
    ramp: float = 2.0
    metropolis_beta: float = 4.0

    def solve(self, j, objective, seed):
        if self.solver == "pca":
            return pca_best(j, objective, self.sweeps, seed,
                            betas=self.betas, qs=self.qs, ramp=self.ramp)
        if self.solver == "brute":
            return brute_force(j, objective)
        if self.solver == "metropolis":
            return metropolis_solve(j, self.metropolis_beta, self.sweeps, seed, objective)
        raise ValueError(f"unknown solver {self.solver!r}")


def dist_label(dist):
    if isinstance(dist, Diluted):
        return f"diluted-{dist.inner.name}"
    return dist.name


def dist_delta(dist):
    return dist.delta if isinstance(dist, Diluted) else 2.0


@dataclass
class Replica:
    experiment: str
    n: int
    dist: str
    delta: float
    replica: int
    seed: int
    m_min: float
    m_max: float
    alpha_min: float
    alpha_max: float
    sweeps_to_best_min: int
    sweeps_to_best_max: int
    wall_ms: float
    min_bits: str = field(repr=False, default="")
    max_bits: str = field(repr=False, default="")

    @property
    def key(self):
        return (self.experiment, self.dist, self.delta, self.n, self.replica)

    def configs(self):
        return _unpack(self.min_bits, self.n), _unpack(self.max_bits, self.n)

    def records(self):
        """Rows for :func:`rqubo.bench_io.emit_results`, one per objective."""
        base = dict(experiment=self.experiment, n=self.n, delta=self.delta, dist=self.dist,
                    seed=self.seed, wall_ms=self.wall_ms)
        return [
            dict(base, objective="min", m=self.m_min, alpha=self.alpha_min,
                 sweeps_to_best=self.sweeps_to_best_min),
            dict(base, objective="max", m=self.m_max, alpha=self.alpha_max,
                 sweeps_to_best=self.sweeps_to_best_max),
        ]


def _pack(bits):
    return np.packbits(bits).tobytes().hex()


def _unpack(text, n):
    return np.unpackbits(np.frombuffer(bytes.fromhex(text), np.uint8))[:n]


class Journal:
    """Append-only JSON-lines record of finished replicas."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def load(self):
        done = {}
        if self.path.exists():
            with self.path.open(encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        rep = Replica(**json.loads(line))
                    except (json.JSONDecodeError, TypeError):
                        # torn final line from an interrupted run
                        continue
                    done[rep.key] = rep
        return done

    def append(self, rep):
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(asdict(rep)) + "\n")


def instance_seed(seed_base, experiment, dist, n, replica):
    return derive_seed(seed_base, experiment, dist_label(dist), dist_delta(dist), n, replica)


def instance_for(rep, dist, seed_base, zero_diagonal=False):
    """Regenerate the coupling matrix a replica was solved on."""
    seed = instance_seed(seed_base, rep.experiment, dist, rep.n, rep.replica)
    return generate(rep.n, dist, seed, zero_diagonal)


def run_replica(experiment, n, dist, replica, seed_base, solver, zero_diagonal=False):
    seed = instance_seed(seed_base, experiment, dist, n, replica)
    t0 = time.perf_counter()
    j = generate(n, dist, seed, zero_diagonal)
    lo = solver.solve(j, Objective.MIN, derive_seed(seed, "solve"))
    hi = solver.solve(j, Objective.MAX, derive_seed(seed, "solve"))
    st = optimum_stats(j, lo, hi)
    return Replica(experiment, n, dist_label(dist), dist_delta(dist), replica, seed,
                   st.m_min, st.m_max, st.alpha_min, st.alpha_max,
                   lo.sweeps_to_best, hi.sweeps_to_best,
                   (time.perf_counter() - t0) * 1e3,
                   _pack(lo.best_config.bits), _pack(hi.best_config.bits))


def run_replicas(experiment, n, dist, count, seed_base, solver, threads=1, journal=None,
                 zero_diagonal=False, progress=None):
    """Solve ``count`` replicas, reusing any already present in ``journal``."""
    done = journal.load() if journal else {}
    key = lambda r: (experiment, dist_label(dist), dist_delta(dist), n, r)
    todo = [r for r in range(count) if key(r) not in done]

    def work(r):
        rep = run_replica(experiment, n, dist, r, seed_base, solver, zero_diagonal)
        if journal:
            journal.append(rep)
        if progress:
            progress(rep)
        return rep

    if threads > 1 and len(todo) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            fresh = list(pool.map(work, todo))
    else:
        fresh = [work(r) for r in todo]
    for rep in fresh:
        done[rep.key] = rep
    return [done[key(r)] for r in range(count)]


def _mean_se(x):
    x = np.asarray(x, dtype=float)
    se = x.std(ddof=1) / math.sqrt(len(x)) if len(x) > 1 else float("nan")
    return float(x.mean()), float(se)


def summarize(reps):
    """Means, standard errors and variances of a list of replicas at one size."""
    n = reps[0].n
    out = {"n": n, "replicas": len(reps), "dist": reps[0].dist, "delta": reps[0].delta}
    for f in ("m_min", "m_max", "alpha_min", "alpha_max"):
        x = np.array([getattr(r, f) for r in reps])
        out[f], out[f + "_se"] = _mean_se(x)
        out[f + "_var"] = float(x.var(ddof=1)) if len(x) > 1 else float("nan")
    both = [0.5 * (r.m_min + r.m_max) for r in reps]
    out["m"], out["m_se"] = _mean_se(both)
    out["alpha"], out["alpha_se"] = _mean_se([0.5 * (r.alpha_min + r.alpha_max) for r in reps])
    out["nm_max_var"] = out["m_max_var"] * n * n
    out["nm_min_var"] = out["m_min_var"] * n * n
    return out


def optimum_table(dist, sizes, replicas, solver, seed_base=0, threads=1, journal=None,
                  experiment="optimum"):
    """Mean per-particle optimum and ones fraction versus n."""
    rows, reps = [], []
    for n in sizes:
        rs = run_replicas(experiment, n, dist, replicas, seed_base, solver, threads, journal)
        reps += rs
        rows.append(summarize(rs))
    return rows, reps


def concentration_experiment(dist, sizes, replicas, solver, seed_base=0, threads=1,
                             journal=None):
    """Sample mean and variance of m_min and m_max per size."""
    if replicas < 30:
        raise ValueError("concentration needs at least 30 replicas per size")
    return optimum_table(dist, sizes, replicas, solver, seed_base, threads, journal,
                         experiment="concentration")


def universality_experiment(dists, n, replicas, solver, seed_base=0, threads=1, journal=None,
                            experiment="universality", z=1.96):
    """Aligned per-distribution statistics at one size with normal confidence intervals."""
    if len(dists) < 2:
        raise ValueError("universality needs at least two distributions")
    rows, reps = [], []
    for dist in dists:
        rs = run_replicas(experiment, n, dist, replicas, seed_base, solver, threads, journal)
        reps += rs
        row = summarize(rs)
        row["m_lo"], row["m_hi"] = row["m"] - z * row["m_se"], row["m"] + z * row["m_se"]
        rows.append(row)
    return rows, reps


def block_experiment(dist, n, replicas, solver, seed_base=0, threads=1, journal=None,
                     experiment="blocks"):
    reps = run_replicas(experiment, n, dist, replicas, seed_base, solver, threads, journal)
    acc = BlockAccumulator(n)
    for rep in reps:
        acc.add(instance_for(rep, dist, seed_base), block_partition(*rep.configs()))
    return acc.stats(), reps


def ordering_experiment(dist, n, replicas, solver, bins=64, seed_base=0, threads=1,
                        journal=None, experiment="ordering"):
    reps = run_replicas(experiment, n, dist, replicas, seed_base, solver, threads, journal)
    acc = OrderingAccumulator(bins)
    for rep in reps:
        acc.add(instance_for(rep, dist, seed_base), *rep.configs())
    return acc.curve(), reps
