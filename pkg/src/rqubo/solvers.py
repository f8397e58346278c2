"""Heuristic and exhaustive optimizers for H(J, eta) in both directions."""
from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from . import _kernels
from .energy import MAX_EXACT_N, Configuration, energy, local_fields
from .errors import CapacityError
from .instance import symmetrize
from .rng import derive_seed, stream_key

# Fields are recomputed from scratch this often to bound incremental drift.
REFRESH_SWEEPS = 1024

DEFAULT_BETAS = (1.0, 2.0, 4.0)
DEFAULT_QS = (0.5, 1.0, 2.0)


class Objective(str, enum.Enum):
    MIN = "min"
    MAX = "max"

    @property
    def sign(self):
        return 1.0 if self is Objective.MIN else -1.0


def _objective(obj):
    return obj if isinstance(obj, Objective) else Objective(str(obj).lower()[:3])


@dataclass(frozen=True)
class PcaParams:
    """Inverse temperature ``beta``, disagreement penalty ``q`` and run length.

    ``beta_ramp`` / ``q_ramp`` are optional ``(start, end)`` pairs that replace
    the constant value with a linear schedule over the sweeps.
    """

    beta: float
    q: float
    sweeps: int
    seed: int = 0
    beta_ramp: Optional[Tuple[float, float]] = None
    q_ramp: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if not (self.beta > 0 and self.q > 0):
            raise ValueError(f"beta and q must be positive, got {self.beta}, {self.q}")
        if self.sweeps < 1:
            raise ValueError(f"sweeps must be >= 1, got {self.sweeps}")
        for ramp in (self.beta_ramp, self.q_ramp):
            if ramp is not None and not (ramp[0] > 0 and ramp[1] > 0):
                raise ValueError(f"ramp endpoints must be positive, got {ramp}")

    def schedule(self):
        """Per-sweep ``(betas, qs)`` arrays."""
        return _ramp(self.beta, self.beta_ramp, self.sweeps), _ramp(self.q, self.q_ramp, self.sweeps)


def _ramp(value, ramp, sweeps):
    if ramp is None:
        return np.full(sweeps, float(value))
    return np.linspace(float(ramp[0]), float(ramp[1]), sweeps)


@dataclass
class SolveResult:
    best_energy: float
    best_config: Configuration
    objective: Objective
    sweeps_to_best: int = 0
    trajectory: Optional[np.ndarray] = field(default=None, repr=False)
    params: Optional[PcaParams] = None

    @property
    def n(self):
        return self.best_config.n


def default_grid(sweeps, seed, betas=DEFAULT_BETAS, qs=DEFAULT_QS, ramp=2.0):
    """The (beta, q) grid used by the experiments.

    With ``ramp`` set, beta rises linearly from its grid value to ``ramp`` times
    that value over the run.  Each grid point gets its own derived seed.
    """
    grid = []
    for b in betas:
        for q in qs:
            r = None if not ramp or ramp == 1 else (b, b * ramp)
            grid.append(PcaParams(b, q, sweeps, derive_seed(seed, "grid", b, q), beta_ramp=r))
    return grid


class _Prepared:
    """Symmetrized matrix unpacked into the kernel calling convention."""

    def __init__(self, j):
        js = symmetrize(j)
        self.j = j
        self.n = j.n
        self.w = js.w
        if js.is_sparse:
            self.use_dense = False
            self.mat = np.zeros((0, 0))
            self.indptr, self.indices, self.vals = js.csr()
        else:
            self.use_dense = True
            self.mat = np.ascontiguousarray(js.data, dtype=np.float64)
            self.indptr = np.zeros(self.n + 1, np.int64)
            self.indices = np.zeros(0, np.int64)
            self.vals = np.zeros(0)

    def args(self, sign):
        return self.mat, self.indptr, self.indices, self.vals, self.use_dense, sign * self.w


def _init_bits(init, n):
    if init is None:
        return np.zeros(0, np.int8)
    bits = init.bits if isinstance(init, Configuration) else np.asarray(init)
    if bits.shape != (n,):
        raise ValueError(f"initial configuration has shape {bits.shape}, expected ({n},)")
    return bits.astype(np.int8)


def pca_step(j_sym, eta, beta, q, seed, sweep=0):
    """One parallel update of all sites: sample tau given eta.

    Uses the draws the sampler would use at sweep ``sweep`` of a run seeded
    with ``seed``.
    """
    h = local_fields(j_sym, eta)
    bits = _init_bits(eta, j_sym.n)
    tau = np.empty(j_sym.n, np.int8)
    changed = np.empty(j_sym.n, np.int64)
    _kernels.sample_tau(h, bits, float(beta), float(q), stream_key(seed),
                        (sweep + 1) * j_sym.n, tau, changed)
    return Configuration(tau)


def _pca(prep, params, obj, init=None, record=False):
    betas, qs = params.schedule()
    best, _, t_best, traj = _kernels.pca_run(
        *prep.args(obj.sign), stream_key(params.seed), betas, qs,
        _init_bits(init, prep.n), record, REFRESH_SWEEPS,
    )
    config = Configuration(best)
    if record:
        traj = traj.copy()
        traj[:, 0] *= obj.sign
    return SolveResult(energy(prep.j, config), config, obj, int(t_best),
                       traj if record else None, params)


def pca_solve(j, params, objective=Objective.MIN, init=None, record=False):
    """Run the PCA sampler and return the best diagonal configuration visited.

    Maximization runs the same dynamics on ``-J~``.  ``record`` keeps, per
    sweep, the energy of the new configuration and the number of sites that
    changed.
    """
    return _pca(_Prepared(j), params, _objective(objective), init, record)


def worker_count(threads=None):
    if threads:
        return max(1, int(threads))
    env = os.environ.get("RQUBO_THREADS")
    return max(1, int(env)) if env else (os.cpu_count() or 1)


def pca_solve_batch(j, params_list, objective=Objective.MIN, threads=1):
    """Independent replicas on one instance; identical to sequential calls.

    Each replica owns its random stream and field vector, so the results do
    not depend on ``threads``.
    """
    if not params_list:
        raise ValueError("params_list must not be empty")
    prep = _Prepared(j)
    obj = _objective(objective)
    if threads <= 1 or len(params_list) == 1:
        return [_pca(prep, p, obj) for p in params_list]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda p: _pca(prep, p, obj), params_list))


def best_of(results):
    """Best result of a list (lowest energy for MIN, highest for MAX)."""
    sign = results[0].objective.sign
    return min(results, key=lambda r: sign * r.best_energy)


def pca_best(j, objective, sweeps, seed, threads=1, **grid_kw):
    """Best result over :func:`default_grid` for one objective."""
    return best_of(pca_solve_batch(j, default_grid(sweeps, seed, **grid_kw), objective, threads))


def metropolis_solve(j, beta, sweeps, seed, objective=Objective.MIN, init=None):
    """Single-site Metropolis baseline with sequential site order."""
    if sweeps < 0:
        raise ValueError("sweeps must be >= 0")
    prep = _Prepared(j)
    obj = _objective(objective)
    best, _, t_best = _kernels.metropolis_run(
        *prep.args(obj.sign), stream_key(seed), float(beta), int(sweeps),
        _init_bits(init, prep.n), REFRESH_SWEEPS,
    )
    config = Configuration(best)
    return SolveResult(energy(j, config), config, obj, int(t_best))


def brute_force(j, objective=Objective.MIN):
    """Exact optimum by Gray-code enumeration; ties go to the lexicographically smallest."""
    if j.n > MAX_EXACT_N:
        raise CapacityError(f"brute force limited to n <= {MAX_EXACT_N}, got {j.n}")
    obj = _objective(objective)
    js = symmetrize(j)
    a = np.ascontiguousarray(js.to_dense(), dtype=np.float64)
    # generous relative to accumulated rounding, tiny relative to energy gaps
    tol = 1e-10 * (1.0 + js.w * float(np.abs(a).sum()))
    code, _ = _kernels.gray_best(a, obj.sign * js.w, tol)
    config = Configuration.from_code(int(code), j.n)
    return SolveResult(energy(j, config), config, obj, 0)
