"""Statistics of optima: per-particle values, block structure, ordering curves."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energy import Configuration
from .instance import symmetrize

PUBLISHED_GAUSSIAN_BOUND = (0.562, 0.644)


@dataclass(frozen=True)
class OptimumStats:
    n: int
    m_min: float
    m_max: float
    alpha_min: float
    alpha_max: float

    @property
    def m(self):
        return 0.5 * (self.m_min + self.m_max)

    @property
    def alpha(self):
        return 0.5 * (self.alpha_min + self.alpha_max)


def optimum_stats(j, min_result, max_result):
    """Per-particle minimum/maximum and ones fractions of the two optimizers."""
    if min_result.n != j.n or max_result.n != j.n:
        raise ValueError("solver results do not belong to this instance")
    if min_result.objective.value != "min" or max_result.objective.value != "max":
        raise ValueError("expected a minimization result followed by a maximization result")
    n = j.n
    return OptimumStats(
        n,
        -min_result.best_energy / n,
        max_result.best_energy / n,
        min_result.best_config.ones / n,
        max_result.best_config.ones / n,
    )


def _bits(c):
    return c.bits if isinstance(c, Configuration) else np.asarray(c, dtype=np.uint8)


def block_partition(min_config, max_config):
    """Index sets I1..I4 keyed by (eta_min, eta_max) = (1,0), (1,1), (0,1), (0,0)."""
    a, b = _bits(min_config), _bits(max_config)
    if a.shape != b.shape:
        raise ValueError("minimizer and maximizer have different lengths")
    return (
        np.flatnonzero((a == 1) & (b == 0)),
        np.flatnonzero((a == 1) & (b == 1)),
        np.flatnonzero((a == 0) & (b == 1)),
        np.flatnonzero((a == 0) & (b == 0)),
    )


@dataclass
class BlockStats:
    """Block means and correlation proxies, cells with no data are NaN."""

    alphas: np.ndarray
    mu: np.ndarray
    sigma_tilde: np.ndarray
    n: int
    replica_count: int


class BlockAccumulator:
    """Streaming, mergeable sums over replicas for :class:`BlockStats`.

    For each of the 16 blocks a replica contributes its entry count ``c`` and
    entry sum ``S``.  ``mu`` averages the per-replica block means and
    ``sigma_tilde`` is the sample variance of ``S`` across replicas divided by
    the mean of ``c``, which is 1 for independent unit-variance entries.  The
    variance of ``S`` is kept Welford-style so partial accumulators merge.
    """

    def __init__(self, n=0):
        self.n = n
        self.replicas = 0
        self.alpha_sum = np.zeros(4)
        self.cells = np.zeros((4, 4))      # replicas with a non-empty block
        self.mean_sum = np.zeros((4, 4))   # sum of S / c
        self.c_sum = np.zeros((4, 4))
        self.s_mean = np.zeros((4, 4))
        self.s_m2 = np.zeros((4, 4))

    def add(self, j, partition):
        n = j.n
        self.n = self.n or n
        ind = np.zeros((n, 4))
        for k, idx in enumerate(partition):
            ind[idx, k] = 1.0
        counts = ind.sum(axis=0)
        if counts.sum() != n:
            raise ValueError("partition does not cover all indices exactly once")
        s = ind.T @ np.asarray(j.data @ ind)
        c = np.outer(counts, counts)
        ok = c > 0
        self.replicas += 1
        self.alpha_sum += counts / n
        self.cells += ok
        self.mean_sum[ok] += s[ok] / c[ok]
        self.c_sum[ok] += c[ok]
        d = s[ok] - self.s_mean[ok]
        self.s_mean[ok] += d / self.cells[ok]
        self.s_m2[ok] += d * (s[ok] - self.s_mean[ok])
        return self

    def merge(self, other):
        out = BlockAccumulator(self.n or other.n)
        out.replicas = self.replicas + other.replicas
        for name in ("alpha_sum", "cells", "mean_sum", "c_sum"):
            setattr(out, name, getattr(self, name) + getattr(other, name))
        na, nb, nt = self.cells, other.cells, out.cells
        with np.errstate(invalid="ignore", divide="ignore"):
            d = other.s_mean - self.s_mean
            out.s_mean = np.where(nt > 0, self.s_mean + d * nb / nt, 0.0)
            out.s_m2 = self.s_m2 + other.s_m2 + np.where(nt > 0, d * d * na * nb / nt, 0.0)
        return out

    def stats(self):
        with np.errstate(invalid="ignore", divide="ignore"):
            mu = np.where(self.cells > 0, self.mean_sum / self.cells, np.nan)
            var = self.s_m2 / (self.cells - 1)
            sig = np.where(self.cells > 1, var * self.cells / self.c_sum, np.nan)
        alphas = self.alpha_sum / max(self.replicas, 1)
        return BlockStats(alphas, mu, sig, self.n, self.replicas)


def block_stats(j, partition, accumulator=None):
    acc = accumulator if accumulator is not None else BlockAccumulator(j.n)
    acc.add(j, partition)
    return acc.stats()


def row_sum_order(j):
    """Indices sorted by ascending row sum of the symmetrized matrix, ties by index."""
    r = np.asarray(symmetrize(j).data.sum(axis=1)).ravel()
    return np.argsort(r, kind="stable")


@dataclass
class OrderingCurve:
    ranks: np.ndarray
    p_min: np.ndarray
    p_max: np.ndarray
    p_joint: np.ndarray
    ratio: np.ndarray
    ratio_se: np.ndarray
    replica_count: int


class OrderingAccumulator:
    """Per-bin membership frequencies of row-sum-ranked indices.

    Each replica contributes its per-bin means of the indicators
    ``eta_min = 1``, ``eta_max = 1`` and both; first and second moments are
    kept so the joint ratio gets a delta-method standard error.
    """

    def __init__(self, bins=64):
        if bins < 2:
            raise ValueError("need at least two bins")
        self.bins = bins
        self.replicas = 0
        self.s = np.zeros((3, bins))
        self.ss = np.zeros((3, 3, bins))

    def add(self, j, min_config, max_config):
        n = j.n
        order = row_sum_order(j)
        a = _bits(min_config)[order].astype(float)
        b = _bits(max_config)[order].astype(float)
        which = (np.arange(n) * self.bins) // n
        size = np.bincount(which, minlength=self.bins).astype(float)
        x = np.vstack([
            np.bincount(which, a, self.bins),
            np.bincount(which, b, self.bins),
            np.bincount(which, a * b, self.bins),
        ])
        with np.errstate(invalid="ignore", divide="ignore"):
            x = x / size
        if np.any(size == 0):
            raise ValueError(f"n={n} too small for {self.bins} bins")
        self.replicas += 1
        self.s += x
        self.ss += x[:, None, :] * x[None, :, :]
        return self

    def merge(self, other):
        if other.bins != self.bins:
            raise ValueError("bin counts differ")
        out = OrderingAccumulator(self.bins)
        out.replicas = self.replicas + other.replicas
        out.s = self.s + other.s
        out.ss = self.ss + other.ss
        return out

    def curve(self):
        r = self.replicas
        mean = self.s / r
        cov = (self.ss - r * mean[:, None, :] * mean[None, :, :]) / max(r - 1, 1) / r
        pa, pb, pc = mean
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = pc / (pa * pb)
            grad = np.vstack([-ratio / pa, -ratio / pb, 1.0 / (pa * pb)])
            var = np.einsum("ib,ijb,jb->b", grad, cov, grad)
        ranks = (np.arange(self.bins) + 0.5) / self.bins
        return OrderingCurve(ranks, pa, pb, pc, ratio, np.sqrt(np.maximum(var, 0)), r)


def ordering_curve(j, min_config, max_config, bins=64, accumulator=None):
    acc = accumulator if accumulator is not None else OrderingAccumulator(bins)
    acc.add(j, min_config, max_config)
    return acc.curve()


def entropy(x):
    """Binary entropy in nats with 0 log 0 = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"entropy needs x in [0, 1], got {x}")
    return -sum(p * math.log(p) for p in (x, 1.0 - x) if p > 0)


def bound_gap(alpha, m):
    # I(alpha) - m^2 / (2 alpha^2 (1 - alpha)^2), vectorized over alpha
    ent = -alpha * np.log(alpha) - (1 - alpha) * np.log1p(-alpha)
    return ent - m * m / (2 * alpha**2 * (1 - alpha) ** 2)


def bound_has_zero(m, step=1e-4):
    a = np.arange(step, 1.0, step)
    return bool(bound_gap(a, m).max() >= 0)


def gaussian_bound_constants(step=1e-4, tol=1e-6):
    """Extremal ``m`` beyond which ``I(a) - m^2/(2 a^2 (1-a)^2)`` has no zero in (0, 1).

    Bisection on ``m`` over a grid scan in ``a``; returns ``(m_star, a_star)``
    with ``a_star`` the grid maximizer of the gap at ``m_star``.
    """
    lo, hi = 0.0, 1.0
    while not bound_has_zero(lo, step) or bound_has_zero(hi, step):
        hi *= 2
    while hi - lo > tol * 1e-3:
        mid = 0.5 * (lo + hi)
        if bound_has_zero(mid, step):
            lo = mid
        else:
            hi = mid
    a = np.arange(step, 1.0, step)
    a_star = float(a[np.argmax(bound_gap(a, lo))])
    return lo, a_star
