"""Random coupling matrices: distributions, generation, normalization, symmetrization."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np
import scipy.sparse as sp

# Below this expected density instances are stored in CSR form.
SPARSE_THRESHOLD = 0.25


def normalization_constant(n, rho=1.0, variance=1.0):
    """W such that ``W * sum_ij J_ij`` has variance ``n``: ``1 / sqrt(rho n var)``."""
    if not (n > 0 and variance > 0 and 0 < rho <= 1):
        raise ValueError(f"need n > 0, variance > 0, 0 < rho <= 1; got {n}, {variance}, {rho}")
    return 1.0 / math.sqrt(rho * n * variance)


@dataclass(frozen=True)
class StandardGaussian:
    name = "gaussian"
    variance = 1.0

    def sample(self, rng, size):
        return rng.standard_normal(size)


@dataclass(frozen=True)
class ShiftedExponential:
    """``X - 1`` with ``X ~ Exp(1)``: mean 0, variance 1, heavy right tail."""

    name = "exponential"
    variance = 1.0

    def sample(self, rng, size):
        return rng.standard_exponential(size) - 1.0


@dataclass(frozen=True)
class UniformInteger:
    lo: int = -100
    hi: int = 100
    name = "uniform_int"

    def __post_init__(self):
        if not (self.lo < 0 < self.hi):
            raise ValueError(f"UniformInteger needs lo < 0 < hi, got [{self.lo}, {self.hi}]")

    @property
    def variance(self):
        # discrete uniform on lo..hi
        k = self.hi - self.lo + 1
        return (k * k - 1) / 12.0

    def sample(self, rng, size):
        return rng.integers(self.lo, self.hi, size=size, endpoint=True).astype(np.float64)


@dataclass(frozen=True)
class Diluted:
    """Entries of ``inner`` kept independently with probability ``n ** (delta - 2)``."""

    inner: Union[StandardGaussian, ShiftedExponential, UniformInteger] = field(
        default_factory=StandardGaussian
    )
    delta: float = 2.0
    name = "diluted"

    def __post_init__(self):
        if not (1.0 < self.delta <= 2.0):
            raise ValueError(f"dilution exponent must lie in (1, 2], got {self.delta}")
        if isinstance(self.inner, Diluted):
            raise ValueError("nested dilution is not supported")

    @property
    def variance(self):
        # variance of a kept entry; W absorbs the density separately
        return self.inner.variance

    def density(self, n):
        return float(n) ** (self.delta - 2.0)


Distribution = Union[StandardGaussian, ShiftedExponential, UniformInteger, Diluted]

DISTRIBUTIONS = {
    "gaussian": StandardGaussian,
    "exponential": ShiftedExponential,
    "uniform_int": UniformInteger,
}


def make_distribution(name, delta=None, lo=-100, hi=100):
    """Build a distribution from CLI/config style arguments."""
    if name == "diluted":
        return Diluted(StandardGaussian(), 2.0 if delta is None else float(delta))
    if name not in DISTRIBUTIONS:
        raise ValueError(f"unknown distribution {name!r}")
    inner = UniformInteger(lo, hi) if name == "uniform_int" else DISTRIBUTIONS[name]()
    if delta is not None and float(delta) != 2.0:
        return Diluted(inner, float(delta))
    return inner


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    """An ``n x n`` coupling matrix with its normalization constant.

    ``data`` is either a dense float64 array or a ``scipy.sparse.csr_array``;
    absent sparse entries are zero.  Instances are treated as immutable.
    """

    data: Union[np.ndarray, sp.csr_array]
    w: float = 1.0
    symmetric: bool = False
    density_hint: float = 1.0

    def __post_init__(self):
        shape = self.data.shape
        if len(shape) != 2 or shape[0] != shape[1] or shape[0] < 1:
            raise ValueError(f"coupling matrix must be square and non-empty, got {shape}")
        if not (math.isfinite(self.w) and self.w > 0):
            raise ValueError(f"normalization must be positive and finite, got {self.w}")
        if not 0 < self.density_hint <= 1:
            raise ValueError(f"density hint must lie in (0, 1], got {self.density_hint}")

    @classmethod
    def from_dense(cls, a, w=1.0, symmetric=None, density_hint=1.0):
        a = np.array(a, dtype=np.float64)
        if symmetric is None:
            symmetric = bool(np.array_equal(a, a.T))
        return cls(a, float(w), symmetric, density_hint)

    @property
    def n(self):
        return self.data.shape[0]

    @property
    def is_sparse(self):
        return sp.issparse(self.data)

    @property
    def nnz(self):
        if self.is_sparse:
            return int(np.count_nonzero(self.data.data))
        return int(np.count_nonzero(self.data))

    def density(self):
        """Realized fraction of nonzero entries."""
        return self.nnz / float(self.n) ** 2

    def entry(self, i, j):
        return float(self.data[i, j])

    def to_dense(self):
        if self.is_sparse:
            return self.data.toarray()
        return self.data

    def diagonal(self):
        return np.asarray(self.data.diagonal(), dtype=np.float64)

    def csr(self):
        """(indptr, indices, values) of a CSR view, int64 indices."""
        m = self.data if self.is_sparse else sp.csr_array(self.data)
        return m.indptr.astype(np.int64), m.indices.astype(np.int64), m.data.astype(np.float64)

    def negated(self):
        return replace(self, data=-self.data)

    def with_w(self, w):
        return replace(self, w=float(w))

    def without_diagonal(self):
        if self.is_sparse:
            m = self.data.tolil()
            m.setdiag(0.0)
            m = sp.csr_array(m)
            m.eliminate_zeros()
        else:
            m = self.data.copy()
            np.fill_diagonal(m, 0.0)
        return replace(self, data=m)


def _as_csr(m):
    m = sp.csr_array(m)
    m.sum_duplicates()
    m.sort_indices()
    return m


def symmetrize(j):
    """Return ``(J + J^T) / 2``; the quadratic form is unchanged."""
    if j.symmetric:
        return j
    if j.is_sparse:
        m = _as_csr((j.data + j.data.T) * 0.5)
        m.eliminate_zeros()
    else:
        m = (j.data + j.data.T) * 0.5
    return replace(j, data=m, symmetric=True)


def _generators(seed):
    # Independent Philox keys for values and dilution pattern.
    seed = int(seed) & ((1 << 64) - 1)
    values = np.random.Generator(np.random.Philox(key=seed))
    pattern = np.random.Generator(np.random.Philox(key=seed | (1 << 64)))
    return values, pattern


def dilution_row_counts(n, delta, seed):
    """Per-row nonzero counts drawn by :func:`generate` for a diluted instance."""
    _, pattern = _generators(seed)
    return pattern.binomial(n, float(n) ** (delta - 2.0), size=n)


def generate(n, dist, seed, zero_diagonal=False):
    """Draw an ``n x n`` coupling matrix with i.i.d. entries (diagonal included).

    Deterministic in ``(n, dist, seed)``.  Diluted instances keep each entry
    with probability ``n ** (delta - 2)`` and are stored sparse when that
    density is below :data:`SPARSE_THRESHOLD`.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    values, pattern = _generators(seed)
    if isinstance(dist, Diluted):
        rho = dist.density(n)
        counts = pattern.binomial(n, rho, size=n)
        cols = [np.sort(pattern.choice(n, size=c, replace=False)) for c in counts]
        indices = np.concatenate(cols).astype(np.int64) if n else np.empty(0, np.int64)
        indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        data = dist.inner.sample(values, int(indptr[-1])).astype(np.float64)
        m = sp.csr_array((data, indices, indptr), shape=(n, n))
        if rho >= SPARSE_THRESHOLD:
            m = m.toarray()
        j = CouplingMatrix(m, normalization_constant(n, rho, dist.variance), False, rho)
    else:
        a = dist.sample(values, (n, n)).astype(np.float64)
        j = CouplingMatrix(a, normalization_constant(n, 1.0, dist.variance), False, 1.0)
    return j.without_diagonal() if zero_diagonal else j
