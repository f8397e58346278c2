"""Quadratic energy, local fields, single-flip deltas and exact Gibbs quantities."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import CapacityError
from .instance import symmetrize

# Largest n for which 2**n enumeration is attempted.
MAX_EXACT_N = 24


@dataclass(frozen=True, eq=False)
class Configuration:
    """Binary occupation vector eta in {0,1}^n."""

    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits)
        if b.ndim != 1 or (b.size and not np.isin(b, (0, 1)).all()):
            raise ValueError("configuration must be a 1-d vector of zeros and ones")
        b = b.astype(np.uint8)
        b.flags.writeable = False
        object.__setattr__(self, "bits", b)

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros(n, np.uint8))

    @classmethod
    def all_ones(cls, n):
        return cls(np.ones(n, np.uint8))

    @classmethod
    def from_code(cls, code, n):
        """Inverse of :attr:`code`: site ``i`` is bit ``n - 1 - i``."""
        return cls(np.array([(code >> (n - 1 - i)) & 1 for i in range(n)], np.uint8))

    @property
    def n(self):
        return self.bits.shape[0]

    @cached_property
    def ones(self):
        return int(self.bits.sum())

    @property
    def code(self):
        c = 0
        for b in self.bits:
            c = (c << 1) | int(b)
        return c

    def flipped(self, i):
        b = self.bits.copy()
        b[i] ^= 1
        return Configuration(b)

    def as_float(self):
        return self.bits.astype(np.float64)

    def __eq__(self, other):
        return isinstance(other, Configuration) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.tobytes())

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"Configuration({''.join(map(str, self.bits.tolist()))})"


def _vector(eta, n):
    x = eta.as_float() if isinstance(eta, Configuration) else np.asarray(eta, dtype=np.float64)
    if x.shape != (n,):
        raise ValueError(f"configuration of shape {x.shape} does not match n={n}")
    return x


def energy(j, eta):
    """``W * sum_ij J_ij eta_i eta_j`` including the diagonal."""
    x = _vector(eta, j.n)
    return float(j.w * (x @ (j.data @ x)))


def local_fields(j_sym, eta):
    """Fields ``h = W * J~ eta`` of a symmetrized matrix.

    With this scaling ``sum_i h_i eta_i`` is the energy of ``eta``.
    """
    if not j_sym.symmetric:
        raise ValueError("local fields need a symmetrized matrix; call symmetrize() first")
    x = _vector(eta, j_sym.n)
    return j_sym.w * np.asarray(j_sym.data @ x, dtype=np.float64)


def delta_flip(j_sym, h, eta, i):
    """Exact energy change from flipping site ``i`` given current fields ``h``."""
    bits = eta.bits if isinstance(eta, Configuration) else np.asarray(eta)
    if not 0 <= i < bits.shape[0]:
        raise IndexError(f"site {i} out of range for n={bits.shape[0]}")
    s = 1 - 2 * int(bits[i])
    return 2.0 * s * float(h[i]) + j_sym.w * j_sym.entry(i, i)


def apply_flip(j_sym, h, bits, i):
    """Flip ``bits[i]`` in place and update ``h`` in place; returns the delta."""
    d = delta_flip(j_sym, h, bits, i)
    s = 1 - 2 * int(bits[i])
    bits[i] ^= 1
    row = j_sym.data[[i], :].toarray()[0] if j_sym.is_sparse else j_sym.data[i]
    h += (j_sym.w * s) * row
    return d


def _small_dense(j):
    if j.n > MAX_EXACT_N:
        raise CapacityError(f"exhaustive enumeration limited to n <= {MAX_EXACT_N}, got {j.n}")
    return np.ascontiguousarray(symmetrize(j).to_dense(), dtype=np.float64)


def exact_free_energy(j, beta):
    """``beta^-1 log sum_eta exp(beta H(eta))`` by enumeration of all 2**n states."""
    if beta == 0:
        raise ValueError("beta must be nonzero")
    a = _small_dense(j)
    return _kernels.gray_logsumexp(a, float(j.w), float(beta)) / beta
