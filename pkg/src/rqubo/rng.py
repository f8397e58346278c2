"""Counter-based random numbers shared by the sampling kernels.

Every draw is the SplitMix64 output at a fixed position of a keyed stream, so a
draw is addressed by ``(key, counter)`` instead of by call order.  The kernels
use ``counter = (sweep + 1) * n + site`` for the per-site draw of a sweep and
``counter = site`` for the initial configuration.
"""
import hashlib

import numba
import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1


@numba.njit(cache=True, nogil=True)
def mix64(z):
    z = np.uint64(z)
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@numba.njit(cache=True, nogil=True)
def uniform(key, counter):
    """Uniform double in [0, 1) at position ``counter`` of stream ``key``."""
    z = np.uint64(key) + (np.uint64(counter) + np.uint64(1)) * GAMMA
    return float(mix64(z) >> np.uint64(11)) * (1.0 / 9007199254740992.0)


def py_uniform(key, counter):
    """Pure-Python reference for :func:`uniform` (used by tests)."""
    z = (key + (counter + 1) * 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    z ^= z >> 31
    return (z >> 11) / 9007199254740992.0


def stream_key(seed):
    """Map a user seed to a well-mixed 64-bit stream key."""
    return np.uint64(mix64(np.uint64(seed & _MASK)))


def derive_seed(base, *parts):
    """Stable 63-bit seed from a base seed and a tuple of labels.

    Adding new labels (sizes, replicas) never changes seeds derived for
    existing ones.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(repr(parts).encode())
    return (int.from_bytes(h.digest(), "little") ^ (base & _MASK)) & ((1 << 63) - 1)
