"""Compiled inner loops for the samplers and the exhaustive scans.

Matrices arrive either dense (``use_dense``) or as CSR triplets; the unused
representation is passed as an empty placeholder.  All kernels minimize
``ws * eta^T J eta`` where ``ws`` is the signed normalization, so maximization
is obtained by flipping the sign of ``ws``.  ``J`` must be symmetric: row ``i``
doubles as column ``i`` in the incremental field updates.
"""
import math

import numba
import numpy as np

from .rng import uniform


@numba.njit(cache=True, nogil=True)
def _fields(mat, indptr, indices, vals, use_dense, ws, eta, h):
    n = eta.shape[0]
    for i in range(n):
        acc = 0.0
        if use_dense:
            for j in range(n):
                if eta[j]:
                    acc += mat[i, j]
        else:
            for k in range(indptr[i], indptr[i + 1]):
                if eta[indices[k]]:
                    acc += vals[k]
        h[i] = ws * acc


@numba.njit(cache=True, nogil=True)
def _axpy_row(mat, indptr, indices, vals, use_dense, i, c, h):
    # h += c * J[i, :]
    if use_dense:
        for j in range(h.shape[0]):
            h[j] += c * mat[i, j]
    else:
        for k in range(indptr[i], indptr[i + 1]):
            h[indices[k]] += c * vals[k]


@numba.njit(cache=True, nogil=True)
def _diag(mat, indptr, indices, vals, use_dense, i):
    if use_dense:
        return mat[i, i]
    for k in range(indptr[i], indptr[i + 1]):
        if indices[k] == i:
            return vals[k]
    return 0.0


@numba.njit(cache=True, nogil=True)
def _energy_from_fields(h, eta):
    e = 0.0
    for i in range(eta.shape[0]):
        if eta[i]:
            e += h[i]
    return e


@numba.njit(cache=True, nogil=True)
def _init_config(key, n, init, eta):
    if init.shape[0] == n:
        for i in range(n):
            eta[i] = init[i]
    else:
        for i in range(n):
            eta[i] = 1 if uniform(key, i) < 0.5 else 0


@numba.njit(cache=True, nogil=True)
def sample_tau(h, eta, beta, q, key, base, tau, changed):
    """Draw every tau_i given eta; returns how many sites differ (listed in ``changed``).

    P(tau_i = 1) is proportional to exp(-beta h_i - q (1 - eta_i)) and
    P(tau_i = 0) to exp(-q eta_i); site ``i`` uses the draw at ``base + i``.
    """
    nc = 0
    for i in range(eta.shape[0]):
        # log-odds of tau_i = 1 against tau_i = 0
        x = -beta * h[i] + q * (2 * eta[i] - 1)
        if x >= 0.0:
            p = 1.0 / (1.0 + math.exp(-x))
        else:
            ex = math.exp(x)
            p = ex / (1.0 + ex)
        tau[i] = 1 if uniform(key, base + i) < p else 0
        if tau[i] != eta[i]:
            changed[nc] = i
            nc += 1
    return nc


@numba.njit(cache=True, nogil=True)
def pca_run(mat, indptr, indices, vals, use_dense, ws, key, betas, qs, init, record, refresh):
    """Run the parallel (PCA) dynamics; returns best config, its energy, sweep, trajectory.

    Every site of sweep ``t`` is resampled from the current fields with the
    draw at counter ``(t + 1) * n + i``.
    """
    n = indptr.shape[0] - 1 if not use_dense else mat.shape[0]
    sweeps = betas.shape[0]
    eta = np.empty(n, np.int8)
    _init_config(key, n, init, eta)
    h = np.empty(n)
    _fields(mat, indptr, indices, vals, use_dense, ws, eta, h)
    e = _energy_from_fields(h, eta)
    best_e = e
    best = eta.copy()
    t_best = 0
    traj = np.empty((sweeps if record else 0, 2))
    tau = np.empty(n, np.int8)
    changed = np.empty(n, np.int64)
    for t in range(sweeps):
        b = betas[t]
        q = qs[t]
        base = (t + 1) * n
        nc = sample_tau(h, eta, b, q, key, base, tau, changed)
        for c in range(nc):
            i = changed[c]
            d = tau[i] - eta[i]
            eta[i] = tau[i]
            _axpy_row(mat, indptr, indices, vals, use_dense, i, ws * d, h)
        if refresh > 0 and (t + 1) % refresh == 0:
            _fields(mat, indptr, indices, vals, use_dense, ws, eta, h)
        e = _energy_from_fields(h, eta)
        if record:
            traj[t, 0] = e
            traj[t, 1] = nc
        if e < best_e:
            best_e = e
            best[:] = eta
            t_best = t + 1
    return best, best_e, t_best, traj


@numba.njit(cache=True, nogil=True)
def metropolis_run(mat, indptr, indices, vals, use_dense, ws, key, beta, sweeps, init, refresh):
    """Sequential single-site Metropolis; returns best visited config, energy, sweep."""
    n = indptr.shape[0] - 1 if not use_dense else mat.shape[0]
    eta = np.empty(n, np.int8)
    _init_config(key, n, init, eta)
    h = np.empty(n)
    _fields(mat, indptr, indices, vals, use_dense, ws, eta, h)
    diag = np.empty(n)
    for i in range(n):
        diag[i] = ws * _diag(mat, indptr, indices, vals, use_dense, i)
    e = _energy_from_fields(h, eta)
    best_e = e
    best = eta.copy()
    t_best = 0
    for t in range(sweeps):
        base = (t + 1) * n
        for i in range(n):
            s = 1 - 2 * eta[i]
            d = 2.0 * s * h[i] + diag[i]
            if d <= 0.0 or uniform(key, base + i) < math.exp(-beta * d):
                eta[i] += s
                e += d
                _axpy_row(mat, indptr, indices, vals, use_dense, i, ws * s, h)
                if e < best_e:
                    best_e = e
                    best[:] = eta
                    t_best = t + 1
        if refresh > 0 and (t + 1) % refresh == 0:
            _fields(mat, indptr, indices, vals, use_dense, ws, eta, h)
            e = _energy_from_fields(h, eta)
    return best, best_e, t_best


@numba.njit(cache=True, nogil=True)
def _ctz(k):
    b = 0
    while (k >> b) & 1 == 0:
        b += 1
    return b


@numba.njit(cache=True, nogil=True)
def gray_best(mat, ws, tol):
    """Exhaustive Gray-code scan for the minimum of ``ws * eta^T J eta``.

    Site ``i`` is bit ``n - 1 - i`` of the returned code, so smaller codes are
    lexicographically smaller configurations; energies within ``tol`` count as
    ties and resolve toward the smaller code.
    """
    n = mat.shape[0]
    eta = np.zeros(n, np.int8)
    h = np.zeros(n)
    e = 0.0
    best_e = 0.0
    code = 0
    best_code = 0
    for k in range(1, 1 << n):
        b = _ctz(k)
        i = n - 1 - b
        s = 1 - 2 * eta[i]
        e += 2.0 * s * h[i] + ws * mat[i, i]
        eta[i] += s
        code ^= 1 << b
        c = ws * s
        for j in range(n):
            h[j] += c * mat[i, j]
        if e < best_e - tol:
            best_e = e
            best_code = code
        elif e <= best_e + tol and code < best_code:
            best_code = code
            if e < best_e:
                best_e = e
    return best_code, best_e


@numba.njit(cache=True, nogil=True)
def _gray_energies_pass(mat, ws, beta, shift, accumulate):
    n = mat.shape[0]
    eta = np.zeros(n, np.int8)
    h = np.zeros(n)
    e = 0.0
    top = 0.0
    total = math.exp(-shift) if accumulate else 0.0
    for k in range(1, 1 << n):
        i = n - 1 - _ctz(k)
        s = 1 - 2 * eta[i]
        e += 2.0 * s * h[i] + ws * mat[i, i]
        eta[i] += s
        c = ws * s
        for j in range(n):
            h[j] += c * mat[i, j]
        if accumulate:
            total += math.exp(beta * e - shift)
        elif beta * e > top:
            top = beta * e
    return top, total


@numba.njit(cache=True, nogil=True)
def gray_logsumexp(mat, ws, beta):
    """``log sum_eta exp(beta * ws * eta^T J eta)`` via two stabilized passes."""
    shift, _ = _gray_energies_pass(mat, ws, beta, 0.0, False)
    _, total = _gray_energies_pass(mat, ws, beta, shift, True)
    return shift + math.log(total)
