"""Instance files, benchmark normalization and results CSV.

Instance format (UTF-8, ``\\n`` line ends)::

    N M
    i j v        # M lines, 1-based, i <= j, each undirected pair once

Blank lines and ``#`` comments are ignored.  Reading gives the symmetric
matrix ``J_ij = J_ji = v``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import FormatError
from .instance import SPARSE_THRESHOLD, CouplingMatrix

# Variance inside W for symmetric matrices with entries uniform on -100..100.
BENCH_VARIANCE = (201**2 - 1) / 6.0

RESULT_FIELDS = ["experiment", "n", "delta", "dist", "seed", "objective",
                 "m", "alpha", "sweeps_to_best", "wall_ms"]


@dataclass(frozen=True)
class BenchmarkRecord:
    instance_id: str
    n: int
    rho: float
    best_known: int
    m_n: float


# id, best known maximum, N, density, reported m_N
BENCHMARK_TABLE = [
    ("p3000.1", 3931583, 3000, 0.5, 0.412),
    ("p3000.2", 5193073, 3000, 0.8, 0.431),
    ("p3000.3", 5111533, 3000, 0.8, 0.424),
    ("p3000.4", 5761822, 3000, 1.0, 0.427),
    ("p3000.5", 5675625, 3000, 1.0, 0.421),
    ("p4000.1", 6181830, 4000, 0.5, 0.421),
    ("p4000.2", 7801355, 4000, 0.8, 0.420),
    ("p4000.3", 7741685, 4000, 0.8, 0.417),
    ("p4000.4", 8711822, 4000, 1.0, 0.420),
    ("p4000.5", 8908979, 4000, 1.0, 0.429),
    ("p5000.1", 8559680, 5000, 0.5, 0.417),
    ("p5000.2", 10836019, 5000, 0.8, 0.418),
    ("p5000.3", 10489137, 5000, 0.8, 0.404),
    ("p5000.4", 12252318, 5000, 1.0, 0.422),
    ("p5000.5", 12731803, 5000, 1.0, 0.439),
    ("p6000.1", 11384976, 6000, 0.5, 0.422),
    ("p6000.2", 14333855, 6000, 0.8, 0.420),
    ("p6000.3", 16132915, 6000, 1.0, 0.423),
    ("p7000.1", 14478676, 7000, 0.5, 0.426),
    ("p7000.2", 18249948, 7000, 0.8, 0.425),
    ("p7000.3", 20446407, 7000, 1.0, 0.425),
]


def benchmark_w(n, rho):
    """W for symmetric uniform-integer benchmark matrices: sqrt(6 / (rho n (201^2 - 1)))."""
    if n <= 0 or not 0 < rho <= 1:
        raise ValueError(f"need n > 0 and 0 < rho <= 1, got {n}, {rho}")
    return 1.0 / math.sqrt(rho * n * BENCH_VARIANCE)


def m_from_best_known(n, rho, best_known):
    if best_known < 0:
        raise ValueError("best known maximum must be non-negative")
    return benchmark_w(n, rho) * best_known / n


def benchmark_records():
    return [BenchmarkRecord(i, n, rho, best, m_from_best_known(n, rho, best))
            for i, best, n, rho, _ in BENCHMARK_TABLE]


def normalize_for_benchmark(j, rho):
    """Attach the benchmark W (density taken from metadata, not the file)."""
    return j.with_w(benchmark_w(j.n, rho))


def _fields(line, lineno, count):
    parts = line.split("#", 1)[0].split()
    if not parts:
        return None
    if len(parts) != count:
        raise FormatError(f"expected {count} fields, got {len(parts)}", lineno)
    return parts


def _int(tok, lineno):
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"not an integer: {tok!r}", lineno) from None


def _num(tok, lineno):
    try:
        v = float(tok)
    except ValueError:
        raise FormatError(f"not a number: {tok!r}", lineno) from None
    if not math.isfinite(v):
        raise FormatError(f"non-finite value {tok!r}", lineno)
    return v


def parse_instance(stream):
    """Read an instance file into a symmetric :class:`CouplingMatrix` with W = 1."""
    header = None
    rows, cols, vals = [], [], []
    seen = set()
    for lineno, line in enumerate(stream, 1):
        if header is None:
            parts = _fields(line, lineno, 2)
            if parts is None:
                continue
            header = (_int(parts[0], lineno), _int(parts[1], lineno))
            if header[0] < 1 or header[1] < 0:
                raise FormatError(f"bad header {line.strip()!r}", lineno)
            continue
        parts = _fields(line, lineno, 3)
        if parts is None:
            continue
        i, j = _int(parts[0], lineno), _int(parts[1], lineno)
        v = _num(parts[2], lineno)
        n = header[0]
        if not (1 <= i <= n and 1 <= j <= n):
            raise FormatError(f"index ({i}, {j}) outside 1..{n}", lineno)
        if i > j:
            raise FormatError(f"pair ({i}, {j}) must be listed with i <= j", lineno)
        if (i, j) in seen:
            raise FormatError(f"duplicate pair ({i}, {j})", lineno)
        seen.add((i, j))
        rows.append(i - 1)
        cols.append(j - 1)
        vals.append(v)
    if header is None:
        raise FormatError("missing header line")
    n, m = header
    if len(vals) != m:
        raise FormatError(f"header announces {m} entries, found {len(vals)}")
    r, c, v = np.array(rows, np.int64), np.array(cols, np.int64), np.array(vals)
    off = r != c
    rr = np.concatenate([r, c[off]])
    cc = np.concatenate([c, r[off]])
    vv = np.concatenate([v, v[off]])
    mat = sp.csr_array((vv, (rr, cc)), shape=(n, n))
    mat.sort_indices()
    density = max(mat.nnz / n**2, 1.0 / n**2)
    data = mat if density < SPARSE_THRESHOLD else mat.toarray()
    return CouplingMatrix(data, 1.0, True, min(density, 1.0))


def _format_value(v):
    if float(v).is_integer() and abs(v) < 2**53:
        return str(int(v))
    return repr(float(v))


def write_instance(j, stream):
    """Canonical form: pairs i <= j sorted by (i, j), zeros omitted."""
    if not j.symmetric:
        raise ValueError("only symmetric matrices can be written; symmetrize first")
    upper = sp.triu(sp.csr_array(j.data), format="coo")
    keep = upper.data != 0
    r, c, v = upper.row[keep], upper.col[keep], upper.data[keep]
    order = np.lexsort((c, r))
    stream.write(f"{j.n} {len(order)}\n")
    for k in order:
        stream.write(f"{r[k] + 1} {c[k] + 1} {_format_value(v[k])}\n")


def _g6(x):
    if isinstance(x, float):
        return format(x, ".6g")
    return x


def aggregate(records, key=("experiment", "n", "delta", "dist", "objective")):
    """Group mean and standard error of m, alpha, sweeps_to_best, wall_ms."""
    groups = {}
    for r in records:
        groups.setdefault(tuple(r[k] for k in key), []).append(r)
    out = []
    for gk, rows in groups.items():
        base = dict(zip(key, gk))
        mean = dict(base, seed="AGG")
        se = dict(base, seed="AGG_SE")
        for f in ("m", "alpha", "sweeps_to_best", "wall_ms"):
            x = np.array([float(r[f]) for r in rows])
            mean[f] = float(x.mean())
            se[f] = float(x.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else float("nan")
        out += [mean, se]
    return out


def emit_results(records, stream):
    """One CSV row per replica record plus AGG (mean) and AGG_SE rows per group."""
    records = list(records)
    w = csv.DictWriter(stream, RESULT_FIELDS, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in records + aggregate(records):
        w.writerow({k: _g6(r.get(k, "")) for k in RESULT_FIELDS})
