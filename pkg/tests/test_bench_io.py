import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rqubo.bench_io import (RESULT_FIELDS, BENCHMARK_TABLE, aggregate, benchmark_w, emit_results,
                            m_from_best_known, normalize_for_benchmark, parse_instance,
                            benchmark_records, write_instance)
from rqubo.errors import FormatError
from rqubo.instance import CouplingMatrix, UniformInteger, generate


def parse(text):
    return parse_instance(io.StringIO(text))


def write(j):
    buf = io.StringIO()
    write_instance(j, buf)
    return buf.getvalue()


def test_parse_small():
    j = parse("2 1\n1 2 -3\n")
    np.testing.assert_array_equal(j.to_dense(), [[0, -3], [-3, 0]])
    assert j.w == 1.0 and j.symmetric


def test_parse_diagonal_comments_blank_lines():
    j = parse("# header comment\n3 2\n\n1 1 5  # diag\n2 3 7\n")
    np.testing.assert_array_equal(j.to_dense(), [[5, 0, 0], [0, 0, 7], [0, 7, 0]])


@pytest.mark.parametrize("text,line", [
    ("2 1\n2 1 4\n", 2),          # i > j
    ("2 2\n1 2 1\n1 2 1\n", 3),   # duplicate
    ("2 1\n1 3 1\n", 2),          # out of range
    ("2 1\n1 2\n", 2),            # missing field
    ("2 1\n1 x 2\n", 2),
    ("2 1\n1 2 nan\n", 2),
    ("2\n", 1),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(FormatError) as err:
        parse(text)
    assert err.value.line == line


def test_parse_count_mismatch_and_empty():
    with pytest.raises(FormatError):
        parse("3 2\n1 2 1\n")
    with pytest.raises(FormatError):
        parse("# nothing\n")


def test_write_examples():
    assert write(CouplingMatrix.from_dense([[0, -3], [-3, 0]])) == "2 1\n1 2 -3\n"
    assert write(CouplingMatrix.from_dense(np.zeros((3, 3)))) == "3 0\n"
    with pytest.raises(ValueError):
        write_instance(CouplingMatrix.from_dense([[0, 1], [0, 0]]), io.StringIO())


def test_write_canonicalizes():
    raw = "3 3\n# c\n2 3 4\n1 1 -2\n1 3 0\n"
    assert write(parse(raw)) == "3 2\n1 1 -2\n2 3 4\n"


def test_write_float_full_precision():
    j = CouplingMatrix.from_dense([[0, 0.1], [0.1, 1 / 3]])
    back = parse(write(j))
    np.testing.assert_array_equal(back.to_dense(), j.to_dense())


@given(st.integers(1, 12), st.integers(0, 2**31), st.floats(0.05, 1.0))
def test_round_trip(n, seed, p):
    rng = np.random.default_rng(seed)
    a = np.triu(rng.integers(-100, 101, (n, n)) * (rng.random((n, n)) < p))
    a = a + np.triu(a, 1).T
    text = write(CouplingMatrix.from_dense(a))
    j = parse(text)
    np.testing.assert_array_equal(j.to_dense(), a)
    assert write(j) == text


def test_benchmark_sized_file_density():
    # a p3000.1-like file: N = 3000, upper-triangle pairs kept with probability 0.5
    n, rho = 3000, 0.5
    rng = np.random.default_rng(11)
    i, j = np.triu_indices(n)
    keep = rng.random(i.size) < rho
    v = rng.integers(-100, 101, keep.sum())
    v[v == 0] = 1
    body = np.column_stack([i[keep] + 1, j[keep] + 1, v])
    buf = io.StringIO()
    buf.write(f"{n} {len(body)}\n")
    np.savetxt(buf, body, fmt="%d")
    buf.seek(0)
    mat = parse_instance(buf)
    assert mat.n == 3000
    assert mat.density() == pytest.approx(rho, abs=0.005)


def test_table3_rows():
    recs = benchmark_records()
    assert len(recs) == len(BENCHMARK_TABLE) == 21
    for rec, row in zip(recs, BENCHMARK_TABLE):
        assert abs(rec.m_n - row[4]) <= 0.0005, rec.instance_id
    assert m_from_best_known(3000, 0.5, 3931583) == pytest.approx(0.412, abs=5e-4)
    assert m_from_best_known(7000, 1.0, 20446407) == pytest.approx(0.425, abs=5e-4)


def test_m_from_best_known_formula_and_errors():
    assert m_from_best_known(123, 0.3, 0) == 0
    n, rho, b = 4000, 0.8, 7801355
    assert m_from_best_known(n, rho, b) == pytest.approx(
        math.sqrt(6 / (rho * n * (201**2 - 1))) * b / n, rel=1e-14)
    for args in [(0, 0.5, 1), (10, 0.0, 1), (10, 1.5, 1), (10, 0.5, -1)]:
        with pytest.raises(ValueError):
            m_from_best_known(*args)


def test_benchmark_w_matches_variance_normalization():
    # symmetric uniform integers on -100..100 plus transpose: off-diagonal variance doubles
    assert benchmark_w(100, 1.0) == pytest.approx(
        1 / math.sqrt(100 * 2 * UniformInteger().variance), rel=1e-14)
    j = normalize_for_benchmark(generate(10, UniformInteger(), 1), 0.5)
    assert j.w == benchmark_w(10, 0.5)


def _rows(k):
    return [dict(experiment="opt", n=16, delta=2.0, dist="gaussian", seed=s, objective="min",
                 m=0.4 + 0.01 * s + 1e-9 / 3, alpha=0.6, sweeps_to_best=10 * s, wall_ms=1.5)
            for s in range(k)]


def test_emit_empty():
    buf = io.StringIO()
    emit_results([], buf)
    assert buf.getvalue() == ",".join(RESULT_FIELDS) + "\n"


def test_emit_single_record_round_trip():
    buf = io.StringIO()
    emit_results(_rows(1), buf)
    rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert rows[0]["m"] == format(_rows(1)[0]["m"], ".6g")
    assert float(rows[0]["m"]) == pytest.approx(0.4, rel=1e-6)
    assert [r["seed"] for r in rows] == ["0", "AGG", "AGG_SE"]


def test_agg_mean():
    recs = _rows(7)
    agg = aggregate(recs)
    mean = next(r for r in agg if r["seed"] == "AGG")
    assert abs(mean["m"] - np.mean([r["m"] for r in recs])) <= 1e-9
    se = next(r for r in agg if r["seed"] == "AGG_SE")
    assert se["m"] == pytest.approx(np.std([r["m"] for r in recs], ddof=1) / math.sqrt(7))
    buf = io.StringIO()
    emit_results(recs, buf)
    out = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert len(out) == 9
    assert float(out[7]["m"]) == pytest.approx(mean["m"], rel=1e-5)
