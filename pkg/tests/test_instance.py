import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from oracles import enumerate_energies
from rqubo.energy import energy
from rqubo.instance import (CouplingMatrix, Diluted, ShiftedExponential, StandardGaussian,
                            UniformInteger, dilution_row_counts, generate, make_distribution,
                            normalization_constant, symmetrize)

st_matrix = st.integers(1, 7).flatmap(lambda n: hnp.arrays(
    np.float64, (n, n), elements=st.floats(-10, 10, allow_nan=False, width=64)))


@pytest.mark.parametrize("dist", [StandardGaussian(), ShiftedExponential(), UniformInteger(),
                                  Diluted(StandardGaussian(), 1.5)])
def test_generate_is_deterministic(dist):
    a, b = generate(40, dist, 1234), generate(40, dist, 1234)
    assert np.array_equal(a.to_dense(), b.to_dense())
    assert a.w == b.w
    assert not np.array_equal(a.to_dense(), generate(40, dist, 1235).to_dense())


def test_generate_small_gaussian_twice():
    a, b = generate(4, StandardGaussian(), 99), generate(4, StandardGaussian(), 99)
    assert a.to_dense().tobytes() == b.to_dense().tobytes()


@pytest.mark.parametrize("n,rho,var,expected", [
    (1, 1.0, 1.0, 1.0),
    (100, 1.0, 1.0, 0.1),
    (3000, 0.5, (201**2 - 1) / 6, math.sqrt(6 / (0.5 * 3000 * (201**2 - 1)))),
])
def test_normalization_constant(n, rho, var, expected):
    assert normalization_constant(n, rho, var) == pytest.approx(expected, rel=1e-12)


def test_normalization_constant_benchmark_value():
    assert normalization_constant(3000, 0.5, (201**2 - 1) / 6) == pytest.approx(3.1466e-4, abs=5e-8)


@pytest.mark.parametrize("args", [(0, 1, 1), (10, 0, 1), (10, 1.5, 1), (10, 1, 0), (-1, 1, 1)])
def test_normalization_constant_rejects(args):
    with pytest.raises(ValueError):
        normalization_constant(*args)


def test_distribution_parameter_errors():
    with pytest.raises(ValueError):
        UniformInteger(0, 5)
    with pytest.raises(ValueError):
        UniformInteger(-5, 0)
    with pytest.raises(ValueError):
        Diluted(StandardGaussian(), 1.0)
    with pytest.raises(ValueError):
        Diluted(StandardGaussian(), 2.1)
    with pytest.raises(ValueError):
        generate(0, StandardGaussian(), 1)
    with pytest.raises(ValueError):
        make_distribution("cauchy")


@pytest.mark.parametrize("dist", [StandardGaussian(), ShiftedExponential(), UniformInteger()])
def test_entry_moments(dist):
    j = generate(1000, dist, 7)
    x = j.to_dense().ravel()
    sd = math.sqrt(dist.variance)
    assert abs(x.mean()) <= 4 * sd / math.sqrt(x.size)
    assert x.var() == pytest.approx(dist.variance, rel=0.05)
    assert j.w == pytest.approx(1 / math.sqrt(1000 * dist.variance))


def test_uniform_integer_support():
    x = generate(300, UniformInteger(-3, 4), 5).to_dense()
    assert np.array_equal(np.unique(x), np.arange(-3, 5))


def test_shifted_exponential_support():
    assert generate(200, ShiftedExponential(), 5).to_dense().min() >= -1.0


@pytest.mark.parametrize("n,delta", [(2000, 1.5), (3000, 1.2), (500, 1.9)])
def test_dilution_fraction(n, delta):
    j = generate(n, Diluted(StandardGaussian(), delta), 21)
    p = n ** (delta - 2)
    sd = math.sqrt(p * (1 - p) / n**2)
    assert abs(j.density() - p) <= 4 * sd
    assert j.is_sparse == (p < 0.25)
    assert j.w == pytest.approx(1 / math.sqrt(p * n))
    assert j.density_hint == pytest.approx(p)


def test_dilution_density_table_n4000():
    # realized density of N=4000, delta=1.3 against the tabulated 0.003
    j = generate(4000, Diluted(StandardGaussian(), 1.3), 3)
    se = math.sqrt(0.003 * (1 - 0.003)) / 4000
    assert abs(j.density() - 0.003) <= 3 * se


def test_dilution_density_table_n16000():
    counts = dilution_row_counts(16000, 1.9, 3)
    rho = counts.sum() / 16000**2
    assert abs(rho - 0.3798) <= 4 * math.sqrt(0.3798 * 0.6202) / 16000


@pytest.mark.parametrize("n,delta,rho", [
    (4000, 1.9, 0.4363), (4000, 1.8, 0.1904), (4000, 1.3, 0.003),
    (8000, 1.9, 0.4071), (8000, 1.8, 0.1657), (8000, 1.3, 0.0019),
    (16000, 1.9, 0.3798), (16000, 1.8, 0.1443), (16000, 1.3, 0.0011),
    (128000, 1.3, 0.0003), (128000, 1.1, 3e-5),
])
def test_expected_density_table(n, delta, rho):
    p = Diluted(StandardGaussian(), delta).density(n)
    # tabulated values are rounded to the digits shown
    digits = len(f"{rho:.10f}".rstrip("0").split(".")[1])
    if rho < 1e-4:
        assert f"{p:.0e}" == f"{rho:.0e}"
    else:
        assert round(p, digits) == pytest.approx(rho)


def test_generate_keeps_diagonal_unless_asked():
    j = generate(30, StandardGaussian(), 2)
    assert np.count_nonzero(np.diag(j.to_dense())) == 30
    z = generate(30, StandardGaussian(), 2, zero_diagonal=True)
    assert np.count_nonzero(np.diag(z.to_dense())) == 0
    off = ~np.eye(30, dtype=bool)
    assert np.array_equal(j.to_dense()[off], z.to_dense()[off])
    zs = generate(300, Diluted(StandardGaussian(), 1.5), 2, zero_diagonal=True)
    assert np.all(zs.diagonal() == 0)


def test_symmetrize_by_definition():
    js = symmetrize(CouplingMatrix.from_dense([[0, 2], [0, 0]]))
    assert js.symmetric
    assert np.array_equal(js.to_dense(), [[0, 1], [1, 0]])


@given(st_matrix)
def test_symmetrize_is_exactly_symmetric_and_idempotent(a):
    js = symmetrize(CouplingMatrix.from_dense(a, symmetric=False))
    d = js.to_dense()
    assert np.array_equal(d, d.T)
    again = symmetrize(CouplingMatrix.from_dense(d, symmetric=False))
    assert np.array_equal(again.to_dense(), d)


def test_symmetrize_preserves_metadata():
    j = generate(200, Diluted(StandardGaussian(), 1.5), 4)
    js = symmetrize(j)
    assert (js.n, js.w, js.density_hint) == (j.n, j.w, j.density_hint)
    assert js.is_sparse
    assert np.array_equal(js.to_dense(), (j.to_dense() + j.to_dense().T) / 2)
    assert symmetrize(js) is js


def test_symmetrize_preserves_all_energies_8x8():
    j = generate(8, StandardGaussian(), 17)
    js = symmetrize(j)
    e = enumerate_energies(j.to_dense(), j.w)
    es = enumerate_energies(js.to_dense(), js.w)
    np.testing.assert_allclose(e, es, rtol=0, atol=1e-12)
    for code in range(256):
        bits = [(code >> (7 - i)) & 1 for i in range(8)]
        assert energy(j, bits) == pytest.approx(energy(js, bits), abs=1e-12)


def test_coupling_matrix_invariants():
    with pytest.raises(ValueError):
        CouplingMatrix(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        CouplingMatrix(np.zeros((2, 2)), w=0.0)
    with pytest.raises(ValueError):
        CouplingMatrix(np.zeros((2, 2)), w=float("inf"))
    assert CouplingMatrix.from_dense([[1, 2], [2, 1]]).symmetric
    assert not CouplingMatrix.from_dense([[1, 2], [3, 1]]).symmetric
