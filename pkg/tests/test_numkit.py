import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from biwalk.errors import NoConvergenceError, NonHermitianError, NonSymmetricError
from biwalk.numkit import (
    cluster_values,
    eigh_hermitian,
    eigh_symmetric,
    exact_rank_det,
    expm_hermitian,
    max_abs,
)


def _sym(seed, n):
    a = np.random.default_rng(seed).standard_normal((n, n))
    return (a + a.T) / 2


def _herm(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


def _expm_taylor(a):
    # scaling and squaring with a long Taylor series, in extended precision
    a = np.asarray(a, dtype=np.clongdouble)
    s = max(0, int(math.ceil(math.log2(max(1.0, float(np.abs(a).sum(axis=1).max()))))) + 4)
    a = a / 2**s
    out = np.eye(a.shape[0], dtype=np.clongdouble)
    term = out.copy()
    for k in range(1, 30):
        term = term @ a / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out.astype(complex)


def test_eigh_matches_exact_eigenvalues():
    m = sympy.Matrix([[2, 1, 0], [1, 2, 1], [0, 1, 2]])
    exact = sorted(float(v) for v, k in m.eigenvals().items() for _ in range(k))
    dec = eigh_symmetric(np.array(m, dtype=float))
    assert np.allclose(dec.values, exact, atol=1e-13)


def test_eigh_path_adjacency_closed_form():
    n = 9
    a = np.diag(np.ones(n - 1), 1)
    a = a + a.T
    expected = sorted(2 * math.cos(math.pi * k / (n + 1)) for k in range(1, n + 1))
    assert np.allclose(eigh_symmetric(a).values, expected, atol=1e-13)


@pytest.mark.parametrize("seed", range(5))
def test_eigh_random_against_lapack(seed):
    a = _sym(seed, 12)
    dec = eigh_symmetric(a)
    assert np.allclose(dec.values, np.linalg.eigvalsh(a), atol=1e-12)
    assert max_abs(dec.vectors.T @ dec.vectors - np.eye(12)) < 1e-12
    assert max_abs(dec.reconstruct() - a) < 1e-12


def test_eigh_repeated_eigenvalue():
    j = np.ones((5, 5))
    dec = eigh_symmetric(j)
    assert np.allclose(dec.values, [0, 0, 0, 0, 5], atol=1e-13)
    assert max_abs(dec.reconstruct() - j) < 1e-12


def test_eigh_deterministic():
    a = _sym(7, 8)
    d1, d2 = eigh_symmetric(a), eigh_symmetric(a)
    assert np.array_equal(d1.values, d2.values) and np.array_equal(d1.vectors, d2.vectors)


def test_eigh_errors():
    with pytest.raises(NonSymmetricError):
        eigh_symmetric([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(NonSymmetricError):
        eigh_symmetric(np.ones((2, 3)))
    with pytest.raises(NoConvergenceError):
        eigh_symmetric(_sym(1, 10), max_sweeps=1)
    with pytest.raises(ValueError):
        eigh_symmetric([[np.nan]])


def test_eigh_empty():
    assert eigh_symmetric(np.zeros((0, 0))).dim == 0


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (6, 6), elements=st.floats(-10, 10)))
def test_eigh_property(a):
    a = (a + a.T) / 2
    dec = eigh_symmetric(a)
    scale = max(1.0, max_abs(a))
    assert np.all(np.diff(dec.values) >= 0)
    assert max_abs(dec.reconstruct() - a) < 1e-11 * scale
    assert max_abs(dec.vectors.T @ dec.vectors - np.eye(6)) < 1e-11


@pytest.mark.parametrize("seed", range(4))
def test_eigh_hermitian_random(seed):
    h = _herm(seed, 7)
    dec = eigh_hermitian(h)
    assert np.allclose(dec.values, np.linalg.eigvalsh(h), atol=1e-11)
    assert max_abs(dec.vectors.conj().T @ dec.vectors - np.eye(7)) < 1e-11
    assert max_abs(dec.reconstruct() - h) < 1e-11


def test_eigh_hermitian_degenerate():
    # i times a skew matrix with eigenvalues {0, +-sqrt 2}, each doubled
    s = np.zeros((6, 6))
    for u, v in [(0, 1), (1, 2), (3, 4), (4, 5)]:
        s[u, v], s[v, u] = 1, -1
    dec = eigh_hermitian(1j * s)
    r = math.sqrt(2)
    assert np.allclose(dec.values, [-r, -r, 0, 0, r, r], atol=1e-12)
    assert max_abs(dec.reconstruct() - 1j * s) < 1e-12


def test_eigh_hermitian_errors():
    with pytest.raises(NonHermitianError):
        eigh_hermitian([[0, 1j], [1j, 0]])


@pytest.mark.parametrize("t", [1.0, -0.3, 2.5])
def test_expm_against_series(t):
    h = _herm(3, 5)
    assert max_abs(expm_hermitian(h, t) - _expm_taylor(1j * t * h)) < 1e-10


def test_expm_pauli_closed_form():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    t = 0.7
    expected = math.cos(t) * np.eye(2) + 1j * math.sin(t) * x
    assert max_abs(expm_hermitian(x, t) - expected) < 1e-14


def test_expm_unitary_and_zero():
    u = expm_hermitian(_herm(4, 6), 3.0)
    assert max_abs(u.conj().T @ u - np.eye(6)) < 1e-12
    assert max_abs(expm_hermitian(np.zeros((3, 3)), 5.0) - np.eye(3)) == 0


def _cofactor_det(m):
    if len(m) == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _cofactor_det([row[:j] + row[j + 1:] for row in m[1:]])
               for j in range(len(m)))


@pytest.mark.parametrize("seed", range(8))
def test_exact_det_against_cofactor(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    m = rng.integers(-4, 5, (n, n))
    res = exact_rank_det(m)
    assert res.determinant == _cofactor_det(m.tolist())
    assert res.rank == np.linalg.matrix_rank(m)


def test_exact_large_entries_no_overflow():
    rng = np.random.default_rng(0)
    m = [[int(x) * 10**15 + 7 for x in row] for row in rng.integers(-9, 10, (8, 8))]
    assert exact_rank_det(np.array(m, dtype=object)).determinant == sympy.Matrix(m).det()


@pytest.mark.parametrize("shape,rank", [((3, 5), 2), ((5, 3), 2), ((4, 4), 3)])
def test_exact_rank_deficient(shape, rank):
    rng = np.random.default_rng(1)
    a = rng.integers(-3, 4, (shape[0], rank))
    b = rng.integers(-3, 4, (rank, shape[1]))
    m = a @ b
    res = exact_rank_det(m)
    assert res.rank == sympy.Matrix(m.tolist()).rank()
    assert res.determinant == (0 if shape[0] == shape[1] else None)


def test_exact_edge_cases():
    assert exact_rank_det(np.zeros((0, 0), dtype=int)).determinant == 1
    assert exact_rank_det([[0, 1], [1, 0]]).determinant == -1
    with pytest.raises(ValueError):
        exact_rank_det([[0.5, 1], [1, 0]])
    with pytest.raises(ValueError):
        exact_rank_det([1, 2, 3])


def test_cluster_values():
    assert cluster_values([0.0, 1e-12, 1.0, 1.0 + 5e-10, 2.0], 1e-9) == [[0, 1], [2, 3], [4]]
