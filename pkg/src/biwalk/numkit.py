"""Dense linear-algebra kernel used by the rest of the package.

The eigensolvers are a plain cyclic Jacobi iteration; Hermitian problems are
solved through the real symmetric embedding ``[[Re H, -Im H], [Im H, Re H]]``.
Exact integer rank and determinant use fraction-free (Bareiss) elimination on
Python integers, so no overflow is possible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NoConvergenceError, NonHermitianError, NonSymmetricError

SYM_TOL = 1e-12
CLUSTER_TOL = 1e-9
JACOBI_TOL = 1e-13
MAX_SWEEPS = 100


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues with matching orthonormal (or unitary) columns."""

    values: np.ndarray
    vectors: np.ndarray
    dim: int

    def reconstruct(self) -> np.ndarray:
        v = self.vectors
        return (v * self.values) @ v.conj().T


@dataclass(frozen=True)
class ExactIntResult:
    rank: int
    determinant: int | None  # None for non-square input


def as_real_matrix(a, name: str = "matrix") -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # make the first entry of largest modulus in each column real positive
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        k = int(np.argmax(np.abs(col) > np.abs(col).max() * (1 - 1e-9)))
        ph = col[k] / abs(col[k])
        out[:, j] = col / ph
    return out


def _jacobi(a: np.ndarray, max_sweeps: int, tol: float) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n)
    scale = np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = math.sqrt(2.0 * float(np.sum(np.triu(a, 1) ** 2)))
        if off <= tol * scale:
            return np.diag(a).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-18 * (abs(a[p, p]) + abs(a[q, q])) or abs(apq) < 1e-300:
                    # below rounding level of the diagonal: drop it
                    a[p, q] = a[q, p] = 0.0
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    raise NoConvergenceError(
        f"Jacobi iteration did not converge in {max_sweeps} sweeps (n={n})"
    )


def eigh_symmetric(
    a,
    sym_tol: float = SYM_TOL,
    max_sweeps: int = MAX_SWEEPS,
    tol: float = JACOBI_TOL,
) -> EigenDecomposition:
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    a : array_like
        Square real matrix with ``max|A - A^T| < sym_tol * max(1, max|A|)``.
    sym_tol : float
        Symmetry tolerance.
    max_sweeps : int
        Sweep budget before :class:`NoConvergenceError` is raised.
    tol : float
        Off-diagonal Frobenius norm target, relative to ``||A||_F``.

    Returns
    -------
    EigenDecomposition
        Ascending eigenvalues; eigenvector columns are orthonormal with a
        deterministic sign convention.
    """
    m = as_real_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise NonSymmetricError(f"matrix is not square: {m.shape}")
    asym = max_abs(m - m.T)
    if asym >= sym_tol * max(1.0, max_abs(m)):
        raise NonSymmetricError(f"matrix is not symmetric (max|A-A^T| = {asym:.3e})")
    n = m.shape[0]
    if n == 0:
        return EigenDecomposition(np.zeros(0), np.zeros((0, 0)), 0)
    vals, vecs = _jacobi((m + m.T) / 2.0, max_sweeps, tol)
    order = np.argsort(vals, kind="stable")
    return EigenDecomposition(vals[order], _fix_signs(vecs[:, order]), n)


def cluster_values(values: Sequence[float], tol: float = CLUSTER_TOL) -> list[list[int]]:
    """Split ascending values into maximal runs whose consecutive gaps are < tol."""
    groups: list[list[int]] = []
    for i, x in enumerate(values):
        if groups and x - values[i - 1] < tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _pivoted_gram_schmidt(cols: np.ndarray, rank: int) -> np.ndarray:
    work = cols.copy()
    basis = []
    for _ in range(rank):
        norms = np.linalg.norm(work, axis=0)
        j = int(np.argmax(norms))
        u = work[:, j] / norms[j]
        basis.append(u)
        work = work - np.outer(u, u.conj() @ work)
    return np.column_stack(basis)


def eigh_hermitian(
    h,
    sym_tol: float = SYM_TOL,
    cluster_tol: float = CLUSTER_TOL,
) -> EigenDecomposition:
    """Eigendecomposition of a complex Hermitian matrix.

    Solves the doubled real problem, then collapses each eigenvalue cluster of
    size ``2d`` to ``d`` unitary columns via ``(x; y) -> x + i y``.
    """
    m = as_complex_matrix(h)
    n = m.shape[0]
    if m.shape[0] != m.shape[1]:
        raise NonHermitianError(f"matrix is not square: {m.shape}")
    herr = max_abs(m - m.conj().T)
    if herr >= sym_tol * max(1.0, max_abs(m)):
        raise NonHermitianError(f"matrix is not Hermitian (max|H-H*| = {herr:.3e})")
    if n == 0:
        return EigenDecomposition(np.zeros(0), np.zeros((0, 0), dtype=complex), 0)
    re, im = m.real, m.imag
    big = np.block([[re, -im], [im, re]])
    big = (big + big.T) / 2.0
    dec = eigh_symmetric(big, sym_tol=np.inf)
    tol = cluster_tol * max(1.0, float(np.max(np.abs(dec.values))))
    values, vectors = [], []
    for group in cluster_values(dec.values, tol):
        if len(group) % 2:
            raise NoConvergenceError(
                "odd cluster in the real embedding; raise cluster_tol or check input"
            )
        d = len(group) // 2
        real_cols = dec.vectors[:, group]
        cplx = real_cols[:n] + 1j * real_cols[n:]
        basis = _pivoted_gram_schmidt(cplx, d)
        values.extend([float(np.mean(dec.values[group]))] * d)
        vectors.append(basis)
    return EigenDecomposition(
        np.array(values), _fix_signs(np.column_stack(vectors)), n
    )


def expm_hermitian(h, t: float = 1.0, dec: EigenDecomposition | None = None) -> np.ndarray:
    """``exp(i t H)`` through the eigendecomposition of H."""
    if dec is None:
        dec = eigh_hermitian(h)
    v = dec.vectors
    return (v * np.exp(1j * t * dec.values)) @ v.conj().T


def exact_rank_det(m) -> ExactIntResult:
    """Rank (and determinant when square) of an integer matrix, exactly.

    Fraction-free Gaussian elimination: every intermediate entry is a minor of
    the input, so the divisions by the previous pivot are exact.
    """
    arr = np.asarray(m, dtype=object)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-dimensional integer matrix, got shape {arr.shape}")
    a = []
    for row in arr.tolist():
        if any(int(x) != x for x in row):
            raise ValueError("exact_rank_det needs integer entries")
        a.append([int(x) for x in row])
    nr, nc = arr.shape
    sign = 1
    prev = 1
    r = 0
    for c in range(nc):
        if r == nr:
            break
        piv = next((i for i in range(r, nr) if a[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
            sign = -sign
        p = a[r][c]
        for i in range(r + 1, nr):
            f = a[i][c]
            for j in range(c + 1, nc):
                a[i][j] = (a[i][j] * p - f * a[r][j]) // prev
            a[i][c] = 0
        prev = p
        r += 1
    det = None
    if nr == nc:
        det = sign * a[nr - 1][nc - 1] if (r == nr and nr > 0) else (1 if nr == 0 else 0)
    return ExactIntResult(rank=r, determinant=det)
