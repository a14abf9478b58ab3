"""Minimal dense linear algebra: SPD solves and symmetric eigendecomposition.

Matrices are plain C-contiguous float64 numpy arrays. Everything here is
deterministic: the same input array yields bit-identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonSymmetric, NotPositiveDefinite, NumericalError

SYMMETRY_TOL = 1e-10
JACOBI_OFF_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return `a` as a finite, 2-D, C-ordered float64 array."""
    m = np.ascontiguousarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericalError(f"{name} contains NaN or Inf entries")
    return m


def _require_square_symmetric(a: np.ndarray, name: str) -> np.ndarray:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
    if m.size and float(np.max(np.abs(m - m.T))) > SYMMETRY_TOL * scale:
        raise NonSymmetric(f"{name} is not symmetric within {SYMMETRY_TOL:g}")
    return m


def cholesky(a, block: int = 96) -> np.ndarray:
    """Lower-triangular Cholesky factor of a symmetric positive-definite matrix.

    Left-looking blocked factorization: panel updates go through matmul so
    large systems stay fast, the per-panel inner loop is plain rank-1 work.
    """
    m = _require_square_symmetric(a, "spd matrix")
    n = m.shape[0]
    work = 0.5 * (m + m.T)
    for j0 in range(0, n, block):
        j1 = min(j0 + block, n)
        if j0 > 0:
            work[j0:, j0:j1] -= work[j0:, :j0] @ work[j0:j1, :j0].T
        panel = work[j0:, j0:j1]
        width = j1 - j0
        for jj in range(width):
            pivot = panel[jj, jj]
            if not (pivot > 0.0) or not math.isfinite(pivot):
                raise NotPositiveDefinite(
                    f"pivot {pivot:.3e} at column {j0 + jj} is not positive"
                )
            d = math.sqrt(pivot)
            panel[jj, jj] = d
            panel[jj + 1:, jj] /= d
            if jj + 1 < width:
                panel[jj + 1:, jj + 1:width] -= np.outer(
                    panel[jj + 1:, jj], panel[jj + 1:width, jj]
                )
    return np.tril(work)


def solve_lower(lo: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Forward substitution: solve lo @ x = b for lower-triangular lo."""
    n = lo.shape[0]
    x = np.array(b, dtype=np.float64, copy=True)
    for i in range(n):
        if i:
            x[i] -= lo[i, :i] @ x[:i]
        x[i] /= lo[i, i]
    return x


def solve_upper(up: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Back substitution: solve up @ x = b for upper-triangular up."""
    n = up.shape[0]
    x = np.array(b, dtype=np.float64, copy=True)
    for i in range(n - 1, -1, -1):
        if i + 1 < n:
            x[i] -= up[i, i + 1:] @ x[i + 1:]
        x[i] /= up[i, i]
    return x


def solve_cholesky(factor: np.ndarray, b) -> np.ndarray:
    """Solve a x = b given the lower Cholesky factor of a. b may be 1-D or 2-D."""
    rhs = np.asarray(b, dtype=np.float64)
    if rhs.shape[0] != factor.shape[0]:
        raise DimensionMismatch(
            f"rhs length {rhs.shape[0]} does not match system size {factor.shape[0]}"
        )
    return solve_upper(factor.T, solve_lower(factor, rhs))


def solve_spd(a, b) -> np.ndarray:
    """Solve a x = b for symmetric positive-definite a via Cholesky.

    Residual satisfies ||a x - b||_inf <= 1e-8 (1 + ||b||_inf) for
    reasonably conditioned systems.
    """
    return solve_cholesky(cholesky(a), b)


def _offdiag_norm(a: np.ndarray) -> float:
    # Summed directly over zeroed-diagonal entries; a fro^2 - sum(diag^2)
    # subtraction would bottom out at sqrt(eps)*||a|| from cancellation.
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues (descending) and matching orthonormal column eigenvectors."""

    values: np.ndarray
    vectors: np.ndarray


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # Largest-magnitude entry of each column made positive (first index on ties).
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0.0] = 1.0
    return vectors * signs


def eig_sym(a) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    1e-12 * ||a||_F (at most 100 sweeps). Eigenvalues come back sorted
    descending; each eigenvector's largest-magnitude entry is positive.
    """
    m = _require_square_symmetric(a, "symmetric matrix")
    n = m.shape[0]
    work = 0.5 * (m + m.T)
    vecs = np.eye(n)
    if n > 1:
        fro = float(np.linalg.norm(work))
        tol = JACOBI_OFF_TOL * max(fro, np.finfo(np.float64).tiny)
        converged = False
        for sweep in range(JACOBI_MAX_SWEEPS + 1):
            if _offdiag_norm(work) <= tol:
                converged = True
                break
            if sweep == JACOBI_MAX_SWEEPS:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = work[p, q]
                    if apq == 0.0:
                        continue
                    app = work[p, p]
                    aqq = work[q, q]
                    tau = (aqq - app) / (2.0 * apq)
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                    c = 1.0 / math.sqrt(1.0 + t * t)
                    s = t * c
                    col_p = work[:, p].copy()
                    col_q = work[:, q].copy()
                    work[:, p] = c * col_p - s * col_q
                    work[:, q] = s * col_p + c * col_q
                    row_p = work[p, :].copy()
                    row_q = work[q, :].copy()
                    work[p, :] = c * row_p - s * row_q
                    work[q, :] = s * row_p + c * row_q
                    work[p, p] = app - t * apq
                    work[q, q] = aqq + t * apq
                    work[p, q] = 0.0
                    work[q, p] = 0.0
                    vec_p = vecs[:, p].copy()
                    vec_q = vecs[:, q].copy()
                    vecs[:, p] = c * vec_p - s * vec_q
                    vecs[:, q] = s * vec_p + c * vec_q
        if not converged:
            raise NumericalError("Jacobi eigensolver did not converge in 100 sweeps")
    values = np.diag(work).copy()
    order = np.argsort(-values, kind="stable")
    return EigenDecomposition(values=values[order], vectors=_fix_signs(vecs[:, order]))
