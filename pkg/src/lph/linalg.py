"""Dense complex linear algebra: LU with partial pivoting, determinants,
and construction of the normalization matrix that maps a vector to e_n.
"""

from __future__ import annotations

import numpy as np

PIVOT_REL_TOL = 1e-14


class SingularMatrixError(ValueError):
    pass


class InvalidBetaError(ValueError):
    pass


def lu_factor(A):
    """Row-equilibrated LU factorization with partial pivoting.

    Rows are scaled to unit max magnitude first (polynomial Jacobians mix
    wildly different row scales), then factored.  Returns
    (LU, piv, sign, scales); raises SingularMatrixError when a pivot falls
    below PIVOT_REL_TOL relative to the equilibrated matrix norm.
    """
    A = np.array(A, dtype=complex)
    n, m = A.shape
    if n != m:
        raise ValueError("matrix must be square")
    scales = np.abs(A).max(axis=1)
    if np.any(scales == 0):
        raise SingularMatrixError("zero row")
    A /= scales[:, None]
    norm = float(np.abs(A).sum(axis=1).max()) if n else 0.0
    threshold = PIVOT_REL_TOL * max(norm, 1e-300)
    piv = np.arange(n)
    sign = 1.0 + 0j
    for col in range(n):
        p = col + int(np.argmax(np.abs(A[col:, col])))
        if abs(A[p, col]) < threshold:
            raise SingularMatrixError(f"pivot {abs(A[p, col]):.3e} below threshold")
        if p != col:
            A[[col, p]] = A[[p, col]]
            piv[[col, p]] = piv[[p, col]]
            sign = -sign
        A[col + 1 :, col] /= A[col, col]
        A[col + 1 :, col + 1 :] -= np.outer(A[col + 1 :, col], A[col, col + 1 :])
    return A, piv, sign, scales


def lu_solve_factored(factored, b):
    LU, piv, _, scales = factored
    b = np.asarray(b, dtype=complex)
    x = (b / scales)[piv]
    n = LU.shape[0]
    for i in range(1, n):
        x[i] -= LU[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - LU[i, i + 1 :] @ x[i + 1 :]) / LU[i, i]
    return x


def lu_solve(A, b):
    """Solve A x = b via LU with partial pivoting."""
    A = np.asarray(A, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if A.shape[0] != b.shape[0]:
        raise ValueError("dimension mismatch")
    return lu_solve_factored(lu_factor(A), b)


def determinant(A) -> complex:
    A = np.asarray(A, dtype=complex)
    try:
        LU, _, sign, scales = lu_factor(A)
    except SingularMatrixError:
        return 0j
    return complex(sign * np.prod(np.diag(LU)) * np.prod(scales))


def beta_normalizer(beta) -> np.ndarray:
    """Invertible A with A @ beta = (0, ..., 0, 1)."""
    beta = np.asarray(beta, dtype=complex)
    n = beta.shape[0]
    if n == 0 or np.abs(beta).max() == 0:
        raise InvalidBetaError("beta must be a nonzero vector")
    p = int(np.argmax(np.abs(beta)))
    # Basis matrix B: unit vectors (skipping e_p) in the first n-1 columns,
    # beta last.  det(B) = +/- beta[p] != 0, and B @ e_n = beta.
    B = np.zeros((n, n), dtype=complex)
    cols = [j for j in range(n) if j != p]
    for idx, j in enumerate(cols):
        B[j, idx] = 1.0
    B[:, n - 1] = beta
    factored = lu_factor(B)
    A = np.column_stack(
        [lu_solve_factored(factored, np.eye(n, dtype=complex)[:, j]) for j in range(n)]
    )
    return A
