"""Dense symmetric linear algebra with deterministic conventions.

Eigenvectors returned by :func:`sym_eig` follow a fixed sign and order
convention so that repeated calls, and calls from different worker threads,
produce bitwise identical output for identical input.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.linalg import solve_triangular

from .errors import InvalidInput, NotPositiveDefinite, NumericalFailure, RankDeficient
from .validation import as_matrix, check_square_symmetric


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # (n,), descending
    eigenvectors: np.ndarray  # (n, n), column j pairs with eigenvalues[j]


def sym_eig(matrix) -> EigenDecomposition:
    """Full eigendecomposition of a symmetric matrix.

    Eigenvalues come back in descending order. Within ties the order produced
    by the underlying solver is kept (stable sort). Each eigenvector is signed
    so its entry of largest absolute value is nonnegative, ties broken by the
    lowest row index.

    Parameters
    ----------
    matrix : array_like, shape (n, n)
        Symmetric matrix with finite entries.

    Returns
    -------
    EigenDecomposition
        Named tuple of (eigenvalues, eigenvectors).
    """
    M = check_square_symmetric(matrix)
    try:
        w, V = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails
        raise NumericalFailure(f"eigendecomposition did not converge: {exc}") from exc
    order = np.argsort(-w, kind="stable")
    w = w[order]
    V = V[:, order]
    # sign convention: largest-magnitude entry of each column is nonnegative
    lead = np.argmax(np.abs(V), axis=0)
    flip = V[lead, np.arange(V.shape[1])] < 0.0
    V[:, flip] *= -1.0
    return EigenDecomposition(w, V)


def gram_schmidt(columns, tol: float = 1e-12) -> np.ndarray:
    """Orthonormalize columns in their natural left-to-right order.

    Uses modified Gram-Schmidt with one reorthogonalization pass, so the
    output satisfies Q'Q = I to near machine precision while remaining a
    deterministic function of the input.

    Raises
    ------
    RankDeficient
        When a column's residual norm after projection falls below ``tol``;
        the exception carries the offending column index.
    """
    B = as_matrix(columns, "columns")
    p, q = B.shape
    if q == 0:
        raise RankDeficient("need at least one column", column=0)
    if q > p:
        raise RankDeficient(f"more columns ({q}) than rows ({p})", column=p)
    Q = np.empty((p, q), dtype=np.float64)
    for j in range(q):
        v = B[:, j].copy()
        for _ in range(2):
            for i in range(j):
                v -= (Q[:, i] @ v) * Q[:, i]
        norm = np.sqrt(v @ v)
        if norm < tol:
            raise RankDeficient(
                f"column {j} is numerically dependent on earlier columns "
                f"(residual norm {norm:.3e})",
                column=j,
            )
        Q[:, j] = v / norm
    return Q


def _cholesky_lower(M: np.ndarray, pivot_tol: float = 1e-12) -> np.ndarray:
    """Lower Cholesky factor of an SPD matrix.

    Column-oriented elimination; any pivot at or below ``pivot_tol`` raises
    NotPositiveDefinite with the offending index.
    """
    n = M.shape[0]
    L = np.zeros_like(M)
    for j in range(n):
        d = M[j, j] - L[j, :j] @ L[j, :j]
        if d <= pivot_tol:
            raise NotPositiveDefinite(f"pivot {d:.6e} at index {j} is not positive")
        L[j, j] = np.sqrt(d)
        if j + 1 < n:
            L[j + 1 :, j] = (M[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def spd_solve(matrix, rhs) -> np.ndarray:
    """Solve ``matrix @ x = rhs`` for a symmetric positive definite matrix.

    ``rhs`` may be a vector or a matrix of stacked right-hand sides. The
    factorization is a Cholesky decomposition; failure to factor raises
    NotPositiveDefinite.
    """
    M = check_square_symmetric(matrix)
    b = np.ascontiguousarray(rhs, dtype=np.float64)
    if b.ndim not in (1, 2) or b.shape[0] != M.shape[0]:
        raise InvalidInput(
            f"rhs shape {b.shape} is incompatible with matrix of order {M.shape[0]}"
        )
    if not np.isfinite(b).all():
        raise InvalidInput("right-hand side contains non-finite entries")
    L = _cholesky_lower(M)
    y = solve_triangular(L, b, lower=True, check_finite=False)
    return solve_triangular(L.T, y, lower=False, check_finite=False)
