"""Sample and population spatial Kendall's tau matrices.

The sample statistic averages outer products of normalized observation
differences over all unordered pairs:

    K = (2 / (n (n - 1))) * sum_{t < t'} d d' / ||d||^2,   d = y_t - y_t'

It has unit trace, is positive semidefinite, and ignores the location and
overall scale of the data, which is what makes the downstream eigenvector
estimates robust to heavy-tailed observations.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePanel, InvalidInput
from .linalg import sym_eig
from .validation import as_panel, check_positive_int, check_square_symmetric

# Pairs handled per reduction block. The value trades peak memory against
# scheduling overhead; it must never influence results (the reduction runs
# in fixed block order regardless of worker count).
_BLOCK_PAIRS = 8192


@dataclass(frozen=True)
class KendallMatrix:
    """Sample spatial Kendall's tau matrix plus pair bookkeeping."""

    matrix: np.ndarray
    pairs_used: int
    pairs_skipped: int

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _pair_block(X: np.ndarray, rows_i: np.ndarray, rows_j: np.ndarray):
    """Partial sum of d d'/||d||^2 over one block of pairs."""
    D = X[rows_i] - X[rows_j]
    sq = np.einsum("ij,ij->i", D, D)
    good = sq > 0.0
    skipped = int(good.size - np.count_nonzero(good))
    if skipped:
        D = D[good]
        sq = sq[good]
    U = D / np.sqrt(sq)[:, None]
    return U.T @ U, int(sq.size), skipped


def sample_kendall_tau(panel, *, n_jobs: int | None = None) -> KendallMatrix:
    """Sample spatial Kendall's tau matrix of a panel.

    Pairs whose two observations coincide exactly contribute no direction and
    are skipped; the average runs over the remaining pairs. If every pair is
    degenerate the panel carries no information and DegeneratePanel is raised.

    Parameters
    ----------
    panel : array_like, shape (n, p)
        Observations in rows. Needs n >= 2 and finite entries.
    n_jobs : int, optional
        Worker threads for the pair reduction. The pair set is split into
        fixed blocks and partial sums are combined in block order, so the
        result is bitwise identical for any worker count.

    Returns
    -------
    KendallMatrix
        Unit-trace PSD matrix (exactly symmetric as stored) with counts of
        pairs used and skipped.
    """
    X = as_panel(panel)
    n = X.shape[0]
    rows_i, rows_j = np.triu_indices(n, k=1)
    total = rows_i.size
    starts = range(0, total, _BLOCK_PAIRS)
    blocks = [(rows_i[s : s + _BLOCK_PAIRS], rows_j[s : s + _BLOCK_PAIRS]) for s in starts]

    if n_jobs is not None:
        check_positive_int(n_jobs, "n_jobs")
    if n_jobs is None or n_jobs == 1 or len(blocks) == 1:
        parts = [_pair_block(X, bi, bj) for bi, bj in blocks]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(lambda b: _pair_block(X, b[0], b[1]), blocks))

    acc = np.zeros((X.shape[1], X.shape[1]), dtype=np.float64)
    used = 0
    skipped = 0
    for part, n_used, n_skipped in parts:
        acc += part
        used += n_used
        skipped += n_skipped
    if used == 0:
        raise DegeneratePanel("all observation pairs coincide; panel has no variation")
    K = acc / used
    K = 0.5 * (K + K.T)
    return KendallMatrix(matrix=K, pairs_used=used, pairs_skipped=skipped)


def population_kendall_eigs_mc(sigma, draws: int, seed: int):
    """Monte Carlo eigenvalues of the population Kendall's tau matrix.

    For elliptical data with scatter Sigma, the population tau matrix shares
    Sigma's eigenvectors and its j-th eigenvalue equals

        E[ lambda_j g_j^2 / sum_i lambda_i g_i^2 ],   g ~ N(0, I_q),

    where the lambda_i are the positive eigenvalues of Sigma (q = rank). The
    expectation is estimated by simple Monte Carlo over ``draws`` standard
    normal vectors.

    Parameters
    ----------
    sigma : array_like, shape (p, p)
        Symmetric PSD scatter matrix with at least one positive eigenvalue.
        Eigenvalues below -1e-8 raise InvalidInput.
    draws : int
        Number of Monte Carlo draws, at least 1000.
    seed : int
        Seed for the dedicated counter-based random stream.

    Returns
    -------
    (estimates, std_errors) : tuple of ndarray, each shape (p,)
        Estimated eigenvalues in the descending eigenvalue order of Sigma and
        their Monte Carlo standard errors. Entries beyond the rank of Sigma
        are exactly zero. The estimates sum to 1 up to accumulated rounding.
    """
    from .distributions import RngStream

    S = check_square_symmetric(sigma, "sigma")
    draws = check_positive_int(draws, "draws", minimum=1000)
    w, _ = sym_eig(S)
    if w[-1] < -1e-8:
        raise InvalidInput(f"sigma has eigenvalue {w[-1]:.3e}; not positive semidefinite")
    support = w > 1e-12 * max(1.0, float(w[0]))
    q = int(np.count_nonzero(support))
    if q == 0:
        raise InvalidInput("sigma has no positive eigenvalue")
    lam = w[:q]
    gen = RngStream(seed, 0).generator()
    g = gen.standard_normal((draws, q))
    num = lam * g**2
    ratios = num / num.sum(axis=1)[:, None]
    est = np.zeros(S.shape[0])
    se = np.zeros(S.shape[0])
    est[:q] = ratios.mean(axis=0)
    if draws > 1:
        se[:q] = ratios.std(axis=0, ddof=1) / np.sqrt(draws)
    return est, se
