"""Two-step factor estimation for large panels.

Both estimators share one pipeline: eigendecompose a p x p spatial statistic
of the panel, scale the leading m eigenvectors by sqrt(p) to get loadings,
then recover scores by least squares. Because the loading columns satisfy
L'L = p I exactly up to rounding, the least-squares step collapses to the
closed form F = Y L / p.

The robust variant ("rts") uses the sample spatial Kendall's tau matrix and
keeps its eigenvector consistency under any elliptical distribution, however
heavy the tails. The baseline ("pca") uses the sample covariance matrix and
degrades once second moments blow up.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegeneratePanel, InvalidInput, NotPositiveDefinite, RankDeficient
from .kendall import sample_kendall_tau
from .linalg import gram_schmidt, spd_solve, sym_eig
from .validation import as_matrix, as_panel, check_positive_int, symmetrize

METHOD_RTS = "rts"
METHOD_PCA = "pca"
METHODS = (METHOD_RTS, METHOD_PCA)

# Leading eigengap below this is flagged: the factor space is then not
# numerically identified and rotations of the returned basis are arbitrary.
_EIGENGAP_TOL = 1e-12


@dataclass(frozen=True)
class FactorFit:
    """Result of a two-step factor fit.

    Attributes
    ----------
    method : str
        "rts" or "pca".
    n_factors : int
        Number of fitted factors m.
    loadings : ndarray, shape (p, m)
        sqrt(p)-scaled leading eigenvectors; loadings'loadings = p I.
    scores : ndarray, shape (n, m)
        Least-squares factor scores, panel @ loadings / p.
    eigenvalues : ndarray, shape (p,)
        Full descending spectrum of the spatial statistic.
    common : ndarray, shape (n, p)
        Fitted common component scores @ loadings'.
    residuals : ndarray, shape (n, p)
        panel - common; orthogonal to every loading column.
    eigengap_warning : bool
        True when eigenvalue m and m+1 are separated by less than 1e-12.
    """

    method: str
    n_factors: int
    loadings: np.ndarray
    scores: np.ndarray
    eigenvalues: np.ndarray
    common: np.ndarray
    residuals: np.ndarray
    eigengap_warning: bool


class ReplicationErrors(NamedTuple):
    cc_err: float  # relative squared error of the common component
    fl_dist: float  # loading subspace distance
    fs_dist: float  # score subspace distance


def _covariance(X: np.ndarray) -> np.ndarray:
    """Column-centered sample covariance with divisor n."""
    Xc = X - X.mean(axis=0)
    return symmetrize(Xc.T @ Xc / X.shape[0])


def _spatial_statistic(X: np.ndarray, method: str, n_jobs: int | None) -> np.ndarray:
    if method == METHOD_RTS:
        return sample_kendall_tau(X, n_jobs=n_jobs).matrix
    if np.array_equal(X, np.broadcast_to(X[0], X.shape)):
        raise DegeneratePanel("all panel rows are identical; no variation to fit")
    return _covariance(X)


def _fit(X: np.ndarray, m: int, method: str, n_jobs: int | None) -> FactorFit:
    n, p = X.shape
    m = check_positive_int(m, "m")
    if m > min(n - 1, p):
        raise InvalidInput(f"m={m} exceeds min(n - 1, p) = {min(n - 1, p)}")
    stat = _spatial_statistic(X, method, n_jobs)
    evals, evecs = sym_eig(stat)
    warning = bool(m < p and evals[m - 1] - evals[m] < _EIGENGAP_TOL)
    loadings = np.sqrt(p) * evecs[:, :m]
    scores = X @ loadings / p
    common = scores @ loadings.T
    residuals = X - common
    return FactorFit(
        method=method,
        n_factors=m,
        loadings=loadings,
        scores=scores,
        eigenvalues=evals,
        common=common,
        residuals=residuals,
        eigengap_warning=warning,
    )


def fit_rts(panel, m: int, *, n_jobs: int | None = None) -> FactorFit:
    """Robust two-step fit: PCA on the spatial Kendall's tau matrix.

    Parameters
    ----------
    panel : array_like, shape (n, p)
        Observations in rows, finite, n >= 2.
    m : int
        Number of factors, 1 <= m <= min(n - 1, p).
    n_jobs : int, optional
        Worker threads for the tau-matrix pair reduction; never affects the
        returned values.

    Returns
    -------
    FactorFit
    """
    return _fit(as_panel(panel), m, METHOD_RTS, n_jobs)


def fit_pca(panel, m: int, *, n_jobs: int | None = None) -> FactorFit:
    """Baseline two-step fit: PCA on the sample covariance matrix.

    Same contract as :func:`fit_rts`. The panel is centered column-wise
    before the covariance is formed (divisor n); the centering does not leak
    back into the score step, which uses the raw panel.
    """
    return _fit(as_panel(panel), m, METHOD_PCA, n_jobs)


def ols_scores(panel, loadings) -> np.ndarray:
    """Least-squares scores of a panel on a fixed loading matrix.

    Solves min_F ||panel - F loadings'||_F^2 row by row through the normal
    equations. Loadings that are not numerically full column rank raise
    RankDeficient.
    """
    X = as_panel(panel, min_rows=1)
    L = as_matrix(loadings, "loadings")
    if L.shape[0] != X.shape[1]:
        raise InvalidInput(
            f"loadings have {L.shape[0]} rows but panel has {X.shape[1]} columns"
        )
    if L.shape[1] > L.shape[0]:
        raise RankDeficient(
            f"more factors ({L.shape[1]}) than series ({L.shape[0]})", column=L.shape[0]
        )
    G = symmetrize(L.T @ L)
    try:
        Z = spd_solve(G, L.T @ X.T)
    except NotPositiveDefinite as exc:
        raise RankDeficient(f"loadings are rank deficient: {exc}") from exc
    return np.ascontiguousarray(Z.T)


def estimate_factor_number(
    panel, m_max: int | None = None, *, method: str = METHOD_RTS, n_jobs: int | None = None
) -> int:
    """Select the factor count by the largest consecutive eigenvalue ratio.

    Computes the spatial statistic's descending spectrum and returns
    argmax_{1 <= j <= m_max} eigenvalue_j / eigenvalue_{j+1}, with
    denominators floored at 1e-12 so trailing zero eigenvalues cannot divide
    by zero. Ties go to the smallest j.

    Parameters
    ----------
    panel : array_like, shape (n, p)
    m_max : int, optional
        Largest candidate count; must satisfy 1 <= m_max <= min(n, p) / 2.
        Defaults to min(8, floor(min(n, p) / 2)).
    method : {"rts", "pca"}
    """
    X = as_panel(panel)
    n, p = X.shape
    if method not in METHODS:
        raise InvalidInput(f"unknown method {method!r}")
    bound = min(n, p) / 2
    if m_max is None:
        m_max = min(8, int(bound))
    m_max = check_positive_int(m_max, "m_max")
    if m_max > bound:
        raise InvalidInput(f"m_max={m_max} exceeds min(n, p) / 2 = {bound:g}")
    stat = _spatial_statistic(X, method, n_jobs)
    evals = sym_eig(stat).eigenvalues
    ratios = evals[:m_max] / np.maximum(evals[1 : m_max + 1], 1e-12)
    return int(np.argmax(ratios)) + 1


def subspace_distance(o1, o2) -> float:
    """Distance between the column spans of two full-column-rank matrices.

    Equals sqrt(1 - ||Q1'Q2||_F^2 / max(q1, q2)) with Q_i an orthonormal
    basis of span(O_i), computed in a residual form that is stable near zero.
    Always lands in [0, 1]: 0 for identical spans, 1 for orthogonal spans,
    and an averaged value when the column counts differ. Bitwise identical
    inputs return exactly 0.0.
    """
    A = as_matrix(o1, "o1")
    B = as_matrix(o2, "o2")
    if A.shape[0] != B.shape[0]:
        raise InvalidInput(f"ambient dimensions differ: {A.shape[0]} vs {B.shape[0]}")
    if A.shape == B.shape and np.array_equal(A, B):
        return 0.0
    QA = gram_schmidt(A)
    QB = gram_schmidt(B)
    # orient so the wider basis is projected onto the narrower one; for the
    # wider basis Q, ||Q - P Q||_F^2 = max(q1, q2) - ||Q1'Q2||_F^2 exactly
    if QA.shape[1] < QB.shape[1]:
        QA, QB = QB, QA
    R = QA - QB @ (QB.T @ QA)
    d2 = min((R * R).sum() / QA.shape[1], 1.0)
    return float(np.sqrt(d2))


def replication_errors(fit: FactorFit, true_loadings, true_scores) -> ReplicationErrors:
    """Error triple of a fit against the generating loadings and scores.

    Returns the relative squared common-component error
    ||common - F L'||_F^2 / ||F L'||_F^2 together with the loading and score
    subspace distances. A zero true common component has no relative error
    and raises InvalidInput.
    """
    L = as_matrix(true_loadings, "true_loadings")
    F = as_matrix(true_scores, "true_scores")
    if L.shape[0] != fit.loadings.shape[0]:
        raise InvalidInput("true_loadings do not match the fitted panel width")
    if F.shape[0] != fit.scores.shape[0]:
        raise InvalidInput("true_scores do not match the fitted panel length")
    if L.shape[1] != F.shape[1]:
        raise InvalidInput("true_loadings and true_scores disagree on factor count")
    signal = F @ L.T
    denom = float((signal * signal).sum())
    if denom == 0.0:
        raise InvalidInput("true common component is exactly zero")
    diff = fit.common - signal
    cc = float((diff * diff).sum()) / denom
    fl = subspace_distance(fit.loadings, L)
    fs = subspace_distance(fit.scores, F)
    return ReplicationErrors(cc_err=cc, fl_dist=fl, fs_dist=fs)
