"""scikit-learn style front end for the two-step factor fits.

The functional API in :mod:`robustfa.factor` returns frozen result objects;
this wrapper re-exposes the same computation as a fit/transform estimator so
it can sit inside sklearn pipelines, grid searches, and clones.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .errors import InvalidInput
from .factor import METHOD_RTS, METHODS, estimate_factor_number, fit_pca, fit_rts
from .validation import as_panel


class FactorModel(BaseEstimator, TransformerMixin):
    """Large-panel factor model with a heavy-tail-robust default.

    Parameters
    ----------
    n_factors : int or "auto", default 3
        Number of factors, or "auto" to pick it by the eigenvalue-ratio
        criterion at fit time.
    method : {"rts", "pca"}, default "rts"
        "rts" runs PCA on the spatial Kendall's tau matrix and stays
        consistent under arbitrarily heavy elliptical tails; "pca" is the
        classical sample-covariance baseline.
    max_factors : int, optional
        Largest candidate count considered by "auto"; defaults to
        min(8, floor(min(n, p) / 2)).
    n_jobs : int, optional
        Worker threads for the tau-matrix reduction. Results never depend
        on it.

    Attributes
    ----------
    loadings_ : ndarray, shape (p, m)
    scores_ : ndarray, shape (n, m)
        Least-squares scores of the training panel.
    eigenvalues_ : ndarray, shape (p,)
        Descending spectrum of the fitted spatial statistic.
    common_ : ndarray, shape (n, p)
    residuals_ : ndarray, shape (n, p)
    eigengap_warning_ : bool
        True when the spectrum does not separate factor m from m + 1.
    n_factors_ : int
        Number of factors actually fitted (resolves "auto").
    n_features_in_ : int

    Examples
    --------
    >>> import numpy as np
    >>> rng = np.random.default_rng(0)
    >>> X = rng.standard_normal((200, 30)) + rng.standard_normal((200, 1)) * 3
    >>> scores = FactorModel(n_factors=1).fit_transform(X)
    >>> scores.shape
    (200, 1)
    """

    def __init__(self, n_factors=3, method=METHOD_RTS, max_factors=None, n_jobs=None):
        self.n_factors = n_factors
        self.method = method
        self.max_factors = max_factors
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        """Fit loadings and scores on a panel with observations in rows."""
        X = as_panel(X)
        if self.method not in METHODS:
            raise InvalidInput(f"method must be one of {METHODS}, got {self.method!r}")
        if self.n_factors == "auto":
            m = estimate_factor_number(
                X, self.max_factors, method=self.method, n_jobs=self.n_jobs
            )
        else:
            m = self.n_factors
        fit_fn = fit_rts if self.method == METHOD_RTS else fit_pca
        result = fit_fn(X, m, n_jobs=self.n_jobs)
        self.n_factors_ = result.n_factors
        self.loadings_ = result.loadings
        self.scores_ = result.scores
        self.eigenvalues_ = result.eigenvalues
        self.common_ = result.common
        self.residuals_ = result.residuals
        self.eigengap_warning_ = result.eigengap_warning
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        """Least-squares factor scores of new observations."""
        check_is_fitted(self, "loadings_")
        X = as_panel(X, min_rows=1)
        if X.shape[1] != self.n_features_in_:
            raise InvalidInput(
                f"X has {X.shape[1]} columns; the model was fitted on {self.n_features_in_}"
            )
        return X @ self.loadings_ / self.n_features_in_

    def inverse_transform(self, scores):
        """Common component implied by factor scores."""
        check_is_fitted(self, "loadings_")
        F = np.ascontiguousarray(scores, dtype=np.float64)
        if F.ndim != 2 or F.shape[1] != self.n_factors_:
            raise InvalidInput(f"scores must have shape (n, {self.n_factors_})")
        return F @ self.loadings_.T
