"""Minimum-variance portfolios built on factor-based scatter estimates.

The weekly backtest mirrors a standard out-of-sample protocol: at each period
the trailing window of returns is demeaned, a factor model is fitted to the
window, the scatter is rebuilt as "common-part covariance plus diagonal
residual variances", and the global minimum-variance weights are realized on
the next raw return row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import RngStream
from .errors import DegeneratePanel, DegenerateWeights, InvalidInput, NotPositiveDefinite
from .factor import METHOD_PCA, METHOD_RTS, METHODS, FactorFit, fit_pca, fit_rts
from .validation import as_panel, check_positive_int, check_square_symmetric, symmetrize


def min_variance_weights(sigma) -> np.ndarray:
    """Global minimum-variance weights for a positive definite scatter.

    Returns sigma^-1 1 / (1' sigma^-1 1). Weights sum to one and may be
    negative (short positions are allowed). Scaling sigma by any positive
    constant leaves the weights unchanged because the constant cancels in
    the ratio.
    """
    from .linalg import spd_solve

    S = check_square_symmetric(sigma, "sigma")
    ones = np.ones(S.shape[0])
    x = spd_solve(S, ones)
    total = float(x.sum())
    if abs(total) < 1e-12:
        raise DegenerateWeights(f"1' sigma^-1 1 = {total:.3e} is numerically zero")
    return x / total


def estimate_scatter(fit: FactorFit) -> np.ndarray:
    """Factor-structured scatter estimate from a fitted window.

    With w window rows, returns common'common / w plus a diagonal of
    residual second moments residuals'residuals / w. Off-diagonal residual
    terms are exactly zero by construction, which keeps the estimate well
    conditioned when p is close to the window length.
    """
    if not isinstance(fit, FactorFit):
        raise InvalidInput("fit must be a FactorFit")
    w = fit.common.shape[0]
    S = symmetrize(fit.common.T @ fit.common / w)
    resid_var = np.einsum("ij,ij->j", fit.residuals, fit.residuals) / w
    S[np.diag_indices_from(S)] += resid_var
    return S


@dataclass(frozen=True, eq=False)
class BacktestResult:
    """Out-of-sample path of the rolling minimum-variance strategy.

    ``periods`` holds the 1-based panel row numbers that were traded;
    ``weights`` row k is the allocation used to realize ``returns[k]``, and
    ``net_value`` is the cumulative product of 1 + returns.
    """

    periods: np.ndarray  # (k,), int
    returns: np.ndarray  # (k,)
    net_value: np.ndarray  # (k,)
    weights: np.ndarray  # (k, p)
    method: str
    window: int


def _fit_fn(method: str):
    if method == METHOD_RTS:
        return fit_rts
    if method == METHOD_PCA:
        return fit_pca
    raise InvalidInput(f"method must be one of {METHODS}, got {method!r}")


def rolling_backtest(
    panel, method: str, m: int, window: int = 52, *, n_jobs: int | None = None
) -> BacktestResult:
    """Roll a minimum-variance portfolio through a return panel.

    Parameters
    ----------
    panel : array_like, shape (n, p)
        Raw returns, rows are periods. Needs n > window.
    method : {"rts", "pca"}
        Factor fit used inside each window.
    m : int
        Number of factors; the window must satisfy window >= m + 2.
    window : int
        Trailing window length in periods (default one year of weeks).
    n_jobs : int, optional
        Worker threads for the per-window fits; never affects results.

    Notes
    -----
    Each window is demeaned before fitting, but the realized return uses the
    raw next-period row. Any estimation failure (degenerate window, singular
    scatter, undefined weights) aborts the whole backtest with the 1-based
    period index attached.
    """
    X = as_panel(panel)
    fit_fn = _fit_fn(method)
    n, p = X.shape
    window = check_positive_int(window, "window")
    if window < m + 2:
        raise InvalidInput(f"window={window} is too short for m={m} factors")
    if n <= window:
        raise InvalidInput(f"panel has {n} rows; need more than window={window}")
    k = n - window
    periods = np.arange(window + 1, n + 1)
    returns = np.empty(k)
    weights = np.empty((k, p))
    for step, t in enumerate(range(window, n)):
        win = X[t - window : t]
        win = win - win.mean(axis=0)
        try:
            fit = fit_fn(win, m, n_jobs=n_jobs)
            sig = estimate_scatter(fit)
            w = min_variance_weights(sig)
        except (DegeneratePanel, NotPositiveDefinite, DegenerateWeights) as exc:
            raise type(exc)(f"period {t + 1}: {exc}") from exc
        weights[step] = w
        returns[step] = w @ X[t]
    net_value = np.cumprod(1.0 + returns)
    return BacktestResult(
        periods=periods,
        returns=returns,
        net_value=net_value,
        weights=weights,
        method=method,
        window=window,
    )


@dataclass(frozen=True)
class ContaminationReport:
    """Mean loading-space displacement per contamination level for one method."""

    method: str
    levels: tuple[float, ...]
    mean_distance: tuple[float, ...]
    distances: tuple[tuple[float, ...], ...]  # [level][rep]


def contamination_sensitivity(
    panel, method: str, m: int, levels, reps: int, rng: RngStream, *, n_jobs: int | None = None
) -> ContaminationReport:
    """Loading-space sensitivity to multiplicative cell contamination.

    For each level, ``reps`` independent repetitions pick round(level * n * p)
    distinct cells of the (already centered) panel uniformly at random, double
    them, refit, and record the subspace distance between the contaminated
    and original loadings. Level 0.0 reproduces the input panel bit for bit
    and therefore reports a distance of exactly zero.

    Repetition r draws its cells from ``rng.child(r)``, so repetitions are
    distributed across workers (``n_jobs``) without changing any draw.
    """
    from concurrent.futures import ThreadPoolExecutor

    from .factor import subspace_distance

    X = as_panel(panel)
    fit_fn = _fit_fn(method)
    m = check_positive_int(m, "m")
    reps = check_positive_int(reps, "reps")
    if not isinstance(rng, RngStream):
        raise InvalidInput("rng must be an RngStream")
    levels = tuple(float(v) for v in levels)
    if not levels:
        raise InvalidInput("need at least one contamination level")
    for lv in levels:
        if not (0.0 <= lv <= 0.5):
            raise InvalidInput(f"levels must lie in [0, 0.5], got {lv}")
    base = fit_fn(X, m)
    cells = X.size
    counts = [round(lv * cells) for lv in levels]

    def one_rep(r: int) -> np.ndarray:
        gen = rng.child(r).generator()
        row = np.empty(len(counts))
        for li, count in enumerate(counts):
            if count == 0:
                row[li] = 0.0
                continue
            flat = gen.choice(cells, size=count, replace=False)
            Y = X.copy()
            Y.flat[flat] *= 2.0
            refit = fit_fn(Y, m)
            row[li] = subspace_distance(refit.loadings, base.loadings)
        return row

    if n_jobs is not None:
        check_positive_int(n_jobs, "n_jobs")
    if n_jobs is None or n_jobs == 1:
        rows = [one_rep(r) for r in range(1, reps + 1)]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            rows = list(pool.map(one_rep, range(1, reps + 1)))
    dists = np.column_stack(rows)
    return ContaminationReport(
        method=method,
        levels=levels,
        mean_distance=tuple(float(v) for v in dists.mean(axis=1)),
        distances=tuple(tuple(row) for row in dists),
    )
