"""Monte Carlo study of the two factor estimators.

Panels follow an approximate factor model

    y_t = L f_t + sqrt(theta) u_t

with idiosyncratic errors that can be serially correlated (AR(1) with
coefficient rho) and cross-sectionally correlated (each series mixes a band
of 2J + 1 neighboring innovations with weight beta). The error recursion is

    u_it = sqrt((1 - rho^2) / (1 + 2 J beta^2)) e_it,
    e_it = rho e_i,t-1 + (1 - beta) v_it + sum_{l = max(i-J, 1)}^{min(i+J, p)} beta v_lt,

where the band sum includes l = i, and the leading factor normalizes the
stationary error variance back to one for light-tailed innovations. Factors
and innovations (f_t, v_t) are drawn jointly from one of six families, so a
single heavy-tailed mixing variable hits factors and errors together.

Three named scenarios cover the study: "A" is i.i.d. errors (rho = beta = 0,
J = 0), "B" turns on both correlations (rho = 0.5, beta = 0.2,
J = max(10, p // 20)), and "C" is scenario B plus a weak third factor whose
scatter is shrunk to ``snr``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .distributions import RngStream, sample_alpha_stable, sample_skewed_t
from .errors import InvalidInput, ReplicationFailure
from .factor import METHOD_PCA, METHOD_RTS, ReplicationErrors, fit_pca, fit_rts, replication_errors
from .validation import check_positive_int

FAMILIES = ("gaussian", "t3", "t2", "t1", "skew-t3", "alpha-stable")
SCENARIOS = ("A", "B", "C")

_T_DOF = {"t3": 3.0, "t2": 2.0, "t1": 1.0}
_SKEW_SLANT = 20.0
_STABLE_ALPHA = 1.8
_BURNIN = 200


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved description of one simulation configuration.

    ``rho``, ``beta`` and ``J`` may be left as None to take the scenario's
    standard values; explicit values override them. ``snr`` scales the third
    factor's scatter and is meaningful for scenario "C" only.
    """

    scenario: str
    p: int
    n: int
    family: str = "gaussian"
    m: int = 3
    theta: float = 1.0
    rho: float | None = None
    beta: float | None = None
    J: int | None = None
    snr: float = 1.0
    replications: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise InvalidInput(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if self.family not in FAMILIES:
            raise InvalidInput(f"family must be one of {FAMILIES}, got {self.family!r}")
        check_positive_int(self.p, "p")
        check_positive_int(self.n, "n", minimum=2)
        check_positive_int(self.m, "m")
        if self.m > min(self.n - 1, self.p):
            raise InvalidInput(f"m={self.m} exceeds min(n - 1, p)")
        if not (self.theta >= 0):
            raise InvalidInput(f"theta must be nonnegative, got {self.theta}")
        defaults = self._scenario_defaults()
        for field, value in defaults.items():
            if getattr(self, field) is None:
                object.__setattr__(self, field, value)
        if not (0.0 <= self.rho < 1.0):
            raise InvalidInput(f"rho must be in [0, 1), got {self.rho}")
        if not (0.0 <= self.beta <= 1.0):
            raise InvalidInput(f"beta must be in [0, 1], got {self.beta}")
        check_positive_int(self.J, "J", minimum=0)
        if not (0.0 < self.snr <= 1.0):
            raise InvalidInput(f"snr must be in (0, 1], got {self.snr}")
        if self.scenario != "C" and self.snr != 1.0:
            raise InvalidInput("snr applies to scenario C only")
        if self.scenario == "C" and self.m < 3:
            raise InvalidInput("scenario C shrinks factor 3 and needs m >= 3")
        check_positive_int(self.replications, "replications")
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise InvalidInput("seed must be an integer")

    def _scenario_defaults(self) -> dict:
        if self.scenario == "A":
            return {"rho": 0.0, "beta": 0.0, "J": 0}
        return {"rho": 0.5, "beta": 0.2, "J": int(max(10, self.p // 20))}

    def scatter_diag(self) -> np.ndarray:
        """Diagonal of the joint (f, v) scatter matrix, length m + p."""
        d = np.ones(self.m + self.p)
        if self.scenario == "C":
            d[2] = self.snr
        return d


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """One simulated panel with its generating quantities."""

    loadings: np.ndarray  # (p, m)
    factors: np.ndarray  # (n, m)
    panel: np.ndarray  # (n, p)


def _draw_joint(gen, family: str, rows: int, m: int, p: int, scale: np.ndarray) -> np.ndarray:
    """rows x (m + p) draws of the joint (f, v) block, scatter diag(scale^2)."""
    dim = m + p
    if family == "gaussian":
        return gen.standard_normal((rows, dim)) * scale
    if family in _T_DOF:
        nu = _T_DOF[family]
        Z = gen.standard_normal((rows, dim)) * scale
        w = gen.chisquare(nu, size=rows)
        return Z * np.sqrt(nu / w)[:, None]
    if family == "skew-t3":
        return sample_skewed_t(
            np.zeros(dim), np.diag(scale**2), np.full(dim, _SKEW_SLANT), 3.0, rows, gen
        )
    # symmetric stable innovations; factors stay Gaussian because the stable
    # law has no scatter matrix to share
    F = gen.standard_normal((rows, m)) * scale[:m]
    V = sample_alpha_stable(_STABLE_ALPHA, 0.0, 1.0, 0.0, rows * p, gen).reshape(rows, p)
    return np.concatenate([F, V], axis=1)


def _neighborhood_mix(V: np.ndarray, beta: float, J: int) -> np.ndarray:
    """(1 - beta) v_it + beta * sum of v_lt over the band |l - i| <= J."""
    rows, p = V.shape
    csum = np.concatenate([np.zeros((rows, 1)), np.cumsum(V, axis=1)], axis=1)
    idx = np.arange(p)
    lo = np.maximum(idx - J, 0)
    hi = np.minimum(idx + J, p - 1)
    band = csum[:, hi + 1] - csum[:, lo]
    return (1.0 - beta) * V + beta * band


def generate_scenario(config: ScenarioConfig, rep_index: int) -> GroundTruth:
    """Generate one replication's loadings, factors, and panel.

    Replication ``rep_index`` owns the random stream
    ``RngStream(config.seed, rep_index)``; inside the stream the loadings are
    drawn first, then the joint factor/innovation block. A 200-step burn-in
    plus a stationary-scale initial row warm up the AR recursion before the
    n retained periods.
    """
    if not isinstance(config, ScenarioConfig):
        raise InvalidInput("config must be a ScenarioConfig")
    rep_index = check_positive_int(rep_index, "rep_index", minimum=0)
    gen = RngStream(config.seed, rep_index).generator()
    m, p, n = config.m, config.p, config.n
    L = gen.standard_normal((p, m))
    rows = _BURNIN + n + 1
    scale = np.sqrt(config.scatter_diag())
    joint = _draw_joint(gen, config.family, rows, m, p, scale)
    V = joint[:, m:]
    W = _neighborhood_mix(V, config.beta, config.J)
    E = np.empty_like(W)
    E[0] = W[0] / np.sqrt(1.0 - config.rho**2)
    for t in range(1, rows):
        E[t] = config.rho * E[t - 1] + W[t]
    U = np.sqrt((1.0 - config.rho**2) / (1.0 + 2.0 * config.J * config.beta**2)) * E
    F = joint[_BURNIN + 1 :, :m]
    panel = F @ L.T + np.sqrt(config.theta) * U[_BURNIN + 1 :]
    return GroundTruth(loadings=L, factors=np.ascontiguousarray(F), panel=panel)


@dataclass(frozen=True)
class MetricsReport:
    """Aggregate error metrics of one method over all replications."""

    method: str
    errors: tuple[ReplicationErrors, ...]
    mee_cc: float
    mee_cc_iqr: float
    ave_fl: float
    ave_fl_sd: float
    ave_fs: float
    ave_fs_sd: float

    @classmethod
    def from_errors(cls, method: str, errors) -> "MetricsReport":
        errors = tuple(errors)
        if not errors:
            raise InvalidInput("need at least one replication")
        cc = np.array([e.cc_err for e in errors])
        fl = np.array([e.fl_dist for e in errors])
        fs = np.array([e.fs_dist for e in errors])
        q25, q75 = np.percentile(cc, [25, 75])

        def sd(a: np.ndarray) -> float:
            return float(a.std(ddof=1)) if a.size > 1 else 0.0

        return cls(
            method=method,
            errors=errors,
            mee_cc=float(np.median(cc)),
            mee_cc_iqr=float(q75 - q25),
            ave_fl=float(fl.mean()),
            ave_fl_sd=sd(fl),
            ave_fs=float(fs.mean()),
            ave_fs_sd=sd(fs),
        )


def _replicate(config: ScenarioConfig, rep: int) -> tuple[ReplicationErrors, ReplicationErrors]:
    truth = generate_scenario(config, rep)
    out = []
    for fit_fn in (fit_rts, fit_pca):
        fit = fit_fn(truth.panel, config.m)
        out.append(replication_errors(fit, truth.loadings, truth.factors))
    return out[0], out[1]


def run_replications(
    config: ScenarioConfig,
    *,
    n_jobs: int | None = None,
    progress: Callable[[int], None] | None = None,
) -> tuple[MetricsReport, MetricsReport]:
    """Run the full study for one configuration; returns (rts, pca) reports.

    Replication r (1-based) draws everything from stream (seed, r), so the
    reports are a pure function of the config: worker count and scheduling
    cannot change a single bit of the output. A failure in any replication
    aborts the run with the replication index attached.
    """
    if not isinstance(config, ScenarioConfig):
        raise InvalidInput("config must be a ScenarioConfig")

    def guarded(rep: int):
        try:
            result = _replicate(config, rep)
        except Exception as exc:
            raise ReplicationFailure(f"replication {rep} failed: {exc}", rep=rep) from exc
        if progress is not None:
            progress(rep)
        return result

    reps = range(1, config.replications + 1)
    if n_jobs is not None:
        check_positive_int(n_jobs, "n_jobs")
    if n_jobs is None or n_jobs == 1:
        results = [guarded(r) for r in reps]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(guarded, reps))
    rts = MetricsReport.from_errors(METHOD_RTS, (r[0] for r in results))
    pca = MetricsReport.from_errors(METHOD_PCA, (r[1] for r in results))
    return rts, pca
