"""CSV reading and writing for panels and study outputs.

All numeric output goes through one formatter emitting 17 significant
digits, enough for float64 round-trips, so files written by two runs match
byte for byte exactly when the computed values do.
"""

from __future__ import annotations

import csv
from typing import NamedTuple, Sequence

import numpy as np

from .errors import FormatError
from .portfolio import BacktestResult, ContaminationReport
from .simulation import MetricsReport, ScenarioConfig


class Panel(NamedTuple):
    values: np.ndarray  # (n, p) float64
    columns: list[str]


def fmt(x) -> str:
    """Format one CSV cell; floats get 17 significant digits."""
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _write_rows(path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(cell) for cell in row])


def read_panel(path) -> Panel:
    """Read a panel CSV: one header row of series names, numeric body.

    Raises FormatError, carrying 1-based row/column positions, for ragged
    rows, non-numeric cells, non-finite values, an empty header, or fewer
    than two data rows.
    """
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError("file is empty", row=1) from None
        if not header or any(not name.strip() for name in header):
            raise FormatError("header must name every series", row=1)
        p = len(header)
        data = []
        for line_no, raw in enumerate(reader, start=2):
            if len(raw) != p:
                raise FormatError(
                    f"row {line_no} has {len(raw)} cells, expected {p}", row=line_no
                )
            parsed = []
            for col, cell in enumerate(raw, start=1):
                try:
                    value = float(cell)
                except ValueError:
                    raise FormatError(
                        f"row {line_no}, column {col}: {cell!r} is not numeric",
                        row=line_no,
                        column=col,
                    ) from None
                if not np.isfinite(value):
                    raise FormatError(
                        f"row {line_no}, column {col}: non-finite value {cell!r}",
                        row=line_no,
                        column=col,
                    )
                parsed.append(value)
            data.append(parsed)
    if len(data) < 2:
        raise FormatError(f"need at least 2 data rows, found {len(data)}")
    return Panel(values=np.array(data, dtype=np.float64), columns=[h.strip() for h in header])


def write_panel(path, values, columns: Sequence[str] | None = None) -> None:
    """Write a panel CSV readable by :func:`read_panel`."""
    X = np.asarray(values, dtype=np.float64)
    if X.ndim != 2:
        raise FormatError(f"panel must be 2-D, got ndim={X.ndim}")
    if columns is None:
        columns = [f"series_{j + 1}" for j in range(X.shape[1])]
    if len(columns) != X.shape[1]:
        raise FormatError(f"{len(columns)} names for {X.shape[1]} columns")
    _write_rows(path, columns, X)


def write_replications_csv(
    path, config: ScenarioConfig, reports: Sequence[MetricsReport]
) -> None:
    """Per-replication error rows, replication-major, method order as given."""
    header = ["scenario", "family", "p", "n", "rep", "method", "cc_err", "fl_dist", "fs_dist"]

    def rows():
        for rep in range(config.replications):
            for report in reports:
                e = report.errors[rep]
                yield (
                    config.scenario,
                    config.family,
                    config.p,
                    config.n,
                    rep + 1,
                    report.method,
                    e.cc_err,
                    e.fl_dist,
                    e.fs_dist,
                )

    _write_rows(path, header, rows())


def write_aggregate_csv(path, config: ScenarioConfig, reports: Sequence[MetricsReport]) -> None:
    """One summary row per method."""
    header = [
        "scenario",
        "family",
        "p",
        "n",
        "method",
        "mee_cc",
        "mee_cc_iqr",
        "ave_fl",
        "ave_fl_sd",
        "ave_fs",
        "ave_fs_sd",
    ]
    rows = [
        (
            config.scenario,
            config.family,
            config.p,
            config.n,
            r.method,
            r.mee_cc,
            r.mee_cc_iqr,
            r.ave_fl,
            r.ave_fl_sd,
            r.ave_fs,
            r.ave_fs_sd,
        )
        for r in reports
    ]
    _write_rows(path, header, rows)


def write_netvalue_csv(path, result: BacktestResult) -> None:
    header = ["period", "return", "net_value"]
    rows = zip(result.periods, result.returns, result.net_value)
    _write_rows(path, header, rows)


def write_weights_csv(path, result: BacktestResult, columns: Sequence[str]) -> None:
    if len(columns) != result.weights.shape[1]:
        raise FormatError(f"{len(columns)} names for {result.weights.shape[1]} series")
    header = ["period", *columns]
    rows = (
        (period, *w_row) for period, w_row in zip(result.periods, result.weights)
    )
    _write_rows(path, header, rows)


def write_contamination_csv(path, reports: Sequence[ContaminationReport]) -> None:
    header = ["method", "level", "mean_distance"]

    def rows():
        for report in reports:
            for level, dist in zip(report.levels, report.mean_distance):
                yield (report.method, level, dist)

    _write_rows(path, header, rows())


def write_loadings_csv(path, loadings: np.ndarray, columns: Sequence[str]) -> None:
    """Loadings with one row per series, one column per factor."""
    m = loadings.shape[1]
    header = ["series", *[f"factor_{j + 1}" for j in range(m)]]
    rows = ((name, *row) for name, row in zip(columns, loadings))
    _write_rows(path, header, rows)


def write_scores_csv(path, scores: np.ndarray) -> None:
    """Scores with one row per period, one column per factor."""
    m = scores.shape[1]
    header = ["period", *[f"factor_{j + 1}" for j in range(m)]]
    rows = ((t + 1, *row) for t, row in enumerate(scores))
    _write_rows(path, header, rows)
