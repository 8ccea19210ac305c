"""Command line entry point.

Five subcommands cover the toolkit: ``simulate`` (Monte Carlo study of the
two estimators), ``fit`` (estimate loadings and scores from a panel CSV),
``select-rank`` (eigenvalue-ratio factor count), ``backtest`` (rolling
minimum-variance portfolio), and ``perturb`` (loading sensitivity to data
contamination).

Every option can also come from a ``--config`` file of ``key = value`` lines
(``#`` starts a comment); explicit flags win over file values. The seed
falls back to the RFA_SEED environment variable when neither provides one.
Exit codes: 0 success, 1 runtime failure, 2 usage error. stdout carries only
machine-readable output; progress and diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .dataio import (
    read_panel,
    write_aggregate_csv,
    write_contamination_csv,
    write_loadings_csv,
    write_netvalue_csv,
    write_replications_csv,
    write_scores_csv,
    write_weights_csv,
)
from .distributions import RngStream
from .errors import RobustFAError
from .factor import estimate_factor_number, fit_pca, fit_rts
from .portfolio import contamination_sensitivity, rolling_backtest
from .simulation import FAMILIES, SCENARIOS, ScenarioConfig, run_replications


class UsageError(Exception):
    """Bad invocation: unknown option value, missing requirement, bad config."""


@dataclass(frozen=True)
class CliConfig:
    """Resolved options of one invocation (flags over config file over defaults)."""

    command: str
    scenario: str | None = None
    family: str = "gaussian"
    p: int | None = None
    n: int | None = None
    m: int | None = None
    theta: float = 1.0
    rho: float | None = None
    beta: float | None = None
    J: int | None = None
    snr: float = 1.0
    reps: int = 100
    seed: int = 0
    threads: int | None = None
    out: str = "."
    input: str | None = None
    method: str = "rts"
    m_max: int | None = None
    window: int = 52
    levels: tuple[float, ...] = (0.0, 0.01, 0.05, 0.1)


_REQUIRED = object()


def _int_conv(raw) -> int:
    try:
        return int(str(raw), 10)
    except ValueError:
        raise UsageError(f"expected an integer, got {raw!r}") from None


def _float_conv(raw) -> float:
    try:
        return float(str(raw))
    except ValueError:
        raise UsageError(f"expected a number, got {raw!r}") from None


def _str_conv(raw) -> str:
    return str(raw)


def _levels_conv(raw) -> tuple[float, ...]:
    parts = [part.strip() for part in str(raw).split(",")]
    if not parts or any(not part for part in parts):
        raise UsageError(f"levels must be a comma-separated list, got {raw!r}")
    return tuple(_float_conv(part) for part in parts)


def _choice_conv(options):
    def convert(raw):
        value = str(raw)
        if value not in options:
            raise UsageError(f"expected one of {', '.join(options)}, got {value!r}")
        return value

    return convert


def _seed_default() -> int:
    raw = os.environ.get("RFA_SEED")
    if raw is None:
        return 0
    try:
        return int(raw, 10)
    except ValueError:
        raise UsageError(f"RFA_SEED must be an integer, got {raw!r}") from None


def _threads_default() -> int:
    return os.cpu_count() or 1


_METHOD_ANY = ("rts", "pca", "both")
_METHOD_ONE = ("rts", "pca")

# field name -> (converter, default); _REQUIRED marks mandatory fields and a
# callable default is evaluated at parse time (seed looks at RFA_SEED)
_COMMAND_FIELDS = {
    "simulate": {
        "scenario": (_choice_conv(SCENARIOS), _REQUIRED),
        "family": (_choice_conv(FAMILIES), "gaussian"),
        "p": (_int_conv, _REQUIRED),
        "n": (_int_conv, _REQUIRED),
        "m": (_int_conv, 3),
        "theta": (_float_conv, 1.0),
        "rho": (_float_conv, None),
        "beta": (_float_conv, None),
        "J": (_int_conv, None),
        "snr": (_float_conv, 1.0),
        "reps": (_int_conv, 100),
        "seed": (_int_conv, _seed_default),
        "threads": (_int_conv, _threads_default),
        "out": (_str_conv, "."),
    },
    "fit": {
        "input": (_str_conv, _REQUIRED),
        "method": (_choice_conv(_METHOD_ANY), "both"),
        "m": (_int_conv, None),
        "m_max": (_int_conv, None),
        "threads": (_int_conv, _threads_default),
        "out": (_str_conv, "."),
    },
    "select-rank": {
        "input": (_str_conv, _REQUIRED),
        "method": (_choice_conv(_METHOD_ONE), "rts"),
        "m_max": (_int_conv, None),
        "threads": (_int_conv, _threads_default),
    },
    "backtest": {
        "input": (_str_conv, _REQUIRED),
        "method": (_choice_conv(_METHOD_ONE), "rts"),
        "m": (_int_conv, 3),
        "window": (_int_conv, 52),
        "threads": (_int_conv, _threads_default),
        "out": (_str_conv, "."),
    },
    "perturb": {
        "input": (_str_conv, _REQUIRED),
        "method": (_choice_conv(_METHOD_ANY), "both"),
        "m": (_int_conv, 3),
        "levels": (_levels_conv, (0.0, 0.01, 0.05, 0.1)),
        "reps": (_int_conv, 100),
        "seed": (_int_conv, _seed_default),
        "threads": (_int_conv, _threads_default),
        "out": (_str_conv, "."),
    },
}

_HELP = {
    "scenario": f"error design, one of {', '.join(SCENARIOS)}",
    "family": f"distribution family, one of {', '.join(FAMILIES)}",
    "p": "cross-section size (number of series)",
    "n": "sample size (number of periods)",
    "m": "number of factors",
    "theta": "idiosyncratic variance multiplier",
    "rho": "AR(1) coefficient of the errors (scenario default if omitted)",
    "beta": "neighbor mixing weight (scenario default if omitted)",
    "J": "neighbor band half-width (scenario default if omitted)",
    "snr": "scatter of the weak third factor (scenario C)",
    "reps": "number of repetitions",
    "seed": "base seed (falls back to RFA_SEED, then 0)",
    "threads": "worker threads; never changes results",
    "out": "output directory",
    "input": "panel CSV (header row of names, numeric body)",
    "method": "estimator to use",
    "m_max": "largest candidate factor count",
    "window": "trailing estimation window length",
    "levels": "comma-separated contamination fractions in [0, 0.5]",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robustfa",
        description="Heavy-tail-robust factor analysis toolkit",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, fields in _COMMAND_FIELDS.items():
        sub = subparsers.add_parser(command, help=f"{command} (see module docs)")
        sub.add_argument("--config", default=None, help="key = value option file")
        for name in fields:
            flag = "--" + name.replace("_", "-")
            sub.add_argument(flag, default=None, metavar=name.upper(), help=_HELP[name])
    return parser


def _load_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path, "r") as fh:
            for line_no, line in enumerate(fh, start=1):
                text = line.split("#", 1)[0].strip()
                if not text:
                    continue
                key, sep, value = text.partition("=")
                key = key.strip().replace("-", "_")
                value = value.strip()
                if not sep or not key or not value:
                    raise UsageError(f"{path}:{line_no}: expected 'key = value'")
                values[key] = value
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    return values


def parse_config(argv) -> CliConfig:
    """Parse argv into a CliConfig, applying the config file and defaults."""
    namespace = build_parser().parse_args(argv)
    fields = _COMMAND_FIELDS[namespace.command]
    file_values = _load_config_file(namespace.config) if namespace.config else {}
    unknown = sorted(set(file_values) - set(fields))
    if unknown:
        raise UsageError(
            f"unknown config key(s) for {namespace.command}: {', '.join(unknown)}"
        )
    resolved = {}
    for name, (convert, default) in fields.items():
        raw = getattr(namespace, name)
        if raw is not None:
            resolved[name] = convert(raw)
        elif name in file_values:
            resolved[name] = convert(file_values[name])
        elif default is _REQUIRED:
            flag = "--" + name.replace("_", "-")
            raise UsageError(f"{namespace.command}: missing required option {flag}")
        elif callable(default):
            resolved[name] = default()
        else:
            resolved[name] = default
    return CliConfig(command=namespace.command, **resolved)


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def _outdir(config: CliConfig) -> Path:
    path = Path(config.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _fit_methods(config: CliConfig) -> tuple[str, ...]:
    return ("rts", "pca") if config.method == "both" else (config.method,)


def _run_simulate(config: CliConfig) -> int:
    scenario = ScenarioConfig(
        scenario=config.scenario,
        p=config.p,
        n=config.n,
        family=config.family,
        m=config.m,
        theta=config.theta,
        rho=config.rho,
        beta=config.beta,
        J=config.J,
        snr=config.snr,
        replications=config.reps,
        seed=config.seed,
    )
    _note(
        f"simulate: scenario {scenario.scenario}, family {scenario.family}, "
        f"p={scenario.p}, n={scenario.n}, {scenario.replications} replications"
    )
    reports = run_replications(scenario, n_jobs=config.threads)
    outdir = _outdir(config)
    write_replications_csv(outdir / "replications.csv", scenario, reports)
    write_aggregate_csv(outdir / "aggregate.csv", scenario, reports)
    _note(f"simulate: wrote {outdir / 'replications.csv'} and {outdir / 'aggregate.csv'}")
    return 0


def _run_fit(config: CliConfig) -> int:
    panel = read_panel(config.input)
    outdir = _outdir(config)
    for method in _fit_methods(config):
        if config.m is None:
            m = estimate_factor_number(
                panel.values, config.m_max, method=method, n_jobs=config.threads
            )
            _note(f"fit: {method} selected m={m} by eigenvalue ratio")
        else:
            m = config.m
        fit_fn = fit_rts if method == "rts" else fit_pca
        fit = fit_fn(panel.values, m, n_jobs=config.threads)
        if fit.eigengap_warning:
            _note(f"fit: {method} eigengap at m={m} is below tolerance; basis unstable")
        write_loadings_csv(outdir / f"loadings_{method}.csv", fit.loadings, panel.columns)
        write_scores_csv(outdir / f"scores_{method}.csv", fit.scores)
        _note(f"fit: wrote {outdir / f'loadings_{method}.csv'} and {outdir / f'scores_{method}.csv'}")
    return 0


def _run_select_rank(config: CliConfig) -> int:
    panel = read_panel(config.input)
    m = estimate_factor_number(
        panel.values, config.m_max, method=config.method, n_jobs=config.threads
    )
    print(m)
    return 0


def _run_backtest(config: CliConfig) -> int:
    panel = read_panel(config.input)
    result = rolling_backtest(
        panel.values, config.method, config.m, config.window, n_jobs=config.threads
    )
    outdir = _outdir(config)
    write_netvalue_csv(outdir / "netvalue.csv", result)
    write_weights_csv(outdir / "weights.csv", result, panel.columns)
    _note(
        f"backtest: {result.returns.size} periods, terminal net value "
        f"{result.net_value[-1]:.6g}; wrote {outdir / 'netvalue.csv'} and {outdir / 'weights.csv'}"
    )
    return 0


def _run_perturb(config: CliConfig) -> int:
    panel = read_panel(config.input)
    centered = panel.values - panel.values.mean(axis=0)
    stream = RngStream(config.seed, 0)
    reports = []
    for method in _fit_methods(config):
        _note(f"perturb: {method}, levels {', '.join(str(v) for v in config.levels)}")
        reports.append(
            contamination_sensitivity(
                centered,
                method,
                config.m,
                config.levels,
                config.reps,
                stream,
                n_jobs=config.threads,
            )
        )
    outdir = _outdir(config)
    write_contamination_csv(outdir / "contamination.csv", reports)
    _note(f"perturb: wrote {outdir / 'contamination.csv'}")
    return 0


_HANDLERS = {
    "simulate": _run_simulate,
    "fit": _run_fit,
    "select-rank": _run_select_rank,
    "backtest": _run_backtest,
    "perturb": _run_perturb,
}


def dispatch(config: CliConfig) -> int:
    return _HANDLERS[config.command](config)


def main(argv=None) -> int:
    args = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        config = parse_config(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        # argparse has already printed its message (or the help text)
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return dispatch(config)
    except (RobustFAError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
