"""Command-line front end: ingest, qcf, ppgrid, asym, simulate, fit, resim, index.

Reads the documented CSV formats, writes plot-ready CSV/JSON atomically,
and is deterministic given its inputs and flags.  QCORR_SEED in the
environment overrides --seed everywhere.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import serialize
from .errors import DataFormatError, QcorrError
from .fitting import average_params, derived_seeds, fit_per_day, resimulate_experiment
from .garch import GarchParams, simulate
from .ingest import (
    MIN_TRADED_SECONDS,
    SESSION_TRIM_SECONDS,
    TradingDay,
    DayRejection,
    build_index,
    compute_returns,
    read_ticks_csv,
    resample_day,
)
from .qcf import asymmetry_from_arrays, average_curves, confidence_band, pp_grid, qcf_fast
from .qcf import average_grids
from .series import TimeSeries

DEFAULT_PAIRS = [(0.05, 0.05), (0.5, 0.5), (0.95, 0.95), (0.05, 0.5), (0.5, 0.95), (0.05, 0.95)]
DEFAULT_GRID_LEVELS = [i / 20 for i in range(1, 20)]  # 0.05 .. 0.95
DEFAULT_SIM_GRID_LAGS = [2, 10]
DEFAULT_DAY_GRID_LAG_SECONDS = [120, 600, 1200, 3600]

VALUES_HEADER = "value"


def resolve_seed(args) -> int:
    env = os.environ.get("QCORR_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"QCORR_SEED must be an integer, got {env!r}") from None
    return int(args.seed)


def _read_text(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")


# Log artifacts our own commands drop next to their data outputs.
_NON_DATA_NAMES = {"rejections.csv", "manifest.json"}


def _expand_inputs(paths: list[str]) -> list[Path]:
    out: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            found = sorted(
                q for q in p.iterdir() if q.suffix == ".csv" and q.name not in _NON_DATA_NAMES
            )
            if not found:
                raise ValueError(f"no .csv files inside directory {p}")
            out.extend(found)
        elif p.exists():
            out.append(p)
        else:
            raise ValueError(f"input path does not exist: {p}")
    return out


def values_to_csv(values) -> str:
    lines = [VALUES_HEADER]
    lines.extend(serialize.fmt(v) for v in np.asarray(values, dtype=float))
    return "\n".join(lines) + "\n"


def load_series(path: Path, horizon: int, stride: int) -> TimeSeries:
    """Sniff a CSV by header: day prices, simulation output, or raw values."""
    text = _read_text(path)
    header = text.splitlines()[0].strip() if text.strip() else ""
    if header == serialize.DAY_HEADER:
        prices = serialize.prices_from_day_csv(text)
        day = TradingDay(instrument=path.stem, date="", prices=prices, traded_seconds=prices.size)
        series = compute_returns(day, horizon, stride)
        return TimeSeries(series.values, step=series.step, label=path.stem)
    if header == serialize.SIM_HEADER:
        return TimeSeries(serialize.returns_from_sim_csv(text), step=1.0, label=path.stem)
    if header == VALUES_HEADER:
        values = np.array([float(line) for line in text.splitlines()[1:] if line.strip()])
        return TimeSeries(values, step=1.0, label=path.stem)
    raise DataFormatError(
        f"{path}: unrecognized header {header!r}; expected one of "
        f"{serialize.DAY_HEADER!r}, {serialize.SIM_HEADER!r}, {VALUES_HEADER!r}"
    )


def _is_day_file(path: Path) -> bool:
    with open(path, encoding="utf-8") as handle:
        return handle.readline().strip() == serialize.DAY_HEADER


def _parse_pairs(args) -> list[tuple[float, float]]:
    alphas = args.alpha or []
    betas = args.beta or []
    if len(alphas) != len(betas):
        raise ValueError("--alpha and --beta must be given the same number of times")
    if not alphas:
        return list(DEFAULT_PAIRS)
    return list(zip(alphas, betas))


def _pair_out_path(out: Path, alpha: float, beta: float, fmt: str) -> Path:
    return out / f"qcf_a{alpha:g}_b{beta:g}.{fmt}"


def _load_all_series(args) -> list[TimeSeries]:
    files = _expand_inputs(args.input)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        return list(pool.map(lambda p: load_series(p, args.horizon, args.stride), files))


def cmd_qcf(args) -> int:
    series = _load_all_series(args)
    if args.no_average and len(series) > 1:
        raise ValueError("--no-average expects a single input series")
    pairs = _parse_pairs(args)
    max_lag = args.max_lag

    def averaged(alpha: float, beta: float):
        curves = [qcf_fast(s, alpha, beta, max_lag) for s in series]
        return curves[0] if len(curves) == 1 else average_curves(curves)

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        curves = list(pool.map(lambda ab: averaged(*ab), pairs))
    if not args.no_band:
        band = confidence_band(averaged(0.5, 0.5))
        curves = [c.with_ci(band) for c in curves]
    single_file = len(pairs) == 1 and Path(args.out).suffix in (".csv", ".json")
    outputs: list[tuple[Path, str]] = []
    for (alpha, beta), curve in zip(pairs, curves):
        text = serialize.curve_to_json(curve) if args.format == "json" else serialize.curve_to_csv(curve)
        path = Path(args.out) if single_file else _pair_out_path(Path(args.out), alpha, beta, args.format)
        outputs.append((path, text))
    for path, text in outputs:
        serialize.write_text_atomic(path, text)
    return 0


def _parse_levels(text: str) -> list[float]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("--levels range must be start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError("--levels range must increase")
        count = int(round((stop - start) / step))
        levels = [start + i * step for i in range(count + 1)]
        return [l for l in levels if l <= stop + 1e-12]
    return [float(p) for p in text.split(",") if p.strip()]


def cmd_ppgrid(args) -> int:
    files = _expand_inputs(args.input)
    day_input = _is_day_file(files[0])
    series = _load_all_series(args)
    levels = _parse_levels(args.levels) if args.levels else list(DEFAULT_GRID_LEVELS)
    if args.lag:
        lags = list(args.lag)
    elif day_input:
        lags = []
        for seconds in DEFAULT_DAY_GRID_LAG_SECONDS:
            if seconds % args.stride:
                raise ValueError(f"default lag {seconds}s is not a multiple of stride {args.stride}")
            lags.append(seconds // args.stride)
    else:
        lags = list(DEFAULT_SIM_GRID_LAGS)

    def averaged(lag: int):
        grids = [pp_grid(s, levels, lag) for s in series]
        return grids[0] if len(grids) == 1 else average_grids(grids)

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        grids = list(pool.map(averaged, lags))
    single_file = len(lags) == 1 and Path(args.out).suffix in (".csv", ".json")
    for lag, grid in zip(lags, grids):
        text = serialize.grid_to_json(grid) if args.format == "json" else serialize.grid_to_csv(grid)
        path = Path(args.out) if single_file else Path(args.out) / f"ppgrid_lag{lag}.{args.format}"
        serialize.write_text_atomic(path, text)
    return 0


def _round_percent(delta: float) -> int:
    return int(math.copysign(math.floor(abs(delta) * 100.0 + 0.5), delta))


def cmd_asym(args) -> int:
    files = _expand_inputs(args.input)
    rows = []
    for path in files:
        text = _read_text(path)
        if path.suffix == ".json":
            curve = serialize.curve_from_json(text)
            lags, values = curve.lags, curve.values
        else:
            lags, values, _ = serialize.curve_arrays_from_csv(text)
        report = asymmetry_from_arrays(lags, values, args.max_lag)
        dataset = args.dataset if args.dataset else path.stem
        rows.append((dataset, args.year, report))
    print("Dataset,Year,dA")
    for dataset, year, report in rows:
        print(f"{dataset},{year},{_round_percent(report.delta)}%")
    lines = ["dataset,year,delta,area_neg,area_pos,max_lag"]
    for dataset, year, report in rows:
        lines.append(
            f"{dataset},{year},{serialize.fmt(report.delta)},"
            f"{serialize.fmt(report.area_neg)},{serialize.fmt(report.area_pos)},{report.max_lag}"
        )
    serialize.write_text_atomic(args.out, "\n".join(lines) + "\n")
    return 0


def _params_from_args(args) -> GarchParams:
    return GarchParams(
        kind=args.model,
        mu=args.mu,
        omega=args.omega,
        alpha1=args.alpha1,
        beta1=args.beta1,
        gamma1=args.gamma1,
    )


def cmd_simulate(args) -> int:
    params = _params_from_args(args)
    sim = simulate(params, args.length, resolve_seed(args), args.burn_in)
    out = Path(args.out)
    if args.format == "json":
        doc = json.loads(serialize.simulation_meta_json(sim, params))
        doc["returns"] = [float(v) for v in sim.returns.values]
        doc["variances"] = [float(v) for v in sim.variances]
        serialize.write_text_atomic(out, json.dumps(doc, indent=2) + "\n")
        return 0
    serialize.write_text_atomic(out, serialize.simulation_to_csv(sim))
    serialize.write_text_atomic(out.with_suffix(".meta.json"), serialize.simulation_meta_json(sim, params))
    return 0


def cmd_fit(args) -> int:
    files = _expand_inputs(args.input)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        days = list(pool.map(lambda p: load_series(p, args.horizon, args.stride), files))
    batch = fit_per_day(days)
    serialize.write_text_atomic(args.out, serialize.batch_to_csv(batch))
    if args.excluded_out:
        serialize.write_text_atomic(args.excluded_out, serialize.excluded_to_csv(batch))
    if args.params_out:
        serialize.write_text_atomic(args.params_out, serialize.params_to_json(average_params(batch)))
    print(f"fitted {len(batch.fits)} day(s), excluded {len(batch.excluded)}")
    return 0


def cmd_resim(args) -> int:
    params = serialize.params_from_json(_read_text(args.params))
    seed = resolve_seed(args)
    sims = resimulate_experiment(params, args.n_series, args.length, seed, args.burn_in)
    out = Path(args.out)
    manifest = {
        "params": json.loads(serialize.params_to_json(params)),
        "master_seed": seed,
        "n_series": args.n_series,
        "length": args.length,
        "burn_in": args.burn_in,
        "seeds": derived_seeds(seed, args.n_series),
        "files": [f"sim_{i:04d}.csv" for i in range(args.n_series)],
    }
    for i, sim in enumerate(sims):
        serialize.write_text_atomic(out / f"sim_{i:04d}.csv", serialize.simulation_to_csv(sim))
    serialize.write_text_atomic(out / "manifest.json", json.dumps(manifest, indent=2) + "\n")
    return 0


def _resample_groups(args):
    groups = read_ticks_csv(_read_text(args.input))
    accepted: list[TradingDay] = []
    rejections: list[DayRejection] = []
    for (date, _instrument), ticks in groups.items():
        result = resample_day(
            ticks,
            args.session_open,
            args.session_close,
            date=date,
            trim_seconds=args.trim,
            min_traded_seconds=args.min_traded,
        )
        if isinstance(result, DayRejection):
            rejections.append(result)
        else:
            accepted.append(result)
    return accepted, rejections


def _safe_name(name: str) -> str:
    return "".join(c if (c.isalnum() or c in "._-") else "_" for c in name) or "_"


def cmd_ingest(args) -> int:
    accepted, rejections = _resample_groups(args)
    out = Path(args.out)
    for day in accepted:
        name = f"{_safe_name(day.instrument)}_{_safe_name(day.date)}.csv"
        serialize.write_text_atomic(out / name, serialize.day_to_csv(day))
    serialize.write_text_atomic(out / "rejections.csv", serialize.rejections_to_csv(rejections))
    print(f"accepted {len(accepted)} day(s), rejected {len(rejections)}")
    return 0


def cmd_index(args) -> int:
    accepted, rejections = _resample_groups(args)
    by_date: dict[str, list[TradingDay]] = {}
    for day in accepted:
        by_date.setdefault(day.date, []).append(day)
    out = Path(args.out)
    for date in sorted(by_date):
        index_day = build_index(by_date[date])
        serialize.write_text_atomic(
            out / f"INDEX_{_safe_name(date)}.csv", serialize.day_to_csv(index_day)
        )
    serialize.write_text_atomic(out / "rejections.csv", serialize.rejections_to_csv(rejections))
    print(f"built {len(by_date)} index day(s), rejected {len(rejections)} day(s)")
    return 0


def _add_input(parser, required=True):
    parser.add_argument(
        "--input", "-i", action="append", required=required,
        help="input file or directory of .csv files; repeatable",
    )


def _add_common_series(parser):
    parser.add_argument("--horizon", type=int, default=60,
                        help="return horizon in grid seconds for day-price inputs")
    parser.add_argument("--stride", type=int, default=1,
                        help="spacing of return start points in grid seconds")
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                        help="worker threads for per-input fan-out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcorr",
        description="Quantile-correlation analysis of time series with GARCH-family tooling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qcf", help="quantile-correlation curves with confidence band")
    _add_input(p)
    p.add_argument("--alpha", type=float, action="append", help="quantile level; repeatable, paired with --beta")
    p.add_argument("--beta", type=float, action="append")
    p.add_argument("--max-lag", type=int, required=True)
    _add_common_series(p)
    p.add_argument("--no-average", action="store_true", help="single-series analysis; refuse multiple inputs")
    p.add_argument("--no-band", action="store_true", help="skip the (0.5,0.5) confidence band")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_qcf)

    p = sub.add_parser("ppgrid", help="probability-probability grid at fixed lags")
    _add_input(p)
    p.add_argument("--levels", help="comma list or start:stop:step; default 0.05:0.95:0.05")
    p.add_argument("--lag", type=int, action="append",
                   help="lag in observation steps; repeatable; defaults depend on input kind")
    _add_common_series(p)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_ppgrid)

    p = sub.add_parser("asym", help="area asymmetry of stored curves")
    _add_input(p)
    p.add_argument("--max-lag", type=int, default=None)
    p.add_argument("--dataset", default="", help="dataset label for the report; default: file stem")
    p.add_argument("--year", default="", help="year label for the report")
    p.add_argument("--out", required=True, help="full-precision CSV output")
    p.set_defaults(func=cmd_asym)

    p = sub.add_parser("simulate", help="simulate a GARCH-family process")
    p.add_argument("--model", required=True, choices=("garch", "egarch", "gjr"))
    p.add_argument("--mu", type=float, default=0.001)
    p.add_argument("--omega", type=float, default=1e-5)
    p.add_argument("--alpha1", type=float, default=0.05)
    p.add_argument("--beta1", type=float, default=0.9)
    p.add_argument("--gamma1", type=float, default=0.0)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="per-day GJR-GARCH fits")
    _add_input(p)
    p.add_argument("--horizon", type=int, default=60)
    p.add_argument("--stride", type=int, default=60,
                   help="default 60: non-overlapping one-minute returns")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", required=True, help="fit batch CSV")
    p.add_argument("--params-out", help="averaged parameter JSON")
    p.add_argument("--excluded-out", help="CSV log of excluded days")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("resim", help="simulate many series from a parameter JSON")
    p.add_argument("--params", required=True)
    p.add_argument("--n-series", type=int, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_resim)

    for name, func, help_text in (
        ("ingest", cmd_ingest, "resample tick data onto per-second day grids"),
        ("index", cmd_index, "build the equally weighted index per date"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", "-i", required=True, help="tick CSV")
        p.add_argument("--session-open", type=int, default=0)
        p.add_argument("--session-close", type=int, default=23400)
        p.add_argument("--trim", type=int, default=SESSION_TRIM_SECONDS)
        p.add_argument("--min-traded", type=int, default=MIN_TRADED_SECONDS)
        p.add_argument("--out", required=True, help="output directory")
        p.set_defaults(func=func)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (QcorrError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
