"""Command-line front end.

Exit status: 0 success, 1 usage error, 2 data error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import calibrate as cal
from . import empirical as emp
from . import inequality as ineq
from .binned import load_binned, save_binned
from .config import load_params, parse_config
from .demography import load_pyramids, parse_pyramid_spec, stationary_pyramids, synthetic_pyramid
from .economy import load_growth_series
from .errors import DataError
from .synthesis import (
    DEFAULT_ANCHOR,
    mean_median_by_experience,
    summarize_year,
    to_binned,
)
from .trajectory import build_context


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _range(text: str):
    try:
        a, b = text.split("..")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None


def _pair(text: str, kinds=(float, float)):
    try:
        a, b = text.split(":")
        return kinds[0](a), kinds[1](b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X:Y, got {text!r}") from None


def _grid(text: str):
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
        return cal.grid_values(lo, hi, step)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO:HI:STEP ({exc})") from None


def _open_bin(text: str):
    if text in ("mean", "drop"):
        return text
    if text.startswith("pareto:"):
        try:
            return ("pareto", float(text.split(":", 1)[1]))
        except ValueError:
            pass
    raise argparse.ArgumentTypeError(f"expected pareto:K, mean or drop, got {text!r}")


def _json(obj) -> str:
    def clean(v):
        if isinstance(v, float) and (math.isnan(v) or math.isinf(v)):
            return None
        if isinstance(v, (np.floating, np.integer)):
            return clean(v.item())
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(x) for x in v]
        return v

    return json.dumps(clean(obj), sort_keys=True)


def _overrides(items) -> dict:
    # --set KEY=VALUE uses the config-file syntax and casting rules
    return parse_config("\n".join(items or []), "--set")


def _pyramids(arg: str, years):
    if arg.startswith(("uniform:", "linear:")):
        shape, kw = parse_pyramid_spec(arg)
        return stationary_pyramids(synthetic_pyramid(years[0], shape, **kw), years)
    return load_pyramids(arg)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pidmodel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("simulate", help="simulate synthetic income distributions")
    p.add_argument("--config")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config value")
    p.add_argument("--gdp", required=True)
    p.add_argument("--pyramid", required=True, help="pyramid.csv, uniform:LEVEL or linear:BASE:SLOPE")
    p.add_argument("--years", required=True, type=_range, help="A..B")
    p.add_argument("--bins", type=float, default=0.001, help="dimensionless bin width")
    p.add_argument("--anchor", type=lambda s: _pair(s, (int, float)), default=DEFAULT_ANCHOR,
                   help="YEAR:DOLLARS per model unit")
    p.add_argument("--project", type=lambda s: _pair(s, (float, int)), help="RATE:UNTIL")
    p.add_argument("--band-width", type=int, default=10)
    p.add_argument("--out", default=".")

    p = sub.add_parser("gini", help="Lorenz curve and Gini of a binned table")
    p.add_argument("--pid", required=True)
    p.add_argument("--zero-count", type=float, default=0.0)
    p.add_argument("--open-bin", type=_open_bin, default="drop")
    p.add_argument("--bin-income", choices=("center", "mean", "offset"), default="center")
    p.add_argument("--convention", choices=ineq.CONVENTIONS, default="paper")
    p.add_argument("--out", default=".")

    p = sub.add_parser("normalize", help="normalize a binned table")
    p.add_argument("--pid", required=True)
    p.add_argument("--per-person", action="store_true")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--rescale", type=float, metavar="FACTOR")
    g.add_argument("--gpi", type=float, metavar="TOTAL")
    p.add_argument("--density", action="store_true")
    p.add_argument("--out", default=".")

    p = sub.add_parser("pareto-fit", help="estimate the Pareto index above a threshold")
    p.add_argument("--pid", required=True)
    p.add_argument("--threshold", required=True, type=float)
    p.add_argument("--method", choices=("mean", "regression"), default="regression")
    p.add_argument("--convention", choices=ineq.CONVENTIONS, default="paper")

    p = sub.add_parser("calibrate", help="grid-search alpha0 and tcr0")
    p.add_argument("--obs", required=True, help="directory of YEAR.csv dimensionless tables")
    p.add_argument("--gdp", required=True)
    p.add_argument("--pyramid", required=True)
    p.add_argument("--alpha", required=True, type=_grid, help="LO:HI:STEP")
    p.add_argument("--tcr", required=True, type=_grid, help="LO:HI:STEP")
    p.add_argument("--config")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config value")
    p.add_argument("--out", default=".")
    return parser


def cmd_simulate(args, out):
    params = load_params(args.config, _overrides(args.set))
    series = load_growth_series(args.gdp)
    first, last = args.years
    if first > last:
        raise UsageError("--years A..B needs A <= B")
    horizon = last
    if args.project:
        rate, until = args.project
        series = series.extend(until, rate)
        horizon = max(horizon, until)
    years = list(range(first, last + 1))
    pyramids = _pyramids(args.pyramid, list(range(params.t0, horizon + 1)))
    context = build_context(params, series, last)
    out_dir = Path(args.out)
    for year in years:
        summary, pop, scale = summarize_year(params, context, pyramids, year, args.anchor)
        ydir = out_dir / str(year)
        ydir.mkdir(parents=True, exist_ok=True)
        save_binned(to_binned(pop, args.bins), ydir / "pid.csv")
        bands = mean_median_by_experience(pop, args.band_width)
        with (ydir / "bands.csv").open("w") as fh:
            fh.write("band_lo,band_hi,mean,median,norm_mean,norm_median\n")
            for b in bands:
                fh.write(f"{b.lo},{b.hi},{b.mean!r},{b.median!r},{b.norm_mean!r},{b.norm_median!r}\n")
        line = _json(summary.as_dict())
        (ydir / "summary.json").write_text(line + "\n")
        print(line, file=out)


def cmd_gini(args, out):
    pid = load_binned(args.pid)
    pid = ineq.with_zero_income_mass(pid, args.zero_count)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lorenz = ineq.lorenz_from_bins(pid, args.bin_income, args.open_bin, convention=args.convention)
    gini = ineq.gini_trapezoid(lorenz)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    lorenz.save(out_dir / "lorenz.csv")
    mode = args.open_bin if isinstance(args.open_bin, str) else "pareto"
    k = None if isinstance(args.open_bin, str) else args.open_bin[1]
    x_m = float(pid.lower[-1]) if pid.has_open else None
    record = {"gini": gini, "convention": args.convention, "open_bin_mode": mode, "k": k, "x_m": x_m}
    line = _json(record)
    (out_dir / "gini.json").write_text(line + "\n")
    print(line, file=out)


def cmd_normalize(args, out):
    pid = load_binned(args.pid)
    obj = emp.to_density(pid) if args.density else pid
    if args.per_person:
        obj = emp.per_person(obj)
    if args.gpi is not None:
        obj = emp.per_income_total(obj, args.gpi) if args.per_person else emp.rescale_income(obj, args.gpi)
    elif args.rescale is not None:
        obj = emp.rescale_income(obj, args.rescale)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.density:
        obj.save(out_dir / "density.csv")
        target = out_dir / "density.csv"
    else:
        save_binned(obj, out_dir / "pid.csv")
        target = out_dir / "pid.csv"
    print(_json({"output": str(target), "normalization": obj.normalization, "units": obj.units}), file=out)


def cmd_pareto_fit(args, out):
    pid = load_binned(args.pid)
    sel = pid.lower >= args.threshold
    if args.method == "regression":
        closed = sel & np.isfinite(pid.upper) & (pid.count > 0)
        x = 0.5 * (pid.lower[closed] + pid.upper[closed])
        d = pid.count[closed] / (pid.upper[closed] - pid.lower[closed])
        k = ineq.pareto_k_from_regression(x, d, args.convention)
        used = int(closed.sum())
    else:
        means = pid.mean_income.copy()
        closed = np.isfinite(pid.upper)
        means[closed & np.isnan(means)] = 0.5 * (pid.lower + pid.upper)[closed & np.isnan(means)]
        use = sel & ~np.isnan(means) & (pid.count > 0)
        if not use.any():
            raise DataError("no bins with incomes above the threshold")
        x_av = float(np.dot(pid.count[use], means[use]) / pid.count[use].sum())
        k = ineq.pareto_k_from_mean(args.threshold, x_av, args.convention)
        used = int(use.sum())
    print(_json({"k": k, "x_m": args.threshold, "convention": args.convention, "method": args.method,
                 "bins_used": used}), file=out)


def _load_observations(directory) -> dict:
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError("not a directory", directory)
    obs = {}
    for path in sorted(directory.glob("*.csv")):
        stem = path.stem.removeprefix("pid_")
        if stem.isdigit():
            obs[int(stem)] = load_binned(path, units="dimensionless")
    if not obs:
        raise DataError("no YEAR.csv observation files", directory)
    return obs


def cmd_calibrate(args, out):
    base = load_params(args.config, _overrides(args.set))
    series = load_growth_series(args.gdp)
    obs = _load_observations(args.obs)
    years = sorted(obs)
    pyramids = _pyramids(args.pyramid, list(range(base.t0, max(years) + 1)))
    result = cal.fit_model(args.alpha, args.tcr, obs, series, pyramids, base)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result.save_surface(out_dir / "misfit.csv")
    line = _json(result.as_dict())
    (out_dir / "best.json").write_text(line + "\n")
    print(line, file=out)


COMMANDS = {
    "simulate": cmd_simulate,
    "gini": cmd_gini,
    "normalize": cmd_normalize,
    "pareto-fit": cmd_pareto_fit,
    "calibrate": cmd_calibrate,
}


def dispatch(argv, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return 1
        COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (DataError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv=None):
    sys.exit(dispatch(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
