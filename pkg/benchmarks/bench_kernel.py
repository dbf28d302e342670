"""Time the compiled cohort integrator against the pure-Python fallback.

    python benchmarks/bench_kernel.py [--repeat N] [--last-year Y]
"""
import argparse
import statistics
import time
from pathlib import Path

import numpy as np

from pidmodel import _pykernel, kernels
from pidmodel.economy import load_growth_series
from pidmodel.trajectory import PRESETS, build_context

DATA = Path(__file__).resolve().parents[1] / "data"


def kernel_args(params, ctx):
    _, _, s, l = params.state_arrays()
    starts = np.arange(ctx.first_year, ctx.last_year)
    e0 = np.zeros(starts.size, dtype=np.int64)
    return (ctx.lam, ctx.tcr, ctx.alpha1, s, l, params.alpha0, starts - ctx.first_year, e0, params.max_experience)


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t)
    return out, min(times), statistics.median(times)


def run(repeat=5, last_year=2002):
    params = PRESETS[1960]
    series = load_growth_series(DATA / "gdp.csv")
    ctx = build_context(params, series, last_year)
    args = kernel_args(params, ctx)
    rows = []
    py_out, py_best, py_med = best_of(_pykernel.evolve_cohorts, args, repeat)
    rows.append(("python", py_best, py_med))
    diff = None
    if kernels.BACKEND == "cython":
        c_out, c_best, c_med = best_of(kernels.evolve_cohorts, args, repeat)
        rows.append(("cython", c_best, c_med))
        ok = np.isfinite(py_out)
        diff = float(np.max(np.abs(c_out[ok] - py_out[ok])))
    return py_out.shape, rows, diff


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--last-year", type=int, default=2002)
    args = ap.parse_args()
    shape, rows, diff = run(args.repeat, args.last_year)
    print(f"cohorts x experiences x states = {shape[0]} x {shape[1]} x {shape[2]}")
    print(f"{'backend':8s} {'best s':>10s} {'median s':>10s}")
    for name, best, med in rows:
        print(f"{name:8s} {best:10.4f} {med:10.4f}")
    if diff is None:
        print("compiled kernel not available")
    else:
        print(f"speedup (best) {rows[0][1] / rows[1][1]:.1f}x, max abs difference {diff:.2e}")


if __name__ == "__main__":
    main()
