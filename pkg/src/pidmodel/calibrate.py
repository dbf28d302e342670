"""Grid-search calibration of the dissipation factor and critical experience."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .binned import BinnedPID
from .errors import DataError
from .synthesis import simulate_year
from .trajectory import ModelParams, build_context

MISFIT_NAME = "l2-per-person-density-below-mp"


def grid_values(lo: float, hi: float, step: float) -> np.ndarray:
    """Inclusive grid ``lo, lo + step, ..., hi`` (rounded to 12 digits)."""
    if step <= 0 or hi < lo:
        raise ValueError("degenerate grid")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(n), 12)


def binned_counts(incomes: np.ndarray, weights: np.ndarray, pid: BinnedPID) -> np.ndarray:
    """Weights falling in each bin of ``pid`` (half-open bins, zero bin takes income 0)."""
    counts = np.zeros(len(pid))
    start = 0
    if pid.has_zero_bin:
        counts[0] = weights[incomes == 0].sum()
        start = 1
    lower = pid.lower[start:]
    upper = pid.upper[start:]
    idx = np.searchsorted(lower, incomes, side="right") - 1
    ok = (idx >= 0) & (incomes > (0 if start else -np.inf))
    ok[ok] &= incomes[ok] < upper[idx[ok]]
    counts[start:] = np.bincount(idx[ok], weights=weights[ok], minlength=lower.size)
    return counts


def density_misfit(params: ModelParams, context, pyramids: dict, observations: dict) -> float:
    """Summed L2 distance between per-person densities on bins lying below ``mp``."""
    total = 0.0
    for year, obs in observations.items():
        pop = simulate_year(params, context, pyramids, year)
        mp = context.mp_at(year)
        model = binned_counts(pop.income, pop.weight, obs) / pop.total_weight
        observed = obs.count / obs.total
        width = obs.upper - obs.lower
        sel = (obs.upper <= mp) & (width > 0)
        diff = (model[sel] - observed[sel]) / width[sel]
        total += float(np.sum(diff * diff * width[sel]))
    return total


@dataclass(frozen=True, eq=False)
class FitResult:
    params: ModelParams
    misfit: float
    alpha_values: np.ndarray
    tcr_values: np.ndarray
    surface: np.ndarray  # (n_alpha, n_tcr); nan where the grid point is invalid
    misfit_name: str = MISFIT_NAME

    def save_surface(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["alpha0", "tcr0", "misfit"])
            for a, alpha in enumerate(self.alpha_values):
                for t, tcr in enumerate(self.tcr_values):
                    v = self.surface[a, t]
                    writer.writerow([repr(float(alpha)), repr(float(tcr)), "" if np.isnan(v) else repr(float(v))])

    def as_dict(self) -> dict:
        return {"alpha0": self.params.alpha0, "tcr0": self.params.tcr0, "misfit": self.misfit,
                "misfit_name": self.misfit_name, "grid": [len(self.alpha_values), len(self.tcr_values)]}


def fit_model(alpha_values, tcr_values, observations: dict, series, pyramids: dict,
              base: ModelParams | None = None) -> FitResult:
    """Exhaustive search over ``alpha_values x tcr_values``.

    Observations are per-year BinnedPIDs in dimensionless units.  Ties go to
    the smaller alpha0, then the smaller tcr0.
    """
    base = base or ModelParams()
    alpha_values = np.sort(np.asarray(alpha_values, dtype=float))
    tcr_values = np.sort(np.asarray(tcr_values, dtype=float))
    if alpha_values.size == 0 or tcr_values.size == 0:
        raise ValueError("degenerate grid")
    for year, obs in observations.items():
        if obs.units == "current-dollars":
            raise DataError(f"observation {year} is in dollars; apply fit_scale first")
    years = sorted(y for y in observations if y in pyramids and base.t0 <= y <= series.last_year)
    if not years:
        raise DataError("no overlapping years between observations, pyramids and series")
    obs = {y: observations[y] for y in years}
    surface = np.full((alpha_values.size, tcr_values.size), np.nan)
    for a, alpha in enumerate(alpha_values):
        for t, tcr in enumerate(tcr_values):
            try:
                params = base.with_(alpha0=float(alpha), tcr0=float(tcr))
            except ValueError:
                continue
            context = build_context(params, series, years[-1])
            try:
                surface[a, t] = density_misfit(params, context, pyramids, obs)
            except DataError:
                continue
    if np.all(np.isnan(surface)):
        raise DataError("no valid grid point")
    flat = np.where(np.isnan(surface), np.inf, surface)
    a, t = np.unravel_index(int(np.argmin(flat)), flat.shape)  # first minimum = smallest alpha, tcr
    best = base.with_(alpha0=float(alpha_values[a]), tcr0=float(tcr_values[t]))
    return FitResult(best, float(surface[a, t]), alpha_values, tcr_values, surface)


def fit_scale(predicted: dict, observed: dict) -> float:
    """Least-squares dollars per model unit: ``sum(p*o) / sum(p*p)`` over shared bands."""
    keys = sorted(set(predicted) & set(observed))
    if not keys:
        raise ValueError("no common bands")
    p = np.array([predicted[k] for k in keys], dtype=float)
    o = np.array([observed[k] for k in keys], dtype=float)
    pp = float(np.dot(p, p))
    if pp == 0:
        raise ValueError("predicted values are all zero")
    return float(np.dot(p, o) / pp)
