"""Synthetic populations: trajectories weighted by age pyramids, plus the Pareto tail."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .binned import BinnedPID
from .demography import AgePyramid
from .economy import NOMINAL_OF, GrowthSeries, growth_between
from .errors import DataError, EmptyTailWarning
from .trajectory import CalendarContext, ModelParams, build_context


@dataclass(frozen=True, eq=False)
class CohortTable:
    """Incomes of every cohort (by start year) at integer experiences 0..max."""

    first_start: int
    incomes: np.ndarray  # (n_cohorts, max_experience + 1, n_states)
    pre_t0: np.ndarray  # (n_cohorts,) bool, started work before t0

    @classmethod
    def build(cls, context: CalendarContext) -> "CohortTable":
        p = context.params
        _, _, s_prime, l_prime = p.state_arrays()
        starts = np.arange(context.first_year, context.last_year)
        if starts.size == 0:
            starts = np.array([context.first_year])
        if p.pre_t0 == "zero":
            start_exp = np.maximum(p.t0 - starts, 0)
        else:
            start_exp = np.zeros(starts.size, dtype=np.int64)
        incomes = kernels.evolve_cohorts(
            context.lam, context.tcr, context.alpha1, s_prime, l_prime, p.alpha0,
            starts - context.first_year, start_exp, p.max_experience,
        )
        return cls(int(starts[0]), incomes, starts < p.t0)

    def lookup(self, year: int, experiences: np.ndarray) -> np.ndarray:
        idx = year - np.asarray(experiences) - self.first_start
        if np.any(idx < 0) or np.any(idx >= self.incomes.shape[0]):
            raise DataError(f"context does not cover all cohorts for {year}")
        return self.incomes[idx, experiences]


@dataclass(frozen=True, eq=False)
class SyntheticPopulation:
    """One entry per (age, state); arrays ordered by age, then i, then j."""

    year: int
    age: np.ndarray
    i: np.ndarray
    j: np.ndarray
    weight: np.ndarray
    income: np.ndarray
    in_tail: np.ndarray
    pre_t0: np.ndarray  # cohort integrated with the pre-t0 rule
    work_start_age: int = 15

    @property
    def experience(self) -> np.ndarray:
        return self.age - self.work_start_age

    @property
    def total_weight(self) -> float:
        return float(self.weight.sum())

    def __len__(self):
        return int(self.age.size)

    def replace(self, **changes) -> "SyntheticPopulation":
        return replace(self, **changes)


def simulate_year(params: ModelParams, context: CalendarContext, pyramids: dict, year: int) -> SyntheticPopulation:
    if year not in pyramids:
        raise DataError(f"no pyramid for {year}")
    if year < params.t0 or year > context.last_year:
        raise DataError(f"context {params.t0}..{context.last_year} does not cover {year}")
    if context.params is not params and context.params != params:
        raise ValueError("context was built for different parameters")
    pyr: AgePyramid = pyramids[year].restrict(params.age_min, params.age_max)
    ages = params.ages
    exps = ages - params.work_start_age
    table = context.cohort_table
    inc = table.lookup(year, exps)  # (n_ages, n_states)
    if np.isnan(inc).any():
        raise DataError(f"undefined incomes in {year}: decay window empty or context too short")
    i, j, _, _ = params.state_arrays()
    n_s = i.size
    starts = year - exps
    return SyntheticPopulation(
        year=year,
        age=np.repeat(ages, n_s),
        i=np.tile(i, ages.size),
        j=np.tile(j, ages.size),
        weight=np.repeat(pyr.counts / n_s, n_s),
        income=inc.ravel().copy(),
        in_tail=np.zeros(ages.size * n_s, dtype=bool),
        pre_t0=np.repeat(starts < params.t0, n_s),
        work_start_age=params.work_start_age,
    )


def pareto_quantiles(x_m: float, index: float, p) -> np.ndarray:
    """Inverse CDF of the Pareto law ``1 - (x_m / x) ** index``."""
    return x_m * (1.0 - np.asarray(p, dtype=float)) ** (-1.0 / index)


def attach_pareto_tail(pop: SyntheticPopulation, context: CalendarContext, year: int | None = None, *,
                       k: float | None = None, convention: str | None = None, mode: str | None = None):
    """Replace incomes at or above the threshold ``mp(year)`` by Pareto quantiles.

    Tail entries keep their rank: sorted by income (ties by age, i, j) they
    receive quantiles at the midpoints of their cumulative weight, which for
    equal weights is ``p_r = (r - 0.5) / N``.  Under the ``paper`` convention
    the density exponent is ``k + 2`` (CDF index ``k + 1``); under
    ``standard`` the CDF index is ``k``.

    Returns ``(population, extra_income_ratio)``.
    """
    params = context.params
    year = pop.year if year is None else year
    k = params.k if k is None else k
    convention = params.tail_convention if convention is None else convention
    mode = params.tail_mode if mode is None else mode
    x_m = context.mp_at(year)
    tail = pop.income >= x_m
    if not tail.any():
        warnings.warn(f"no income reaches the Pareto threshold {x_m:.4g} in {year}", EmptyTailWarning,
                      stacklevel=2)
        return pop, 1.0
    idx = np.nonzero(tail)[0]
    w = pop.weight[idx]
    before = pop.income[idx]
    if mode == "multiply":
        after = before * params.tail_factor
    elif mode == "quantile":
        index = pareto_index(k, convention)
        order = np.lexsort((pop.j[idx], pop.i[idx], pop.age[idx], before))
        ws = w[order]
        cw = np.cumsum(ws)
        p = (cw - 0.5 * ws) / cw[-1]
        after = np.empty_like(before)
        after[order] = pareto_quantiles(x_m, index, p)
    else:
        raise ValueError(f"unknown tail mode {mode!r}")
    income = pop.income.copy()
    income[idx] = after
    ratio = float(np.dot(w, after) / np.dot(w, before))
    return pop.replace(income=income, in_tail=tail), ratio


def pareto_index(k: float, convention: str) -> float:
    """CDF index of the Pareto law for a ``k`` quoted under ``convention``."""
    if convention == "standard":
        return k
    if convention == "paper":
        return k + 1.0
    raise ValueError(f"unknown convention {convention!r}")


@dataclass(frozen=True)
class ScaleFactor:
    year: int
    value: float  # dollars per dimensionless unit
    anchor_year: int = 0
    anchor_value: float = 1.0
    kind: str = ""
    units: str = "current-dollars"


DEFAULT_ANCHOR = (1990, 70000.0)


def scale_factor(params: ModelParams, series: GrowthSeries, year: int, anchor=DEFAULT_ANCHOR,
                 kind: str | None = None) -> ScaleFactor:
    """Dollar value of one dimensionless unit, proportional to nominal GDP per capita."""
    kind = NOMINAL_OF[params.driver_kind] if kind is None else kind
    a_year, a_value = int(anchor[0]), float(anchor[1])
    value = a_value * growth_between(series, kind, a_year, year)
    return ScaleFactor(year, value, a_year, a_value, kind)


def to_binned(pop: SyntheticPopulation, bin_width: float, scale: ScaleFactor | float | None = None) -> BinnedPID:
    if not bin_width > 0:
        raise ValueError("bin_width must be positive")
    if scale is None:
        factor, units = 1.0, "dimensionless"
    elif isinstance(scale, ScaleFactor):
        factor, units = scale.value, scale.units
    else:
        factor, units = float(scale), "rescaled"
    x = pop.income * factor
    idx = np.floor(x / bin_width).astype(np.int64)
    idx[x < idx * bin_width] -= 1
    idx[x >= (idx + 1) * bin_width] += 1
    n = int(idx.max()) + 1 if idx.size else 1
    counts = np.bincount(idx, weights=pop.weight, minlength=n)
    sums = np.bincount(idx, weights=pop.weight * x, minlength=n)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(counts > 0, sums / counts, np.nan)
    edges = np.arange(n + 1) * bin_width
    return BinnedPID(edges[:-1], edges[1:], counts, means, units=units)


@dataclass(frozen=True)
class ExperienceBand:
    lo: int
    hi: int
    weight: float
    mean: float
    median: float
    norm_mean: float = math.nan
    norm_median: float = math.nan


def weighted_median(values, weights) -> float:
    """Smallest value whose cumulative weight reaches half the total."""
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    order = np.argsort(values, kind="stable")
    cw = np.cumsum(weights[order])
    k = int(np.searchsorted(cw, 0.5 * cw[-1], side="left"))
    return float(values[order][min(k, values.size - 1)])


def _band_index(pop: SyntheticPopulation, band_width: int) -> np.ndarray:
    if band_width <= 0:
        raise ValueError("band_width must be positive")
    return pop.experience // band_width


def mean_median_by_experience(pop: SyntheticPopulation, band_width: int = 10) -> list[ExperienceBand]:
    if len(pop) == 0:
        raise ValueError("empty population")
    band = _band_index(pop, band_width)
    out = []
    for b in np.unique(band):
        sel = band == b
        w = pop.weight[sel]
        if w.sum() <= 0:
            continue  # absent, not zero
        x = pop.income[sel]
        out.append(ExperienceBand(int(b * band_width), int((b + 1) * band_width), float(w.sum()),
                                  float(np.dot(w, x) / w.sum()), weighted_median(x, w)))
    peak_mean = max(r.mean for r in out)
    peak_median = max(r.median for r in out)
    return [
        replace(r, norm_mean=r.mean / peak_mean if peak_mean > 0 else math.nan,
                norm_median=r.median / peak_median if peak_median > 0 else math.nan)
        for r in out
    ]


def portion_above(pop: SyntheticPopulation, threshold: float, band_width: int = 10):
    """Weighted share with income >= threshold, overall and per experience band.

    Returns ``(overall, [(band_lo, band_hi, share), ...])``.
    """
    above = pop.income >= threshold
    total = pop.weight.sum()
    overall = float(pop.weight[above].sum() / total) if total > 0 else 0.0
    band = _band_index(pop, band_width)
    per_band = []
    for b in np.unique(band):
        sel = band == b
        wb = pop.weight[sel].sum()
        if wb > 0:
            per_band.append((int(b * band_width), int((b + 1) * band_width),
                             float(pop.weight[sel & above].sum() / wb)))
    return overall, per_band


@dataclass(frozen=True, eq=False)
class Projection:
    series: GrowthSeries
    context: CalendarContext
    populations: dict  # year -> SyntheticPopulation


def project_forward(params: ModelParams, series: GrowthSeries, pyramids: dict, growth_rate: float,
                    horizon_year: int, deflator_rate: float = 0.0, carry_forward: bool = True) -> Projection:
    """Extend the series at a constant rate and simulate the years beyond it."""
    if growth_rate <= -1:
        raise ValueError("growth_rate must exceed -1")
    extended = series.extend(horizon_year, growth_rate, deflator_rate)
    years = range(series.last_year + 1, horizon_year + 1)
    pyramids = dict(pyramids)
    for y in years:
        if y not in pyramids:
            earlier = [p for p in pyramids if p < y]
            if not carry_forward or not earlier:
                raise DataError(f"no pyramid for projected year {y}")
            pyramids[y] = pyramids[max(earlier)].with_year(y)
    context = build_context(params, extended, horizon_year)
    pops = {y: simulate_year(params, context, pyramids, y) for y in years}
    return Projection(extended, context, pops)


@dataclass(frozen=True)
class YearSummary:
    year: int
    gini: float
    tail_share: float
    extra_income_ratio: float
    tcr: float
    mp: float
    scale: float

    def as_dict(self) -> dict:
        return {"year": self.year, "gini": self.gini, "tail_share": self.tail_share,
                "extra_income_ratio": self.extra_income_ratio, "tcr": self.tcr, "mp": self.mp,
                "scale": self.scale}


def summarize_year(params: ModelParams, context: CalendarContext, pyramids: dict, year: int,
                   anchor=DEFAULT_ANCHOR):
    """Simulate ``year``, attach the tail and collect the headline numbers.

    Returns ``(summary, population_with_tail, scale)``.
    """
    from .inequality import gini_exact

    pop = simulate_year(params, context, pyramids, year)
    mp = context.mp_at(year)
    share, _ = portion_above(pop, mp)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptyTailWarning)
        tailed, ratio = attach_pareto_tail(pop, context, year)
    scale = scale_factor(params, context.series, year, anchor)
    summary = YearSummary(year, gini_exact(tailed.income, tailed.weight), share, ratio,
                          context.tcr_at(year), mp, scale.value)
    return summary, tailed, scale
