"""Income trajectories of the 841 (capability, means) states.

Below the critical work experience an income relaxes towards
``sigma_min * lambda_min * S' * L'`` at rate ``alpha0 / (lambda_min * L')``;
from the critical experience on it decays at ``alpha1 / (lambda_min * L')``.
Coefficients are held fixed within each calendar year and every yearly step
uses the exact exponential solution, so the result does not depend on any
integration step size.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .economy import KINDS, NOMINAL_OF, GrowthSeries, growth_between


@dataclass(frozen=True)
class ModelParams:
    t0: int = 1960
    alpha0: float = 0.087
    tcr0: float = 26.5
    grid_min: int = 2
    grid_max: int = 30
    mp0: float = 0.43
    ref_age: float = 64.0
    ref_income: float = 0.72
    k: float = 1.35
    tail_factor: float = 1.33
    driver_kind: str = "real_pc16"
    # "real": threshold follows the driver; "nominal": its nominal counterpart
    mp_kind: str = "real"
    work_start_age: int = 15
    age_min: int = 16
    age_max: int = 75
    # cohorts that started work before t0: "stationary" integrates them with
    # the t0 coefficients, "zero" starts them at t0 with no income
    pre_t0: str = "stationary"
    tail_convention: str = "paper"
    tail_mode: str = "quantile"

    def __post_init__(self):
        problems = []
        if not self.alpha0 > 0:
            problems.append("alpha0 must be > 0")
        if not self.tcr0 > 0:
            problems.append("tcr0 must be > 0")
        if not 0 < self.mp0 < 1:
            problems.append("mp0 must lie in (0, 1)")
        if not 0 < self.ref_income <= 1:
            problems.append("ref_income must lie in (0, 1]")
        if not self.ref_age - self.work_start_age > self.tcr0:
            problems.append("ref_age - work_start_age must exceed tcr0")
        if not self.k > 1:
            problems.append("k must be > 1")
        if not self.tail_factor > 0:
            problems.append("tail_factor must be > 0")
        if not 0 < self.grid_min < self.grid_max:
            problems.append("need 0 < grid_min < grid_max")
        if self.driver_kind not in NOMINAL_OF:
            problems.append(f"driver_kind must be one of {tuple(NOMINAL_OF)}")
        if self.mp_kind not in ("real", "nominal"):
            problems.append("mp_kind must be 'real' or 'nominal'")
        if not self.work_start_age < self.age_min <= self.age_max:
            problems.append("need work_start_age < age_min <= age_max")
        if self.pre_t0 not in ("zero", "stationary"):
            problems.append("pre_t0 must be 'zero' or 'stationary'")
        if self.tail_convention not in ("paper", "standard"):
            problems.append("tail_convention must be 'paper' or 'standard'")
        if self.tail_mode not in ("quantile", "multiply"):
            problems.append("tail_mode must be 'quantile' or 'multiply'")
        if problems:
            raise ValueError("invalid ModelParams: " + "; ".join(problems))

    @property
    def n_grid(self) -> int:
        return self.grid_max - self.grid_min + 1

    @property
    def n_states(self) -> int:
        return self.n_grid**2

    @property
    def max_experience(self) -> int:
        return self.age_max - self.work_start_age

    @property
    def ages(self) -> np.ndarray:
        return np.arange(self.age_min, self.age_max + 1)

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def state_arrays(self):
        """Return ``(i, j, S', L')`` for all states, ``i`` varying slowest."""
        grid = np.arange(self.grid_min, self.grid_max + 1)
        i, j = np.meshgrid(grid, grid, indexing="ij")
        i, j = i.ravel(), j.ravel()
        return i, j, i / self.grid_max, j / self.grid_max


PRESETS = {
    1950: ModelParams(t0=1950, tcr0=23.5, alpha0=0.097),
    1960: ModelParams(t0=1960, tcr0=26.5, alpha0=0.087),
    1967: ModelParams(t0=1967, tcr0=32.0, alpha0=0.071),
}


@dataclass(frozen=True, order=True)
class StateIndex:
    i: int
    j: int

    def check(self, params: ModelParams) -> None:
        for v in (self.i, self.j):
            if not params.grid_min <= v <= params.grid_max:
                raise ValueError(f"state {self} outside grid {params.grid_min}..{params.grid_max}")


@dataclass(frozen=True, eq=False)
class CalendarContext:
    """Per-calendar-year model coefficients.

    Arrays are indexed by ``year - first_year``.  ``first_year`` reaches back
    far enough for the oldest modelled cohort; years before ``t0`` carry the
    ``t0`` values (unit growth).
    """

    params: ModelParams
    first_year: int
    growth: np.ndarray  # cumulative real driver growth relative to t0
    nominal_growth: np.ndarray  # same for the nominal counterpart
    tcr: np.ndarray
    mp: np.ndarray
    alpha1: np.ndarray  # nan where the decay window is empty
    series: GrowthSeries = field(repr=False, default=None)

    @property
    def t0(self) -> int:
        return self.params.t0

    @property
    def last_year(self) -> int:
        return self.first_year + self.growth.size - 1

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.first_year, self.last_year + 1)

    @cached_property
    def lam(self) -> np.ndarray:
        return np.sqrt(self.growth)

    @property
    def sigma(self) -> np.ndarray:
        return self.lam

    def _idx(self, year: int) -> int:
        if not self.first_year <= year <= self.last_year:
            raise ValueError(f"year {year} outside context {self.first_year}..{self.last_year}")
        return int(year) - self.first_year

    def lambda_min(self, year: int) -> float:
        return float(self.lam[self._idx(year)])

    def sigma_min(self, year: int) -> float:
        return float(self.lam[self._idx(year)])

    def tcr_at(self, year: int) -> float:
        return float(self.tcr[self._idx(year)])

    def mp_at(self, year: int) -> float:
        return float(self.mp[self._idx(year)])

    def growth_at(self, year: int) -> float:
        return float(self.growth[self._idx(year)])

    def nominal_at(self, year: int) -> float:
        return float(self.nominal_growth[self._idx(year)])

    @cached_property
    def cohort_table(self):
        """Incomes of every cohort at every integer experience (see synthesis)."""
        from .synthesis import CohortTable

        return CohortTable.build(self)


def build_context(params: ModelParams, series: GrowthSeries, last_year: int) -> CalendarContext:
    if last_year < params.t0:
        raise ValueError(f"last_year {last_year} precedes t0 {params.t0}")
    if params.t0 < series.first_year - 1 or last_year > series.last_year:
        raise ValueError(
            f"series {series.first_year}..{series.last_year} does not cover {params.t0}..{last_year}"
        )
    first_year = params.t0 - params.max_experience
    n = last_year - first_year + 1
    growth = np.ones(n)
    nominal = np.ones(n)
    real_col = series.column(params.driver_kind)
    nom_col = series.column(NOMINAL_OF[params.driver_kind])
    off = params.t0 - first_year
    if last_year > params.t0:
        lo = params.t0 + 1 - series.first_year
        hi = last_year - series.first_year + 1
        growth[off + 1 :] = np.cumprod(real_col[lo:hi].astype(np.longdouble)).astype(float)
        nominal[off + 1 :] = np.cumprod(nom_col[lo:hi].astype(np.longdouble)).astype(float)
    lam = np.sqrt(growth)
    tcr = params.tcr0 * lam
    mp = params.mp0 * (growth if params.mp_kind == "real" else nominal)
    window = (params.ref_age - params.work_start_age) - tcr
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha1 = np.where(window > 0, -lam * math.log(params.ref_income) / window, np.nan)
    arrays = [growth, nominal, tcr, mp, alpha1]
    for a in arrays:
        a.setflags(write=False)
    return CalendarContext(params, first_year, *arrays, series=series)


def constant_context(params: ModelParams, last_year: int) -> CalendarContext:
    """Context for a driver with unit growth every year."""
    years = np.arange(params.t0 + 1, max(last_year, params.t0 + 1) + 1)
    series = GrowthSeries(years, np.ones((years.size, len(KINDS))))
    return build_context(params, series, last_year)


def alpha1_at(params: ModelParams, context: CalendarContext, year: int) -> float:
    """Decay coefficient making the top state fall to ``ref_income`` of its
    value at the critical experience by ``ref_age``."""
    window = (params.ref_age - params.work_start_age) - context.tcr_at(year)
    if window <= 0:
        raise ValueError(
            f"decay window empty in {year}: critical experience {context.tcr_at(year):.3f} "
            f"reaches reference age {params.ref_age}"
        )
    return -context.lambda_min(year) * math.log(params.ref_income) / window


def income_at(params: ModelParams, context: CalendarContext, state: StateIndex, start_year: int,
              experience: float, substeps: int = 1, allow_pre_t0: bool = False) -> float:
    """Dimensionless income of ``state`` for the cohort that starts work in ``start_year``.

    Cohorts starting before ``t0`` are rejected unless ``allow_pre_t0`` is set,
    in which case ``params.pre_t0`` decides how they are treated.
    ``substeps`` splits each yearly step; the per-year solution is exact so
    results must not depend on it (kept for validation).
    """
    if experience < 0:
        raise ValueError("experience must be non-negative")
    if start_year < params.t0 and not allow_pre_t0:
        raise ValueError(f"start year {start_year} precedes t0 {params.t0}")
    if start_year < context.first_year:
        raise ValueError(f"start year {start_year} precedes context start {context.first_year}")
    state.check(params)
    s_p = state.i / params.grid_max
    l_p = state.j / params.grid_max

    t = 0.0
    if start_year < params.t0 and params.pre_t0 == "zero":
        t = float(params.t0 - start_year)
        if experience <= t:
            return 0.0
    m = 0.0
    switched = False
    while t < experience:
        year = start_year + int(math.floor(t))
        step_end = min(math.floor(t) + 1.0, experience)
        idx = context._idx(year)
        lam = float(context.lam[idx])
        tcr = float(context.tcr[idx])
        if not switched and t >= tcr:
            switched = True
        seg_start = t
        if not switched:
            grow_end = min(step_end, tcr)
            m = _grow(m, s_p * l_p * lam * lam, params.alpha0 / (lam * l_p), grow_end - t, substeps)
            seg_start = grow_end
            if grow_end < step_end:
                switched = True
        if switched and seg_start < step_end:
            a1 = alpha1_at(params, context, year)
            m = _decay(m, a1 / (lam * l_p), step_end - seg_start, substeps)
        t = step_end
    return m


def _grow(m, asymptote, rate, dt, substeps):
    h = dt / substeps
    for _ in range(substeps):
        m = asymptote + (m - asymptote) * math.exp(-rate * h)
    return m


def _decay(m, rate, dt, substeps):
    h = dt / substeps
    for _ in range(substeps):
        m *= math.exp(-rate * h)
    return m


def reference_mean_curve(t: float, alpha_g: float = 0.085, alpha_d: float = 0.06, tcr: float = 39.0) -> float:
    """Two-exponential approximation of the normalized mean-income curve."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if t <= tcr:
        return 1.0 - math.exp(-alpha_g * t)
    return (1.0 - math.exp(-alpha_g * tcr)) * math.exp(-alpha_d * (t - tcr))
