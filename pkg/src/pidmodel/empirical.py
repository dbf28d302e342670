"""Measured binned income tables: densities, normalization and collapse checks."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .binned import BinnedPID, load_binned, save_binned  # noqa: F401  (re-exported)
from .errors import DataError

BIN_OFFSET = -0.12
BIN_INCOME_MODES = {
    "center": "center",
    "mean": "reported-mean",
    "reported-mean": "reported-mean",
    "offset": "offset-corrected",
    "offset-corrected": "offset-corrected",
}


class Bin(NamedTuple):
    lower: float
    upper: float
    count: float
    mean_income: float = math.nan


def bin_at(pid: BinnedPID, index: int) -> Bin:
    return Bin(float(pid.lower[index]), float(pid.upper[index]), float(pid.count[index]),
               float(pid.mean_income[index]))


def effective_bin_income(bin: Bin, mode: str = "center", offset: float = BIN_OFFSET) -> float:
    """Income attached to a bin: its center, its reported mean, or the center
    shifted by ``offset`` bin widths."""
    try:
        mode = BIN_INCOME_MODES[mode]
    except KeyError:
        raise ValueError(f"unknown bin-income mode {mode!r}") from None
    if math.isinf(bin.upper):
        raise DataError("no effective income for an OPEN bin")
    if bin.upper == bin.lower == 0:
        return 0.0
    if mode == "reported-mean":
        if math.isnan(bin.mean_income):
            raise DataError(f"bin [{bin.lower}, {bin.upper}) has no reported mean")
        return bin.mean_income
    center = 0.5 * (bin.lower + bin.upper)
    if mode == "center":
        return center
    return center + offset * (bin.upper - bin.lower)


@dataclass(frozen=True, eq=False)
class DensityPID:
    """Population density per unit income at effective bin incomes.

    ``zero_mass`` holds the zero-income point mass and ``open_count`` the
    population of a dropped OPEN bin; both are counted in per-person totals.
    """

    income: np.ndarray
    density: np.ndarray
    width: np.ndarray
    normalization: str = "raw"
    zero_mass: float = 0.0
    open_count: float = 0.0
    units: str = "current-dollars"

    def __post_init__(self):
        arrays = [np.asarray(a, dtype=float) for a in (self.income, self.density, self.width)]
        income, density, width = arrays
        if not income.shape == density.shape == width.shape:
            raise DataError("density arrays must have equal length")
        if np.any(density < 0):
            raise DataError("negative density")
        if income.size > 1 and np.any(np.diff(income) <= 0):
            raise DataError("income coordinates must be strictly increasing")
        for name, arr in zip(("income", "density", "width"), arrays):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return int(self.income.size)

    @property
    def mass(self) -> float:
        """Population represented by the density points alone."""
        return float(np.dot(self.density, self.width))

    @property
    def total(self) -> float:
        return self.mass + self.zero_mass + self.open_count

    def replace(self, **changes) -> "DensityPID":
        return replace(self, **changes)

    def save(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["income", "density", "width"])
            for x, d, w in zip(self.income, self.density, self.width):
                writer.writerow([repr(float(x)), repr(float(d)), repr(float(w))])


def to_density(pid: BinnedPID, open_bin: str = "drop", bin_income: str = "center") -> DensityPID:
    """Divide counts by bin widths; the zero-income bin becomes ``zero_mass``."""
    if open_bin not in ("drop", "error"):
        raise ValueError("open_bin must be 'drop' or 'error'")
    open_count = 0.0
    if pid.has_open:
        if open_bin == "error":
            raise DataError("OPEN bin present")
        open_count = float(pid.count[-1])
        pid = pid.drop_open()
    zero_mass = 0.0
    lower, upper, count = pid.lower, pid.upper, pid.count
    start = 0
    if pid.has_zero_bin:
        zero_mass = float(count[0])
        start = 1
    width = (upper - lower)[start:]
    if np.any(width <= 0):
        raise DataError(f"zero-width bin at index {start + int(np.argmax(width <= 0))}")
    income = np.array([effective_bin_income(bin_at(pid, b), bin_income) for b in range(start, len(pid))])
    return DensityPID(income, count[start:] / width, width, normalization=pid.normalization,
                      zero_mass=zero_mass, open_count=open_count, units=pid.units)


def per_person(obj, total: float | None = None):
    """Normalize counts (or densities) by the total population.

    The total includes zero-income and OPEN-bin people.  Already normalized
    inputs are rejected.
    """
    if obj.normalization != "raw":
        raise ValueError(f"input already normalized ({obj.normalization})")
    total = obj.total if total is None else float(total)
    if not total > 0:
        raise ValueError("total population must be positive")
    if isinstance(obj, BinnedPID):
        return obj.replace(count=obj.count / total, normalization="per-person")
    return obj.replace(density=obj.density / total, zero_mass=obj.zero_mass / total,
                       open_count=obj.open_count / total, normalization="per-person")


def rescale_income(obj, factor: float):
    """Divide the income axis by ``factor``; densities scale up so counts are unchanged."""
    if not factor > 0:
        raise ValueError("factor must be positive")
    if isinstance(obj, BinnedPID):
        return obj.replace(lower=obj.lower / factor, upper=obj.upper / factor,
                           mean_income=obj.mean_income / factor, units="rescaled")
    return obj.replace(income=obj.income / factor, width=obj.width / factor, density=obj.density * factor,
                       units="rescaled")


def per_income_total(obj, total_income: float):
    """Express a per-person curve in units of total (gross personal) income."""
    if obj.normalization != "per-person":
        raise ValueError("normalize per person first")
    return rescale_income(obj, total_income).replace(normalization="per-person-per-dimensionless-income")


def _interp(x_new, x, y, log_space):
    if log_space:
        return np.exp(np.interp(np.log(x_new), np.log(x), np.log(y)))
    return np.interp(x_new, x, y)


@dataclass(frozen=True)
class CollapseDistance:
    sup: float
    l2: float
    log_space: bool


def collapse_distance(*curves: DensityPID) -> CollapseDistance:
    """Largest pairwise sup-norm and L2 distances on the common income support.

    Curves are interpolated onto the union of their income coordinates,
    piecewise-linearly in log-log space when every density and income is
    positive and linearly otherwise.
    """
    if len(curves) < 2:
        raise ValueError("need at least two curves")
    lo = max(float(c.income[0]) for c in curves)
    hi = min(float(c.income[-1]) for c in curves)
    if lo > hi:
        raise ValueError("curves have disjoint supports")
    grid = np.unique(np.concatenate([c.income for c in curves]))
    grid = grid[(grid >= lo) & (grid <= hi)]
    log_space = all(np.all(c.density > 0) and np.all(c.income > 0) for c in curves)
    values = [_interp(grid, c.income, c.density, log_space) for c in curves]
    sup = l2 = 0.0
    for a in range(len(values)):
        for b in range(a + 1, len(values)):
            d = np.abs(values[a] - values[b])
            sup = max(sup, float(d.max()))
            if grid.size > 1:
                l2 = max(l2, float(np.sqrt(np.sum(0.5 * (d[1:] ** 2 + d[:-1] ** 2) * np.diff(grid)))))
    return CollapseDistance(sup, l2, log_space)


def density_at(curve: DensityPID, incomes) -> np.ndarray:
    """Interpolate a curve at ``incomes`` (same rule as :func:`collapse_distance`)."""
    incomes = np.asarray(incomes, dtype=float)
    if np.any(incomes < curve.income[0]) or np.any(incomes > curve.income[-1]):
        raise ValueError("incomes outside the curve support")
    log_space = bool(np.all(curve.density > 0) and np.all(curve.income > 0))
    return _interp(incomes, curve.income, curve.density, log_space)
