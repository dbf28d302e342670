"""Lorenz curves, Gini coefficients and Pareto-index estimators.

Two conventions are supported for the Pareto index.  ``standard``: the tail
CDF is ``1 - (x_m/x)**k``, so the mean is ``k x_m / (k - 1)`` and the log-log
density slope is ``-(k + 1)``.  ``paper``: ``k`` is one less than the standard
index, so the mean is ``(k + 1) x_m / k`` and the slope is ``-(k + 2)``.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .binned import BinnedPID
from .empirical import bin_at, effective_bin_income
from .errors import DataError

CONVENTIONS = ("paper", "standard")

# Pareto indices by age group, stored as positive numbers (reported as slopes)
AGE_GROUP_K = {(25, 34): 1.91, (35, 44): 1.48, (45, 54): 1.38, (55, 64): 1.14}


@dataclass(frozen=True, eq=False)
class LorenzCurve:
    x: np.ndarray  # cumulative population share
    y: np.ndarray  # cumulative income share

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.shape != y.shape or x.ndim != 1 or x.size < 2:
            raise ValueError("Lorenz curve needs matching 1-d arrays of at least two points")
        if x[0] != 0 or y[0] != 0 or not math.isclose(x[-1], 1) or not math.isclose(y[-1], 1):
            raise ValueError("Lorenz curve must run from (0, 0) to (1, 1)")
        if np.any(np.diff(x) < 0) or np.any(np.diff(y) < 0):
            raise ValueError("Lorenz coordinates must be non-decreasing")
        if np.any(y > x + 1e-12):
            raise ValueError("Lorenz curve rises above the equality line")
        dx, dy = np.diff(x), np.diff(y)
        seg = dx > 0
        slopes = dy[seg] / dx[seg]
        if np.any(np.diff(slopes) < -1e-9 * np.maximum(1.0, slopes[1:])):
            raise ValueError("Lorenz curve is not convex")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def save(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "y"])
            for a, b in zip(self.x, self.y):
                writer.writerow([repr(float(a)), repr(float(b))])


@dataclass(frozen=True)
class ParetoFit:
    k: float
    x_m: float
    convention: str = "paper"

    def as_standard(self) -> float:
        return self.k if self.convention == "standard" else self.k + 1.0


def _check_convention(convention):
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


def pareto_mean(k: float, x_m: float, convention: str = "standard") -> float:
    _check_convention(convention)
    a = k if convention == "standard" else k + 1.0
    if a <= 1:
        raise ValueError("Pareto mean is infinite for this index")
    return a * x_m / (a - 1.0)


def lorenz_from_bins(pid: BinnedPID, bin_income: str = "center", open_bin="drop",
                     convention: str = "standard", n_sub: int = 10) -> LorenzCurve:
    """Piecewise-linear Lorenz curve of a binned distribution.

    ``open_bin`` is ``"drop"``, ``"mean"`` (use the reported mean) or
    ``("pareto", k)``; in the Pareto case the bin's income mass follows the
    Pareto mean and the curve gets ``n_sub`` interior points inside that bin.
    """
    mode, k = (open_bin, None) if isinstance(open_bin, str) else (open_bin[0], float(open_bin[1]))
    if mode not in ("drop", "mean", "pareto"):
        raise ValueError(f"unknown open-bin mode {open_bin!r}")
    open_count = 0.0
    open_income = 0.0
    if pid.has_open:
        x_m = float(pid.lower[-1])
        open_count = float(pid.count[-1])
        if mode == "drop":
            warnings.warn("OPEN bin dropped from Lorenz curve", stacklevel=2)
        elif mode == "mean":
            if math.isnan(pid.mean_income[-1]):
                raise DataError("OPEN bin has no reported mean")
            open_income = float(pid.mean_income[-1])
        else:
            if k is None or pareto_index_standard(k, convention) <= 1:
                raise ValueError("Pareto open-bin handling needs an index with finite mean")
            open_income = pareto_mean(k, x_m, convention)
        closed = pid.drop_open()
    else:
        closed = pid
        mode = "none"
    incomes = np.array([effective_bin_income(bin_at(closed, b), bin_income) for b in range(len(closed))])
    if np.any(np.diff(incomes) < 0):
        raise DataError("effective bin incomes are not increasing; input looks corrupted")
    counts = closed.count
    masses = counts * incomes
    pop_pts = [0.0] + list(np.cumsum(counts))
    inc_pts = [0.0] + list(np.cumsum(masses))
    if mode in ("mean", "pareto") and open_count > 0:
        base_p, base_i = pop_pts[-1], inc_pts[-1]
        mass = open_count * open_income
        if mode == "pareto":
            a = pareto_index_standard(k, convention)
            q = np.arange(1, n_sub + 1) / n_sub
            share = 1.0 - (1.0 - q) ** (1.0 - 1.0 / a)
        else:
            q = share = np.array([1.0])
        pop_pts += list(base_p + q * open_count)
        inc_pts += list(base_i + share * mass)
    pop_pts = np.array(pop_pts)
    inc_pts = np.array(inc_pts)
    if pop_pts[-1] <= 0:
        raise DataError("no population")
    if inc_pts[-1] <= 0:
        return LorenzCurve(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    return LorenzCurve(pop_pts / pop_pts[-1], inc_pts / inc_pts[-1])


def pareto_index_standard(k: float, convention: str) -> float:
    _check_convention(convention)
    return k if convention == "standard" else k + 1.0


def gini_trapezoid(lorenz: LorenzCurve) -> float:
    x, y = lorenz.x, lorenz.y
    return float(1.0 - np.sum(np.diff(x) * (y[:-1] + y[1:])))


def exact_lorenz(incomes, weights=None) -> LorenzCurve:
    incomes = np.asarray(incomes, dtype=float)
    weights = np.ones_like(incomes) if weights is None else np.asarray(weights, dtype=float)
    if np.any(incomes < 0):
        raise ValueError("incomes must be non-negative")
    if weights.sum() <= 0:
        raise ValueError("total weight must be positive")
    values, inverse = np.unique(incomes, return_inverse=True)
    w = np.bincount(inverse, weights=weights)
    mass = w * values
    px = np.concatenate([[0.0], np.cumsum(w)])
    py = np.concatenate([[0.0], np.cumsum(mass)])
    if py[-1] <= 0:
        return LorenzCurve(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    return LorenzCurve(px / px[-1], py / py[-1])


def gini_exact(incomes, weights=None) -> float:
    """Gini of a discrete weighted distribution (or a population's incomes).

    All-zero incomes give 0 with a warning.
    """
    if hasattr(incomes, "income") and hasattr(incomes, "weight"):
        incomes, weights = incomes.income, incomes.weight
    incomes = np.asarray(incomes, dtype=float)
    wsum = incomes.sum() if weights is None else np.dot(np.asarray(weights, float), incomes)
    if wsum == 0:
        warnings.warn("all incomes are zero; Gini set to 0", stacklevel=2)
        return 0.0
    return gini_trapezoid(exact_lorenz(incomes, weights))


def gini_pairwise(incomes, weights=None) -> float:
    """Mean-difference Gini, O(n^2); reference implementation for tests."""
    x = np.asarray(incomes, dtype=float)
    w = np.ones_like(x) if weights is None else np.asarray(weights, dtype=float)
    diff = np.abs(x[:, None] - x[None, :])
    return float((w[:, None] * w[None, :] * diff).sum() / (2.0 * w.sum() * np.dot(w, x)))


def with_zero_income_mass(pid: BinnedPID, zero_count: float) -> BinnedPID:
    """Prepend (or add to) a zero-width bin at income 0."""
    if zero_count < 0:
        raise ValueError("zero_count must be non-negative")
    if zero_count == 0:
        return pid
    if pid.has_zero_bin:
        count = pid.count.copy()
        count[0] += zero_count
        return pid.replace(count=count)
    if pid.lower[0] < 0:
        raise DataError("bins start below zero")
    return pid.replace(
        lower=np.concatenate([[0.0], pid.lower]),
        upper=np.concatenate([[0.0], pid.upper]),
        count=np.concatenate([[float(zero_count)], pid.count]),
        mean_income=np.concatenate([[0.0], pid.mean_income]),
    )


def pareto_k_from_mean(x_m: float, x_av: float, convention: str = "paper") -> float:
    _check_convention(convention)
    if not x_av > x_m > 0:
        raise ValueError("need x_av > x_m > 0")
    if convention == "paper":
        return x_m / (x_av - x_m)
    return x_av / (x_av - x_m)


def pareto_k_from_regression(incomes, densities, convention: str = "paper") -> float:
    """Index from the least-squares slope of log(density) against log(income)."""
    _check_convention(convention)
    x = np.asarray(incomes, dtype=float)
    d = np.asarray(densities, dtype=float)
    if x.size < 3 or x.size != d.size:
        raise ValueError("need at least 3 (income, density) points")
    if np.any(x <= 0) or np.any(d <= 0):
        raise ValueError("incomes and densities must be positive")
    slope = np.polyfit(np.log(x), np.log(d), 1)[0]
    return float(-slope - (2.0 if convention == "paper" else 1.0))


def pareto_gini_oracle(k: float) -> float:
    """Gini of a pure Pareto law with (standard) index ``k``."""
    if k <= 1:
        raise ValueError("k must exceed 1")
    if math.isinf(k):
        return 0.0
    return 1.0 / (2.0 * k - 1.0)
