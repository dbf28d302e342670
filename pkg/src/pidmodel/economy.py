"""Annual GDP growth-factor series.

Each row ``y`` stores the ratio of the year-``y`` value to the year-``y-1``
value for six GDP variants.  Cumulative factors are inclusive row products,
so the growth from the level of year ``a`` to the level of year ``b`` is
``cumulative_factor(series, kind, a + 1, b)`` (see :func:`growth_between`).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError

KINDS = ("nom_total", "real_total", "nom_pc", "real_pc", "nom_pc16", "real_pc16")
HEADER = ("year",) + KINDS

# scope -> (nominal column, real column)
DEFLATOR_SCOPES = {
    "total": ("nom_total", "real_total"),
    "per-capita": ("nom_pc", "real_pc"),
    "per-capita-16+": ("nom_pc16", "real_pc16"),
}

NOMINAL_OF = {"real_total": "nom_total", "real_pc": "nom_pc", "real_pc16": "nom_pc16"}


@dataclass(frozen=True)
class GrowthSeries:
    years: np.ndarray  # int, strictly consecutive
    factors: np.ndarray  # (n_years, 6), columns ordered as KINDS

    def __post_init__(self):
        years = np.asarray(self.years, dtype=np.int64)
        factors = np.asarray(self.factors, dtype=float)
        if years.size == 0:
            raise DataError("no rows")
        if factors.shape != (years.size, len(KINDS)):
            raise DataError(f"factors must have shape ({years.size}, {len(KINDS)})")
        gaps = np.nonzero(np.diff(years) != 1)[0]
        if gaps.size:
            raise DataError(f"gap at {years[gaps[0]] + 1}")
        if not np.all(factors > 0):
            bad = np.argwhere(~(factors > 0))[0]
            raise DataError(f"non-positive factor for {years[bad[0]]} ({KINDS[bad[1]]})")
        years.setflags(write=False)
        factors.setflags(write=False)
        object.__setattr__(self, "years", years)
        object.__setattr__(self, "factors", factors)

    @property
    def first_year(self) -> int:
        return int(self.years[0])

    @property
    def last_year(self) -> int:
        return int(self.years[-1])

    def __len__(self):
        return int(self.years.size)

    def column(self, kind: str) -> np.ndarray:
        return self.factors[:, _kind_index(kind)]

    def extend(self, until: int, real_rate: float, deflator_rate: float = 0.0) -> "GrowthSeries":
        """Append constant-growth rows through ``until``.

        Real columns get ``1 + real_rate`` and nominal columns
        ``(1 + real_rate) * (1 + deflator_rate)``.  Total and per-capita
        variants grow alike (no population change in projected rows).
        """
        if real_rate <= -1 or deflator_rate <= -1:
            raise ValueError("growth rates must exceed -1")
        if until <= self.last_year:
            return self
        n = until - self.last_year
        real = 1.0 + real_rate
        nominal = real * (1.0 + deflator_rate)
        row = np.array([nominal if k.startswith("nom") else real for k in KINDS])
        years = np.concatenate([self.years, np.arange(self.last_year + 1, until + 1)])
        return GrowthSeries(years, np.vstack([self.factors, np.tile(row, (n, 1))]))


def _kind_index(kind: str) -> int:
    try:
        return KINDS.index(kind)
    except ValueError:
        raise ValueError(f"unknown factor kind {kind!r}; expected one of {KINDS}") from None


def load_growth_series(path) -> GrowthSeries:
    path = Path(path)
    if not path.exists():
        raise DataError("file not found", path)
    years, rows = [], []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError("no rows", path)
        if tuple(h.strip() for h in header) != HEADER:
            raise DataError(f"bad header, expected {','.join(HEADER)}", path, 1)
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not f.strip() for f in rec):
                continue
            if len(rec) != len(HEADER):
                raise DataError(f"expected {len(HEADER)} fields, got {len(rec)}", path, lineno)
            try:
                years.append(int(rec[0]))
                rows.append([float(v) for v in rec[1:]])
            except ValueError as exc:
                raise DataError(f"malformed row ({exc})", path, lineno) from None
            if not all(v > 0 for v in rows[-1]):
                raise DataError("non-positive factor", path, lineno)
    if not years:
        raise DataError("no rows", path)
    try:
        return GrowthSeries(np.array(years), np.array(rows))
    except DataError as exc:
        raise DataError(str(exc), path) from None


def save_growth_series(series: GrowthSeries, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        for year, row in zip(series.years, series.factors):
            writer.writerow([int(year)] + [f"{v:.3f}" for v in row])


def _check_range(series: GrowthSeries, first: int, last: int) -> None:
    if first > last:
        raise ValueError(f"first year {first} after last year {last}")
    if first < series.first_year or last > series.last_year:
        raise ValueError(
            f"years {first}..{last} outside series range {series.first_year}..{series.last_year}"
        )


def cumulative_factor(series: GrowthSeries, kind: str, first_row_year: int, last_row_year: int) -> float:
    """Product of the ``kind`` factors of rows ``first_row_year..last_row_year`` inclusive.

    The first row of a series is its base year: it fixes the reference level
    and its own factor never enters a product, so a range starting there
    spans the growth from the base year to ``last_row_year``.
    """
    _check_range(series, first_row_year, last_row_year)
    col = series.column(kind)
    lo = max(first_row_year - series.first_year, 1)
    hi = last_row_year - series.first_year + 1
    return float(np.prod(col[lo:hi].astype(np.longdouble)))


def growth_between(series: GrowthSeries, kind: str, from_year: int, to_year: int) -> float:
    """Level ratio ``value(to_year) / value(from_year)``; works in either direction."""
    if to_year == from_year:
        return 1.0
    if to_year > from_year:
        return cumulative_factor(series, kind, from_year + 1, to_year)
    return 1.0 / cumulative_factor(series, kind, to_year + 1, from_year)


def deflator_factor(series: GrowthSeries, scope: str, first_row_year: int, last_row_year: int) -> float:
    try:
        nominal, real = DEFLATOR_SCOPES[scope]
    except KeyError:
        raise ValueError(f"unknown scope {scope!r}; expected one of {tuple(DEFLATOR_SCOPES)}") from None
    return cumulative_factor(series, nominal, first_row_year, last_row_year) / cumulative_factor(
        series, real, first_row_year, last_row_year
    )
