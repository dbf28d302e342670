"""Binned income tables shared by the synthetic and empirical paths."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import DataError

UNITS = ("dimensionless", "current-dollars", "rescaled")
NORMALIZATIONS = ("raw", "per-person", "per-person-per-dimensionless-income")
HEADER = ("lower", "upper", "count", "mean_income")


@dataclass(frozen=True, eq=False)
class BinnedPID:
    """Income bins ``[lower, upper)``.

    ``upper`` is ``inf`` for an open-ended top bin; ``mean_income`` is ``nan``
    where no mean was reported.  A zero-width bin ``[0, 0]`` holds people
    with zero (or negative) income and may only come first.
    """

    lower: np.ndarray
    upper: np.ndarray
    count: np.ndarray
    mean_income: np.ndarray
    units: str = "dimensionless"
    normalization: str = "raw"

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        count = np.asarray(self.count, dtype=float)
        mean = np.asarray(self.mean_income, dtype=float)
        n = lower.size
        if not (upper.shape == count.shape == mean.shape == lower.shape == (n,)):
            raise DataError("bin arrays must be one-dimensional and of equal length")
        if n == 0:
            raise DataError("no bins")
        if self.units not in UNITS:
            raise DataError(f"unknown units {self.units!r}")
        if self.normalization not in NORMALIZATIONS:
            raise DataError(f"unknown normalization {self.normalization!r}")
        if np.any(count < 0) or not np.all(np.isfinite(count)):
            raise DataError(f"negative count in bin {int(np.argmax(~(count >= 0)))}")
        open_ = np.isinf(upper)
        if open_.any():
            if open_.sum() > 1 or not open_[-1]:
                raise DataError("OPEN bin must be the last bin")
        zero_width = upper == lower
        if zero_width.any():
            idx = np.nonzero(zero_width)[0]
            if idx.size > 1 or idx[0] != 0 or lower[0] != 0:
                raise DataError("only the first bin may have zero width, at income 0")
        if np.any(upper < lower):
            raise DataError(f"bin {int(np.argmax(upper < lower))} has upper < lower")
        if n > 1 and np.any(lower[1:] < upper[:-1]):
            bad = int(np.argmax(lower[1:] < upper[:-1])) + 1
            raise DataError(f"overlap between bins {bad - 1} and {bad}")
        for name, arr in (("lower", lower), ("upper", upper), ("count", count), ("mean_income", mean)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return int(self.lower.size)

    @property
    def has_open(self) -> bool:
        return bool(np.isinf(self.upper[-1]))

    @property
    def has_zero_bin(self) -> bool:
        return bool(self.upper[0] == self.lower[0] == 0)

    @property
    def total(self) -> float:
        return float(self.count.sum())

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def replace(self, **changes) -> "BinnedPID":
        return replace(self, **changes)

    def drop_open(self) -> "BinnedPID":
        if not self.has_open:
            return self
        return self.replace(lower=self.lower[:-1], upper=self.upper[:-1], count=self.count[:-1],
                            mean_income=self.mean_income[:-1])


def _fmt(v: float) -> str:
    if math.isnan(v) or math.isinf(v):
        return ""
    return repr(float(v))


def load_binned(path, units: str = "current-dollars") -> BinnedPID:
    path = Path(path)
    if not path.exists():
        raise DataError("file not found", path)
    rows = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != HEADER:
            raise DataError(f"bad header, expected {','.join(HEADER)}", path, 1)
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not f.strip() for f in rec):
                continue
            if len(rec) != 4:
                raise DataError(f"expected 4 fields, got {len(rec)}", path, lineno)
            try:
                lower = float(rec[0])
                upper = float(rec[1]) if rec[1].strip() else math.inf
                count = float(rec[2])
                mean = float(rec[3]) if rec[3].strip() else math.nan
            except ValueError as exc:
                raise DataError(f"malformed row ({exc})", path, lineno) from None
            if count < 0:
                raise DataError("negative count", path, lineno)
            if rows and math.isinf(rows[-1][1]):
                raise DataError("OPEN bin must be the last bin", path, lineno - 1)
            if rows and lower < rows[-1][1]:
                raise DataError("overlap with previous bin", path, lineno)
            rows.append((lower, upper, count, mean))
    if not rows:
        raise DataError("no rows", path)
    arr = np.array(rows, dtype=float)
    try:
        return BinnedPID(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], units=units)
    except DataError as exc:
        raise DataError(str(exc), path) from None


def save_binned(pid: BinnedPID, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        for lo, up, c, m in zip(pid.lower, pid.upper, pid.count, pid.mean_income):
            writer.writerow([_fmt(lo), _fmt(up), _fmt(c), _fmt(m)])
