"""Single-year-of-age population pyramids."""
from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError

DEFAULT_AGES = (16, 75)
HEADER = ("year", "age", "population")


@dataclass(frozen=True)
class AgePyramid:
    year: int
    first_age: int
    counts: np.ndarray  # persons for ages first_age, first_age + 1, ...

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=float)
        if counts.ndim != 1 or counts.size == 0:
            raise DataError(f"pyramid for {self.year} has no ages")
        if np.any(counts < 0) or not np.all(np.isfinite(counts)):
            age = self.first_age + int(np.argmax(~(counts >= 0)))
            raise DataError(f"negative or invalid count at age {age} in {self.year}")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def ages(self) -> np.ndarray:
        return np.arange(self.first_age, self.first_age + self.counts.size)

    @property
    def last_age(self) -> int:
        return self.first_age + self.counts.size - 1

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    def count(self, age: int) -> float:
        if not self.first_age <= age <= self.last_age:
            raise KeyError(age)
        return float(self.counts[age - self.first_age])

    def restrict(self, first_age: int, last_age: int) -> "AgePyramid":
        if first_age < self.first_age or last_age > self.last_age:
            raise DataError(
                f"pyramid {self.year} covers ages {self.first_age}..{self.last_age}, "
                f"need {first_age}..{last_age}"
            )
        lo = first_age - self.first_age
        return AgePyramid(self.year, first_age, self.counts[lo : lo + last_age - first_age + 1])

    def with_year(self, year: int) -> "AgePyramid":
        return AgePyramid(year, self.first_age, self.counts)


def synthetic_pyramid(year: int, shape: str = "uniform", *, level: float = 1.0, base: float = 0.0,
                      slope: float = 0.0, ages: tuple[int, int] = DEFAULT_AGES) -> AgePyramid:
    """Build a deterministic pyramid.

    ``uniform`` puts ``level`` persons at every age; ``linear`` puts
    ``base + slope * (age - first_age)`` persons at each age.
    """
    first, last = ages
    offsets = np.arange(last - first + 1, dtype=float)
    if shape == "uniform":
        counts = np.full(offsets.size, float(level))
    elif shape == "linear":
        counts = base + slope * offsets
    else:
        raise ValueError(f"unknown pyramid shape {shape!r}")
    if np.any(counts < 0):
        age = first + int(np.argmax(counts < 0))
        raise DataError(f"negative count at age {age}")
    return AgePyramid(year, first, counts)


def parse_pyramid_spec(text: str) -> tuple[str, dict]:
    """Parse ``uniform:LEVEL`` or ``linear:BASE:SLOPE`` into synthetic_pyramid arguments."""
    parts = text.split(":")
    try:
        if parts[0] == "uniform" and len(parts) == 2:
            return "uniform", {"level": float(parts[1])}
        if parts[0] == "linear" and len(parts) == 3:
            return "linear", {"base": float(parts[1]), "slope": float(parts[2])}
    except ValueError:
        pass
    raise ValueError(f"bad synthetic pyramid spec {text!r}")


def stationary_pyramids(pyramid: AgePyramid, years) -> dict[int, AgePyramid]:
    return {int(y): pyramid.with_year(int(y)) for y in years}


def load_pyramids(path) -> dict[int, AgePyramid]:
    path = Path(path)
    if not path.exists():
        raise DataError("file not found", path)
    by_year: dict[int, dict[int, float]] = defaultdict(dict)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != HEADER:
            raise DataError(f"bad header, expected {','.join(HEADER)}", path, 1)
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not f.strip() for f in rec):
                continue
            if len(rec) != 3:
                raise DataError(f"expected 3 fields, got {len(rec)}", path, lineno)
            try:
                year, age, pop = int(rec[0]), int(rec[1]), float(rec[2])
            except ValueError as exc:
                raise DataError(f"malformed row ({exc})", path, lineno) from None
            if pop < 0:
                raise DataError(f"negative population {pop}", path, lineno)
            if age in by_year[year]:
                raise DataError(f"duplicate age {age} for {year}", path, lineno)
            by_year[year][age] = pop
    if not by_year:
        raise DataError("no rows", path)
    pyramids = {}
    for year in sorted(by_year):
        ages = sorted(by_year[year])
        for a, b in zip(ages, ages[1:]):
            if b != a + 1:
                raise DataError(f"gap at {a + 1} in {year}", path)
        pyramids[year] = AgePyramid(year, ages[0], np.array([by_year[year][a] for a in ages]))
    return pyramids


def save_pyramids(pyramids: dict[int, AgePyramid], path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        for year in sorted(pyramids):
            p = pyramids[year]
            for age, pop in zip(p.ages, p.counts):
                writer.writerow([year, int(age), repr(float(pop))])
