"""Historical-series ingestion and growth-rate estimation.

Reads annual CSV series (year plus any of co2, gdp, forest, population)
and estimates per-year growth rates for the source-driven parameters
(GDP growth, forest growth, population growth, per-capita emissions).

The default rate is the arithmetic mean of year-over-year relative
increments; a geometric (CAGR) alternative is available since both are
defensible readings of "average growth rate".
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources

import numpy as np

#: Value columns, canonical order.  Any subset may be present in a file.
SERIES_COLUMNS = ("co2", "gdp", "forest", "population")


class SeriesError(ValueError):
    """A data file failed validation."""


def bundled_sample_path() -> str:
    """Path of the synthetic sample series shipped with the package."""
    return str(resources.files("carbonlab").joinpath("data/sample_series.csv"))


@dataclass(frozen=True)
class ObservedSeries:
    year: np.ndarray                 # strictly increasing integers
    values: dict                     # column name -> float array
    absent: tuple[str, ...]          # schema columns missing from the file

    def column(self, name: str) -> np.ndarray:
        if name not in self.values:
            raise SeriesError(f"column {name!r} absent from series")
        return self.values[name]

    @property
    def n_rows(self) -> int:
        return len(self.year)


def load_series(path) -> ObservedSeries:
    """Parse and validate a series file.

    Errors carry the 1-based line number of the offending row.
    """
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SeriesError(f"parse error line 1: empty file {path!r}") from None
        header = [h.strip() for h in header]
        if not header or header[0] != "year":
            raise SeriesError(f"parse error line 1: first column must be 'year', got {header!r}")
        for name in header[1:]:
            if name not in SERIES_COLUMNS:
                raise SeriesError(f"parse error line 1: unknown column {name!r}")
        if len(set(header)) != len(header):
            raise SeriesError(f"parse error line 1: duplicate column in {header!r}")

        years: list[int] = []
        columns: dict[str, list[float]] = {name: [] for name in header[1:]}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise SeriesError(
                    f"parse error line {lineno}: expected {len(header)} cells, got {len(row)}"
                )
            try:
                year = int(row[0])
            except ValueError:
                raise SeriesError(
                    f"parse error line {lineno}: bad year {row[0]!r}"
                ) from None
            if years and year <= years[-1]:
                raise SeriesError(f"non-monotone years at line {lineno}: {year} after {years[-1]}")
            years.append(year)
            for name, cell in zip(header[1:], row[1:]):
                try:
                    value = float(cell)
                except ValueError:
                    raise SeriesError(
                        f"parse error line {lineno}: bad value {cell!r} in column {name!r}"
                    ) from None
                if not np.isfinite(value) or value <= 0:
                    raise SeriesError(
                        f"non-positive value {cell!r} in column {name!r} at line {lineno}"
                    )
                columns[name].append(value)

    if not years:
        raise SeriesError(f"parse error line 2: no data rows in {path!r}")
    absent = tuple(name for name in SERIES_COLUMNS if name not in columns)
    return ObservedSeries(
        year=np.array(years, dtype=int),
        values={name: np.array(vals, dtype=float) for name, vals in columns.items()},
        absent=absent,
    )


def save_series(series: ObservedSeries, path) -> None:
    """Write a series back out (canonical column order, round-trip floats)."""
    present = [name for name in SERIES_COLUMNS if name in series.values]
    with open(path, "w", newline="") as handle:
        handle.write(",".join(["year"] + present) + "\n")
        for i, year in enumerate(series.year):
            cells = [str(int(year))] + [repr(float(series.values[name][i])) for name in present]
            handle.write(",".join(cells) + "\n")


def estimate_growth_rate(values, geometric: bool = False) -> float:
    """Mean annual relative growth of a column.

    Arithmetic convention: mean of (x[k+1] - x[k]) / x[k] over consecutive
    years.  With ``geometric=True`` the compound rate
    (x[-1]/x[0])**(1/(n-1)) - 1 is returned instead.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or len(x) < 2:
        raise SeriesError(f"need at least 2 points to estimate a growth rate, got {x.shape}")
    if geometric:
        return float((x[-1] / x[0]) ** (1.0 / (len(x) - 1)) - 1.0)
    increments = (x[1:] - x[:-1]) / x[:-1]
    return float(np.mean(increments))
