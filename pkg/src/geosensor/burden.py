"""Disease burden tables and the year-aggregation rules per data source.

All sources share one long-format CSV (``region_code,year,value``). The
rules collapse each region's series to a single value:

* world HIV: mean of 2010 and 2018, or whichever of the two exists
* world TB and malaria: mean over the 2011-2017 years present
* US HIV by state: mean of 2016 and 2017, with the same single-year fallback
"""

from __future__ import annotations

import csv
import enum
import math
import re
from dataclasses import dataclass
from pathlib import Path
from statistics import fmean

from .errors import DuplicateYear, MissingFile, NegativeValue, NoData, SchemaError
from .us_states import STATE_CODES

HEADER = ["region_code", "year", "value"]
TB_WINDOW = range(2011, 2018)


class Measure(str, enum.Enum):
    CASE_COUNT = "CaseCount"
    INCIDENCE_PER_1000 = "IncidencePer1000AtRisk"


class Rule(str, enum.Enum):
    MEAN_OF_ENDPOINTS = "MeanOfEndpoints"
    MEAN_OVER_WINDOW = "MeanOverWindow"


@dataclass(frozen=True)
class BurdenSeries:
    region_code: str
    values: dict
    measure: Measure = Measure.CASE_COUNT


@dataclass(frozen=True)
class BurdenValue:
    region_code: str
    value: float
    years_used: tuple[int, ...]
    rule: Rule


def _mean(values) -> float:
    values = list(values)
    # clamp guards against a last-ulp rounding step outside [min, max]
    return min(max(fmean(values), min(values)), max(values))


def _endpoints(series: BurdenSeries, years) -> BurdenValue:
    used = tuple(y for y in years if y in series.values)
    if not used:
        raise NoData(f"{series.region_code}: no value for {' or '.join(map(str, years))}")
    return BurdenValue(series.region_code, _mean(series.values[y] for y in used), used,
                       Rule.MEAN_OF_ENDPOINTS)


def aggregate_hiv_world(series: BurdenSeries) -> BurdenValue:
    if series.measure is not Measure.CASE_COUNT:
        raise ValueError("HIV world burden must be a case count")
    return _endpoints(series, (2010, 2018))


def aggregate_us_hiv(series: BurdenSeries) -> BurdenValue:
    if series.measure is not Measure.CASE_COUNT:
        raise ValueError("US HIV burden must be a case count")
    if series.region_code not in STATE_CODES:
        raise ValueError(f"{series.region_code!r} is not a US state code")
    return _endpoints(series, (2016, 2017))


def aggregate_window(series: BurdenSeries, window=TB_WINDOW) -> BurdenValue:
    used = tuple(y for y in sorted(series.values) if y in window)
    if not used:
        raise NoData(f"{series.region_code}: no value in {window.start}-{window.stop - 1}")
    return BurdenValue(series.region_code, _mean(series.values[y] for y in used), used,
                       Rule.MEAN_OVER_WINDOW)


RULES = {
    "hiv-world": aggregate_hiv_world,
    "tb-world": aggregate_window,
    "malaria-world": aggregate_window,
    "hiv-us": aggregate_us_hiv,
}


def aggregate_all(series_list, rule: str) -> tuple[list[BurdenValue], list[str]]:
    """Apply a named rule to every series; return values and NoData regions."""
    try:
        fn = RULES[rule]
    except KeyError:
        raise ValueError(f"unknown burden rule {rule!r}; choose from {sorted(RULES)}") from None
    values, nodata = [], []
    for s in sorted(series_list, key=lambda s: s.region_code):
        try:
            values.append(fn(s))
        except NoData:
            nodata.append(s.region_code)
    return values, nodata


_COUNTRY = re.compile(r"^[A-Z]{3}$")


def load_burden(path, measure=Measure.CASE_COUNT, region_kind: str = "country") -> list[BurdenSeries]:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"burden file not found: {path}")
    measure = Measure(measure)
    if region_kind == "country":
        valid = _COUNTRY.match
    elif region_kind == "us-state":
        valid = STATE_CODES.__contains__
    else:
        raise ValueError(f"unknown region kind {region_kind!r}")
    by_region: dict[str, dict[int, float]] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != HEADER:
            raise SchemaError(f"{path}: expected header {','.join(HEADER)!r}, got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise SchemaError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            code = row[0].strip()
            if not valid(code):
                raise SchemaError(f"{path}:{lineno}: invalid {region_kind} code {code!r}")
            try:
                year, value = int(row[1]), float(row[2])
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from exc
            if not math.isfinite(value):
                raise SchemaError(f"{path}:{lineno}: non-finite value")
            if value < 0:
                raise NegativeValue(f"{path}:{lineno}: negative value {value} for {code}")
            years = by_region.setdefault(code, {})
            if year in years:
                raise DuplicateYear(f"{path}:{lineno}: duplicate ({code}, {year})")
            years[year] = value
    return [BurdenSeries(code, dict(sorted(v.items())), measure) for code, v in sorted(by_region.items())]
