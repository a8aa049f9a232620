import pytest
from hypothesis import given
from hypothesis import strategies as st

from geosensor.burden import (
    BurdenSeries,
    Measure,
    Rule,
    aggregate_all,
    aggregate_hiv_world,
    aggregate_us_hiv,
    aggregate_window,
    load_burden,
)
from geosensor.errors import DuplicateYear, NegativeValue, NoData, SchemaError


def s(values, code="FRA", measure=Measure.CASE_COUNT):
    return BurdenSeries(code, dict(values), measure)


def test_hiv_world():
    assert aggregate_hiv_world(s({2010: 100000, 2018: 140000})).value == 120000
    v = aggregate_hiv_world(s({2018: 50000, 2012: 1}))
    assert (v.value, v.years_used, v.rule) == (50000, (2018,), Rule.MEAN_OF_ENDPOINTS)
    with pytest.raises(NoData):
        aggregate_hiv_world(s({2005: 70000}))


def test_window():
    v = aggregate_window(s({2011: 10, 2013: 20, 2019: 1000}))
    assert (v.value, v.years_used, v.rule) == (15, (2011, 2013), Rule.MEAN_OVER_WINDOW)
    assert aggregate_window(s({y: 7 for y in range(2011, 2018)})).value == 7
    with pytest.raises(NoData):
        aggregate_window(s({2010: 99}))


def test_malaria_rates_use_window():
    v = aggregate_window(s({2016: 0.25, 2017: 0.5}, measure=Measure.INCIDENCE_PER_1000))
    assert v.value == pytest.approx(0.375, rel=0, abs=0)


def test_us_hiv():
    assert aggregate_us_hiv(s({2016: 120, 2017: 80}, code="CA")).value == 100
    assert aggregate_us_hiv(s({2017: 80}, code="CA")).value == 80
    with pytest.raises(NoData):
        aggregate_us_hiv(s({}, code="CA"))
    with pytest.raises(ValueError):
        aggregate_us_hiv(s({2016: 1}, code="FRA"))


def test_aggregate_all_excludes_nodata():
    values, nodata = aggregate_all([s({2012: 4}, "FRA"), s({2009: 1}, "DEU"), s({2017: 2}, "AGO")], "tb-world")
    assert [v.region_code for v in values] == ["AGO", "FRA"]
    assert nodata == ["DEU"]
    with pytest.raises(ValueError):
        aggregate_all([], "flu-world")


years = st.sampled_from(list(range(2005, 2021)))
series_values = st.dictionaries(years, st.floats(0, 1e9, allow_nan=False), min_size=1)


@given(series_values)
def test_value_between_min_and_max_of_years_used(values):
    for fn in (aggregate_hiv_world, aggregate_window):
        try:
            v = fn(s(values))
        except NoData:
            continue
        used = [values[y] for y in v.years_used]
        assert min(used) <= v.value <= max(used)
        if len(used) == 1:
            assert v.value == used[0]


def _write(path, rows, header="region_code,year,value"):
    path.write_text(header + "\n" + "".join(f"{r}\n" for r in rows), encoding="utf-8")
    return path


def test_load_burden(tmp_path):
    series = load_burden(_write(tmp_path / "b.csv", ["FRA,2012,5", "FRA,2013,7", "DEU,2012,1.5"]))
    by = {x.region_code: x for x in series}
    assert by["FRA"].values == {2012: 5.0, 2013: 7.0}
    assert by["DEU"].values == {2012: 1.5}


@given(st.permutations(["FRA,2012,5", "FRA,2013,7", "DEU,2012,1.5", "DEU,2016,3", "AGO,2011,9"]))
def test_load_then_aggregate_permutation_invariant(rows):
    import tempfile
    from pathlib import Path

    with tempfile.TemporaryDirectory() as d:
        values, nodata = aggregate_all(load_burden(_write(Path(d) / "b.csv", rows)), "tb-world")
    assert [(v.region_code, v.value) for v in values] == [("AGO", 9.0), ("DEU", 2.25), ("FRA", 6.0)]


def test_load_errors(tmp_path):
    with pytest.raises(DuplicateYear):
        load_burden(_write(tmp_path / "a.csv", ["FRA,2012,1", "FRA,2012,2"]))
    with pytest.raises(NegativeValue):
        load_burden(_write(tmp_path / "b.csv", ["FRA,2012,-1"]))
    with pytest.raises(SchemaError):
        load_burden(_write(tmp_path / "c.csv", ["FRA,2012,1"], header="iso,year,value"))
    with pytest.raises(SchemaError):
        load_burden(_write(tmp_path / "d.csv", ["France,2012,1"]))
    with pytest.raises(SchemaError):
        load_burden(_write(tmp_path / "e.csv", ["XX,2012,1"]), region_kind="us-state")
