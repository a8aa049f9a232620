import csv
from pathlib import Path

import pytest

from geosensor.fixtures import make_fixtures
from geosensor.gazetteer import HEADER, load_gazetteer

# small hand-checkable gazetteer; Nigeria deliberately has no centroid row
GAZ_ROWS = [
    ("London", "United Kingdom", "GBR", "", 51.51, -0.13, 10),
    ("Manchester", "United Kingdom", "GBR", "", 53.48, -2.24, 6),
    ("", "United Kingdom", "GBR", "", 54.0, -2.0, 0),
    ("Paris", "France", "FRA", "", 48.85, 2.35, 10),
    ("", "France", "FRA", "", 46.6, 2.2, 0),
    ("Berlin", "Germany", "DEU", "", 52.52, 13.405, 10),
    ("", "Germany", "DEU", "", 51.2, 10.4, 0),
    ("New Delhi", "India", "IND", "", 28.61, 77.21, 9),
    ("", "India", "IND", "", 22.0, 79.0, 0),
    ("Springfield", "United States", "USA", "IL", 39.80, -89.65, 3),
    ("Springfield", "Australia", "AUS", "", -27.67, 152.92, 1),
    ("New York", "United States", "USA", "NY", 40.71, -74.01, 10),
    ("Boston", "United States", "USA", "MA", 42.36, -71.06, 7),
    ("", "United States", "USA", "", 39.8, -98.6, 0),
    ("", "United States", "USA", "CA", 36.78, -119.42, 0),
    ("", "United States", "USA", "NY", 42.9, -75.5, 0),
    ("", "Australia", "AUS", "", -25.3, 133.8, 0),
    ("Lagos", "Nigeria", "NGA", "", 6.52, 3.38, 10),
    ("Rome", "Italy", "ITA", "", 41.9, 12.5, 10),
    ("", "Italy", "ITA", "", 42.8, 12.8, 0),
]


def write_gazetteer(path, rows, header=HEADER):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return Path(path)


@pytest.fixture(scope="session")
def gaz_path(tmp_path_factory):
    return write_gazetteer(tmp_path_factory.mktemp("gaz") / "gazetteer.csv", GAZ_ROWS)


@pytest.fixture(scope="session")
def gaz(gaz_path):
    return load_gazetteer(gaz_path)


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    """The bundled synthetic corpus, regenerated from its default seed."""
    out = tmp_path_factory.mktemp("corpus")
    make_fixtures(out)
    return out


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE:
        terminalreporter.write_line(line)
