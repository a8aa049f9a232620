"""Synthetic fixture corpus for the four reference analyses.

Everything here is made up: coordinates are rough, boundaries are boxes
around centroids, and counts come from a seeded Poisson model so that the
regressions have something to find. The layout is fixed by design:

* 12 countries receive tweets in each world analysis (every one of them
  gets at least one well-formed "city, country" location);
* in each world analysis exactly 2 of those 12 have no burden data, so the
  regression panel has 10 rows;
* the US analysis covers 51 states, 7 of which get no tweets (panel n=44).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .us_states import STATES

DEFAULT_SEED = 20200127

# code, country name, centroid lat, lon, cities (name, lat, lon, population_rank, state)
COUNTRIES = [
    ("USA", "United States", 39.8, -98.6, [
        ("New York", 40.71, -74.01, 10, "NY"), ("Boston", 42.36, -71.06, 7, "MA"),
        ("Atlanta", 33.75, -84.39, 7, "GA"), ("Seattle", 47.61, -122.33, 7, "WA"),
        ("Chicago", 41.88, -87.63, 9, "IL"), ("Springfield", 39.80, -89.65, 3, "IL"),
        ("Houston", 29.76, -95.37, 8, "TX"), ("San Francisco", 37.77, -122.42, 8, "CA"),
        ("Baltimore", 39.29, -76.61, 6, "MD"), ("Philadelphia", 39.95, -75.17, 8, "PA"),
        ("Miami", 25.76, -80.19, 7, "FL"), ("Nashville", 36.16, -86.78, 6, "TN")]),
    ("GBR", "United Kingdom", 54.0, -2.0, [
        ("London", 51.51, -0.13, 10, None), ("Manchester", 53.48, -2.24, 6, None)]),
    ("DEU", "Germany", 51.2, 10.4, [
        ("Berlin", 52.52, 13.405, 10, None), ("Munich", 48.14, 11.58, 8, None)]),
    ("FRA", "France", 46.6, 2.2, [
        ("Paris", 48.85, 2.35, 10, None), ("Lyon", 45.76, 4.84, 6, None)]),
    ("IND", "India", 22.0, 79.0, [
        ("New Delhi", 28.61, 77.21, 9, None), ("Mumbai", 19.08, 72.88, 10, None)]),
    ("NGA", "Nigeria", 9.1, 8.7, [
        ("Lagos", 6.52, 3.38, 10, None), ("Abuja", 9.06, 7.50, 7, None)]),
    ("ZAF", "South Africa", -29.0, 24.0, [
        ("Cape Town", -33.92, 18.42, 8, None), ("Johannesburg", -26.20, 28.05, 9, None)]),
    ("KEN", "Kenya", 0.2, 37.9, [
        ("Nairobi", -1.29, 36.82, 10, None), ("Kisumu", -0.09, 34.77, 5, None)]),
    ("BRA", "Brazil", -10.8, -52.9, [
        ("Sao Paulo", -23.55, -46.63, 10, None), ("Rio de Janeiro", -22.91, -43.17, 9, None)]),
    ("GHA", "Ghana", 7.9, -1.0, [
        ("Accra", 5.60, -0.19, 9, None), ("Kumasi", 6.69, -1.62, 7, None)]),
    ("UGA", "Uganda", 1.4, 32.3, [
        ("Kampala", 0.35, 32.58, 9, None), ("Gulu", 2.77, 32.30, 4, None)]),
    ("PHL", "Philippines", 12.9, 121.8, [
        ("Manila", 14.60, 120.98, 10, None), ("Cebu", 10.32, 123.89, 7, None)]),
]
# on the map but never tweeted from; GRL also has no burden anywhere
EXTRA_COUNTRIES = [
    ("AUS", "Australia", -25.3, 133.8, [
        ("Sydney", -33.87, 151.21, 10, None), ("Springfield", -27.67, 152.92, 1, None)]),
    ("CAN", "Canada", 56.0, -106.0, [("Toronto", 43.65, -79.38, 10, None)]),
    ("TCD", "Chad", 15.5, 18.7, [("N'Djamena", 12.13, 15.06, 8, None)]),
    ("GRL", "Greenland", 72.0, -40.0, []),
]
TWEETED = [c[0] for c in COUNTRIES]

DISEASES = {
    "tb-world": {
        "label": "Number of incident tuberculosis cases",
        "measure": "CaseCount",
        "missing_burden": ("DEU", "FRA"),
        "n_papers": 500,
        "title": "Tuberculosis: tweets on papers and incident cases",
    },
    "malaria-world": {
        "label": "Malaria incidence (per 1,000 population at risk)",
        "measure": "IncidencePer1000AtRisk",
        "missing_burden": ("GBR", "USA"),
        "n_papers": 300,
        "title": "Malaria: tweets on papers and incidence",
    },
    "hiv-world": {
        "label": "Number of HIV cases",
        "measure": "CaseCount",
        "missing_burden": ("GBR", "FRA"),
        "n_papers": 400,
        "title": "HIV: tweets on papers and cases",
    },
}
US_NO_TWEETS = ("AK", "ID", "MT", "ND", "SD", "VT", "WY")

NOISE = [
    "Worldwide", "Washington DC & New Delhi", "http://example.org/me", "www.lab.example",
    "Earth", "ber", "NYC", "somewhere nice", "Everywhere and nowhere", "London and Paris",
    "Not from here", "mostly nucleus", "Berlin und Hamburg", "Madrid y Barcelona",
    "São Paulo, Brasil", "Planet of the apes", "Hogwarts",
]


def _write_csv(path: Path, header, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def _box(lat, lon, half):
    ring = [[lon - half, lat - half], [lon + half, lat - half], [lon + half, lat + half],
            [lon - half, lat + half], [lon - half, lat - half]]
    return {"type": "Polygon", "coordinates": [[[round(x, 4), round(y, 4)] for x, y in ring]]}


def _boundaries(path: Path, regions, half) -> Path:
    features = [
        {"type": "Feature", "properties": {"region_code": code}, "geometry": _box(lat, lon, half)}
        for code, lat, lon in regions
    ]
    path.write_text(json.dumps({"type": "FeatureCollection", "features": features}, indent=1) + "\n",
                    encoding="utf-8")
    return path


def _gazetteer_rows():
    rows = []
    for code, name, lat, lon, cities in COUNTRIES + EXTRA_COUNTRIES:
        rows.append(["", name, code, "", lat, lon, 0])
        for city, clat, clon, rank, state in cities:
            rows.append([city, name, code, state or "", clat, clon, rank])
    for state, name, lat, lon in STATES:
        rows.append(["", "United States", "USA", state, lat, lon, 0])
    return rows


def _std(x):
    x = np.asarray(x, dtype=float)
    return (x - x.mean()) / x.std(ddof=1)


def _location(rng, code, name, cities):
    """A well-formed location string for a country, in one of a few styles."""
    city = cities[int(rng.integers(len(cities)))]
    style = int(rng.integers(6))
    short = {"USA": "USA", "GBR": "UK"}.get(code)
    if style == 0 or not cities:
        return name
    if style in (1, 2):
        return f"{city[0]}, {name}"
    if style == 3:
        return f"{city[0]} {short or name}" if short else f"{city[0]}; {name}"
    if style == 4:
        return f"{city[0].upper()}, {name.upper()}"
    return f"{city[0]}, {short or name}"


def _world(rng, out: Path, disease: str, spec) -> list[Path]:
    d = out / disease
    codes = TWEETED + [c[0] for c in EXTRA_COUNTRIES]
    n = len(codes)
    if spec["measure"] == "CaseCount":
        level = np.exp(rng.uniform(np.log(2e3), np.log(2e6), n))
    else:
        level = rng.uniform(0.5, 400.0, n)
    papers = np.floor(np.exp(rng.uniform(np.log(1), np.log(3000), n))).astype(int)
    papers[codes.index("UGA")] = 1
    papers[codes.index("GRL")] = 0
    lam = np.exp(2.5 + 0.35 * _std(level) + 0.6 * _std(np.log1p(papers)))

    burden_rows = []
    for i, code in enumerate(codes):
        if code in spec["missing_burden"] or code == "GRL":
            continue
        if disease == "hiv-world":
            years = (2010, 2018) if rng.random() < 0.8 else ((2010,) if rng.random() < 0.5 else (2018,))
            years = years + (2005,)
        else:
            years = [y for y in range(2011, 2018) if rng.random() < 0.85] or [2014]
        for y in sorted(years):
            v = level[i] * rng.uniform(0.85, 1.15)
            burden_rows.append([code, y, round(float(v), 3) if spec["measure"] != "CaseCount" else int(v)])
        if disease != "hiv-world" and rng.random() < 0.3:
            burden_rows.append([code, 2009, int(level[i])])

    n_papers = spec["n_papers"]
    ids = [str(21000000 + 37 * i) for i in range(n_papers)]
    tweeted_ids = ids[: int(0.55 * n_papers)]

    lookup = {c[0]: c for c in COUNTRIES}
    tweets = []

    def add(location, geo=False):
        pid = tweeted_ids[int(rng.integers(len(tweeted_ids)))]
        tweets.append([f"{disease[:3]}{len(tweets) + 1:06d}", pid, location, "true" if geo else "false"])

    for i, code in enumerate(TWEETED):
        _, name, _, _, cities = lookup[code]
        add(f"{cities[0][0]}, {name}")
        for _ in range(int(rng.poisson(lam[i]))):
            add(_location(rng, code, name, cities), geo=rng.random() < 0.01)
    for _ in range(40):
        add(NOISE[int(rng.integers(len(NOISE)))])
    for _ in range(60):
        add("")
    order = rng.permutation(len(tweets))
    tweets = [tweets[j][:1] + tweets[j][1:] for j in order]

    d.mkdir(parents=True, exist_ok=True)
    (d / "paper_ids.txt").write_text("\n".join(ids) + "\n", encoding="utf-8")
    return [
        _write_csv(d / "tweets.csv", ["tweet_id", "paper_id", "raw_location", "has_precise_geo"], tweets),
        _write_csv(d / "burden.csv", ["region_code", "year", "value"], burden_rows),
        _write_csv(d / "paper_counts.csv", ["region_code", "papers"],
                   [[c, int(p)] for c, p in sorted(zip(codes, papers))]),
        d / "paper_ids.txt",
    ]


def _us(rng, out: Path) -> list[Path]:
    d = out / "hiv-us"
    codes = [s[0] for s in STATES]
    names = {s[0]: s[1] for s in STATES}
    n = len(codes)
    cases = np.exp(rng.uniform(np.log(30), np.log(5000), n))
    papers = np.floor(np.exp(rng.uniform(np.log(1), np.log(900), n))).astype(int)
    lam = np.exp(1.6 + 0.55 * _std(np.log(cases)) + 0.3 * _std(np.log1p(papers)))
    cities = {}
    for city, _, _, _, state in COUNTRIES[0][4]:
        cities.setdefault(state, []).append(city)

    burden_rows = []
    for i, code in enumerate(codes):
        years = (2016, 2017) if rng.random() < 0.9 else (2017,)
        for y in years:
            burden_rows.append([code, y, int(cases[i] * rng.uniform(0.9, 1.1))])

    ids = [str(22000000 + 41 * i) for i in range(400)]
    tweeted_ids = ids[:220]
    tweets = []

    def add(location):
        pid = tweeted_ids[int(rng.integers(len(tweeted_ids)))]
        tweets.append([f"hus{len(tweets) + 1:06d}", pid, location, "false"])

    for i, code in enumerate(codes):
        if code in US_NO_TWEETS:
            continue
        state_name = names[code].title()
        for j in range(1 + int(rng.poisson(lam[i]))):
            if code in cities and j % 2 == 0:
                add(f"{cities[code][j % len(cities[code])]}, USA")
            elif j % 3 == 1:
                add(f"{code}, USA")
            else:
                add(f"{state_name}, USA")
    for loc in ("USA", "United States", "Boston, MA", "Worldwide", "NYC & LA", "Toronto, Canada"):
        add(loc)
    order = rng.permutation(len(tweets))
    tweets = [tweets[j] for j in order]

    d.mkdir(parents=True, exist_ok=True)
    (d / "paper_ids.txt").write_text("\n".join(ids) + "\n", encoding="utf-8")
    return [
        _write_csv(d / "tweets.csv", ["tweet_id", "paper_id", "raw_location", "has_precise_geo"], tweets),
        _write_csv(d / "burden.csv", ["region_code", "year", "value"], burden_rows),
        _write_csv(d / "paper_counts.csv", ["region_code", "papers"],
                   [[c, int(p)] for c, p in sorted(zip(codes, papers))]),
        d / "paper_ids.txt",
    ]


def _config(out: Path, disease: str, **values) -> Path:
    path = out / f"{disease}.conf"
    lines = [f"# reference configuration for the synthetic {disease} fixture", f"disease = {disease}"]
    lines += [f"{k} = {v}" for k, v in values.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def make_fixtures(out_dir, seed: int = DEFAULT_SEED) -> list[Path]:
    """Write the whole corpus plus one config per analysis into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    written = [
        _write_csv(out / "gazetteer.csv",
                   ["city", "country", "country_code", "state_code", "lat", "lon", "population_rank"],
                   _gazetteer_rows()),
        _boundaries(out / "boundaries_world.geojson",
                    [(c[0], c[2], c[3]) for c in COUNTRIES + EXTRA_COUNTRIES], 4.0),
        _boundaries(out / "boundaries_us.geojson", [(s[0], s[2], s[3]) for s in STATES], 1.2),
    ]
    for disease, spec in DISEASES.items():
        written += _world(rng, out, disease, spec)
        written.append(_config(
            out, disease,
            burden_rule=disease,
            measure=spec["measure"],
            burden_label=spec["label"],
            region_kind="country",
            tweets=f"{disease}/tweets.csv",
            paper_ids=f"{disease}/paper_ids.txt",
            paper_counts=f"{disease}/paper_counts.csv",
            burden=f"{disease}/burden.csv",
            gazetteer="gazetteer.csv",
            boundaries="boundaries_world.geojson",
            output_dir=f"out/{disease}",
            title=spec["title"],
            seed=seed,
        ))
    written += _us(rng, out)
    written.append(_config(
        out, "hiv-us",
        burden_rule="hiv-us",
        measure="CaseCount",
        burden_label="Number of HIV cases",
        region_kind="us-state",
        tweets="hiv-us/tweets.csv",
        paper_ids="hiv-us/paper_ids.txt",
        paper_counts="hiv-us/paper_counts.csv",
        burden="hiv-us/burden.csv",
        gazetteer="gazetteer.csv",
        boundaries="boundaries_us.geojson",
        extent="-180,15,-60,72",
        canvas="1000x475",
        output_dir="out/hiv-us",
        title="HIV in US states: tweets on papers and cases",
        seed=seed,
    ))
    return written
