"""Command line entry point: ``geosensor run|filter|geocode|panel|fit|render``.

Exit codes: 0 on success, 2 on a validation error (bad config, missing
input), 1 when a stage fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import GeosensorError, StageError, ValidationError
from .pipeline import load_config, run_all, run_stage

EPILOG = """\
paper-ID lists are fetched outside this tool. The PubMed queries used for
the three disease sets (publication years 2011-2017) were:
  ("hiv"[MeSH Major Topic]) AND ("2011/01/01"[Date - Publication] : "2017/12/31"[Date - Publication])
  ("tuberculosis"[MeSH Major Topic]) AND ("2011/01/01"[Date - Publication] : "2017/12/31"[Date - Publication])
  ("malaria"[MeSH Major Topic]) AND ("2011/01/01"[Date - Publication] : "2017/12/31"[Date - Publication])

external geocoding reads the endpoint from GEOSENSOR_GEOCODE_URL and an
optional key from GEOSENSOR_GEOCODE_KEY.
"""

# flag -> RunConfig field
OVERRIDES = {
    "tweets": "tweets",
    "paper_ids": "paper_ids",
    "paper_counts": "paper_counts",
    "burden": "burden",
    "burden_rule": "burden_rule",
    "measure": "measure",
    "burden_label": "burden_label",
    "gazetteer": "gazetteer",
    "boundaries": "boundaries",
    "rules": "exclusion_rules",
    "cache": "cache",
    "regions": "region_kind",
    "geocode_mode": "geocode_mode",
    "geocode_rps": "geocode_rps",
    "classes": "classes",
    "canvas": "canvas",
    "extent": "extent",
    "dot_base": "dot_base",
    "dot_min": "dot_min",
    "dot_max": "dot_max",
    "output_dir": "output_dir",
    "title": "title",
    "filtered": "filtered",
    "resolved": "resolved",
    "panel": "panel",
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value config file; flags override it")
    p.add_argument("-o", "--output-dir", help="directory for all stage outputs")
    p.add_argument("-v", "--verbose", action="store_true")
    g = p.add_argument_group("inputs")
    g.add_argument("--tweets", help="CSV tweet_id,paper_id,raw_location,has_precise_geo")
    g.add_argument("--paper-ids", help="paper IDs, one per line")
    g.add_argument("--paper-counts", help="CSV region_code,papers")
    g.add_argument("--burden", help="CSV region_code,year,value")
    g.add_argument("--burden-rule", choices=["hiv-world", "tb-world", "malaria-world", "hiv-us"])
    g.add_argument("--measure", choices=["CaseCount", "IncidencePer1000AtRisk"])
    g.add_argument("--burden-label", help="row label for the burden covariate in the fit table")
    g.add_argument("--gazetteer", help="gazetteer CSV")
    g.add_argument("--boundaries", help="GeoJSON FeatureCollection keyed by region_code")
    g.add_argument("--rules", help="exclusion patterns, one per line")
    g.add_argument("--cache", help="geocode cache file (TSV)")
    g.add_argument("--regions", choices=["country", "us-state"])
    g.add_argument("--filtered", help="filter-stage output to geocode (default: <output-dir>/filtered.csv)")
    g.add_argument("--resolved", help="geocode-stage output (default: <output-dir>/resolved.csv)")
    g.add_argument("--panel", help="panel CSV to fit (default: <output-dir>/panel.csv)")
    g = p.add_argument_group("geocoding")
    g.add_argument("--geocode-mode", choices=["offline", "external"])
    g.add_argument("--geocode-rps", type=float, help="external requests per second (default 1)")
    g = p.add_argument_group("map")
    g.add_argument("--classes", type=int, help="number of choropleth classes (default 5)")
    g.add_argument("--canvas", help="WxH in pixels (default 1000x500)")
    g.add_argument("--extent", help="lon_min,lat_min,lon_max,lat_max")
    g.add_argument("--dot-base", type=float, help="radius for weight 1")
    g.add_argument("--dot-min", type=float)
    g.add_argument("--dot-max", type=float)
    g.add_argument("--title")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geosensor",
        description="Map and model tweets about disease papers against disease burden.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "run": "run every stage and write report.json",
        "filter": "keep/exclude free-text locations",
        "geocode": "resolve kept locations to coordinates",
        "panel": "tally tweets per region and join burden and papers",
        "fit": "fit the Poisson regression",
        "render": "draw the SVG and GeoJSON maps",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
        _add_common(p)
    p = sub.add_parser("make-fixtures", help="write the synthetic fixture corpus")
    p.add_argument("out_dir")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command == "make-fixtures":
        from .fixtures import DEFAULT_SEED, make_fixtures

        written = make_fixtures(args.out_dir, DEFAULT_SEED if args.seed is None else args.seed)
        print(json.dumps(sorted(str(p) for p in written), indent=2))
        return 0

    overrides = {field: getattr(args, flag) for flag, field in OVERRIDES.items()}
    try:
        cfg = load_config(args.config, overrides)
        if args.command == "run":
            report = run_all(cfg)
            print(report.to_json(), end="")
        else:
            result = run_stage(args.command, cfg)
            print(json.dumps(result, sort_keys=True, indent=2))
    except ValidationError as exc:
        print(f"geosensor: error: {exc}", file=sys.stderr)
        return 2
    except StageError as exc:
        print(f"geosensor: {exc}", file=sys.stderr)
        return 1
    except GeosensorError as exc:
        print(f"geosensor: {exc}", file=sys.stderr)
        return 1
    return 0
