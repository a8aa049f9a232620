"""End-to-end orchestration: filter, geocode, panel, fit, render.

Every stage reads its inputs from files and writes its outputs into the
run's output directory, so running the stages one at a time produces
exactly what :func:`run_all` produces.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import tempfile
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import __version__
from .burden import Measure, RULES, aggregate_all, load_burden
from .errors import GeosensorError, MissingFile, StageError, ValidationError
from .gazetteer import load_gazetteer, match_tokens
from .geocoder import (
    EndpointConfig,
    ExternalGeocoder,
    GeocodeCache,
    ResolvedLocation,
    Source,
    format_resolution,
    resolve_batch,
)
from .glm import fit_poisson, n_label, summarize, summary_csv
from .linkage import (
    TweetRecord,
    build_panel,
    compute_coverage,
    load_paper_counts,
    load_paper_ids,
    load_tweets,
    read_panel,
    region_of,
    write_panel,
)
from .location_filter import (
    ExclusionRules,
    FilterDecision,
    Reason,
    Verdict,
    country_state_form,
    filter_corpus,
    load_rules,
)
from .mapgen import MapSpec, Projection, classify, load_boundaries, render_geojson, render_svg

logger = logging.getLogger(__name__)

FILTERED = "filtered.csv"
RESOLVED = "resolved.csv"
PANEL = "panel.csv"
FIT_TABLE = "fit_table.txt"
FIT_CSV = "fit.csv"
MAP_SVG = "map.svg"
MAP_GEOJSON = "map.geojson"
REPORT = "report.json"

FILTERED_HEADER = ["tweet_id", "paper_id", "verdict", "reason", "loc_norm"]
RESOLVED_HEADER = ["tweet_id", "paper_id", "loc_norm", "lat", "lon", "country_code", "state_code", "source"]

PATH_KEYS = ("tweets", "paper_ids", "paper_counts", "burden", "gazetteer", "boundaries",
             "exclusion_rules", "cache", "output_dir", "panel", "resolved", "filtered")


@dataclass
class RunConfig:
    disease: str = "disease"
    burden_rule: str | None = None
    measure: str = Measure.CASE_COUNT.value
    burden_label: str = "Number of cases"
    papers_label: str = "Number of papers"
    region_kind: str = "country"
    tweets: Path | None = None
    paper_ids: Path | None = None
    paper_counts: Path | None = None
    burden: Path | None = None
    gazetteer: Path | None = None
    boundaries: Path | None = None
    exclusion_rules: Path | None = None
    cache: Path | None = None
    output_dir: Path = Path("out")
    # optional overrides for a single stage's input
    filtered: Path | None = None
    resolved: Path | None = None
    panel: Path | None = None
    geocode_mode: str = "offline"
    geocode_rps: float = 1.0
    classes: int = 5
    canvas: str = "1000x500"
    extent: str = "-180,-90,180,90"
    dot_base: float = 4.0
    dot_min: float = 1.0
    dot_max: float = 8.0
    title: str = ""
    seed: int | None = None

    @property
    def rule(self) -> str:
        return self.burden_rule or self.disease

    def out(self, name) -> Path:
        return Path(self.output_dir) / name

    def projection(self) -> Projection:
        try:
            w, h = (int(v) for v in self.canvas.lower().split("x"))
            lon0, lat0, lon1, lat1 = (float(v) for v in self.extent.split(","))
        except ValueError as exc:
            raise ValidationError(f"bad canvas {self.canvas!r} or extent {self.extent!r}") from exc
        return Projection(w, h, lon0, lon1, lat0, lat1)

    def validate(self, required=()) -> None:
        if self.region_kind not in ("country", "us-state"):
            raise ValidationError(f"region_kind must be country or us-state, got {self.region_kind!r}")
        if self.geocode_mode not in ("offline", "external"):
            raise ValidationError(f"geocode_mode must be offline or external, got {self.geocode_mode!r}")
        if self.classes < 2:
            raise ValidationError("classes must be >= 2")
        if not 0 < self.dot_min <= self.dot_max:
            raise ValidationError("need 0 < dot_min <= dot_max")
        try:
            Measure(self.measure)
        except ValueError:
            raise ValidationError(f"unknown measure {self.measure!r}") from None
        if "burden" in required and self.rule not in RULES:
            raise ValidationError(f"unknown burden rule {self.rule!r}; choose from {sorted(RULES)}")
        self.projection()
        for key in required:
            value = getattr(self, key)
            if value is None:
                raise ValidationError(f"config is missing '{key}'")
            if not Path(value).is_file():
                raise MissingFile(f"{key}: file not found: {value}")
        if self.exclusion_rules is not None and not Path(self.exclusion_rules).is_file():
            raise MissingFile(f"exclusion_rules: file not found: {self.exclusion_rules}")
        out = Path(self.output_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ValidationError(f"cannot create output directory {out}: {exc}") from exc
        if not os.access(out, os.W_OK):
            raise ValidationError(f"output directory {out} is not writable")


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key, value, base: Path | None):
    kind = _TYPES[key]
    if key in PATH_KEYS:
        p = Path(value).expanduser()
        return p if p.is_absolute() or base is None else base / p
    if "int" in kind:
        return int(value)
    if "float" in kind:
        return float(value)
    return value


def parse_config(text: str, base: Path | None = None) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment line."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise ValidationError(f"config line {lineno}: unknown key {key!r}")
        try:
            out[key] = _coerce(key, value, base)
        except ValueError as exc:
            raise ValidationError(f"config line {lineno}: bad value for {key}: {value!r}") from exc
    return out


def load_config(path=None, overrides=None) -> RunConfig:
    """Config file values, then CLI overrides (which win)."""
    values = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise MissingFile(f"config not found: {path}")
        values.update(parse_config(path.read_text(encoding="utf-8"), base=path.parent))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        try:
            values[key] = _coerce(key, value, None)
        except ValueError as exc:
            raise ValidationError(f"bad value for {key}: {value!r}") from exc
    return RunConfig(**values)


# ------------------------------------------------------------------ helpers

def atomic_write(path, text: str) -> None:
    """Write via a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _read_csv(path, header):
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"file not found: {path} (run the previous stage first)")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        got = next(reader, None)
        if got != header:
            raise ValidationError(f"{path}: expected header {','.join(header)!r}, got {got!r}")
        return [row for row in reader if row]


def _rules(cfg: RunConfig) -> ExclusionRules:
    return load_rules(cfg.exclusion_rules) if cfg.exclusion_rules else ExclusionRules()


def _burden_values(cfg: RunConfig):
    series = load_burden(cfg.burden, cfg.measure, cfg.region_kind)
    return aggregate_all(series, cfg.rule)


def _read_resolved(path) -> list:
    out = []
    for row in _read_csv(path, RESOLVED_HEADER):
        tweet_id, paper_id, loc_norm, lat, lon, country, state, source = row
        rec = TweetRecord(tweet_id, paper_id)
        loc = ResolvedLocation(loc_norm, float(lat), float(lon), country, state or None, Source(source))
        out.append((rec, loc))
    return out


# ------------------------------------------------------------------- stages

def stage_filter(cfg: RunConfig) -> dict:
    cfg.validate(("tweets", "gazetteer"))
    tweets = load_tweets(cfg.tweets)
    gaz = load_gazetteer(cfg.gazetteer)
    with_location = [t for t in tweets if t.raw_location and t.raw_location.strip()]
    result = filter_corpus(with_location, _rules(cfg), gaz)
    rows = [
        [t.tweet_id, t.paper_id, d.verdict.value, d.reason.value, d.loc_norm]
        for t, d in zip(with_location, result.decisions)
    ]
    atomic_write(cfg.out(FILTERED), _csv_text(FILTERED_HEADER, rows))
    return {
        "tweets_total": len(tweets),
        "tweets_with_location": len(with_location),
        "tweets_with_precise_geo": sum(t.has_precise_geo for t in tweets),
        "tally": {r.value: result.tally.get(r.value, 0) for r in Reason},
        "kept": len(result.kept),
        "gazetteer_rows_rejected": gaz.rejected_coordinates,
        "outputs": [FILTERED],
    }


def _external_geocoder(cfg: RunConfig, gaz) -> ExternalGeocoder:
    endpoint = EndpointConfig.from_env(rps=cfg.geocode_rps)
    cache = GeocodeCache(cfg.cache)
    return ExternalGeocoder(endpoint, cache, valid_countries=gaz.country_codes)


def stage_geocode(cfg: RunConfig) -> dict:
    cfg.validate(("tweets", "paper_ids", "gazetteer"))
    gaz = load_gazetteer(cfg.gazetteer)
    kept = []
    for tweet_id, paper_id, verdict, _reason, loc_norm in _read_csv(cfg.filtered or cfg.out(FILTERED),
                                                                   FILTERED_HEADER):
        if verdict != Verdict.KEPT.value:
            continue
        match = match_tokens(loc_norm, gaz)
        _, state = country_state_form(loc_norm, match) if not match.city_hits else (True, None)
        decision = FilterDecision(Verdict.KEPT, Reason.KEPT, loc_norm, match, state)
        kept.append((TweetRecord(tweet_id, paper_id), decision))
    external = _external_geocoder(cfg, gaz) if cfg.geocode_mode == "external" else None
    batch = resolve_batch(kept, gaz, cfg.geocode_mode, external)
    rows = [
        [rec.tweet_id, rec.paper_id, loc.loc_norm, repr(loc.lat), repr(loc.lon), loc.country_code,
         loc.state_code or "", loc.source.value]
        for rec, loc in batch.resolved
    ]
    atomic_write(cfg.out(RESOLVED), _csv_text(RESOLVED_HEADER, rows))

    tweets = load_tweets(cfg.tweets)
    coverage = compute_coverage(load_paper_ids(cfg.paper_ids), tweets, len(batch.resolved))
    summary = {
        "kept": len(kept),
        "resolved": len(batch.resolved),
        "skipped": batch.skipped,
        "skip_reasons": dict(sorted(batch.skip_reasons.items())),
        "sources": dict(sorted(batch.sources.items())),
        "resolution": format_resolution(len(batch.resolved), len(tweets)),
        "coverage": asdict(coverage),
        "outputs": [RESOLVED],
    }
    if external is not None:
        summary["external"] = dict(sorted(external.stats.items()))
    return summary


def stage_panel(cfg: RunConfig) -> dict:
    cfg.validate(("burden", "paper_counts"))
    resolved = _read_resolved(cfg.resolved or cfg.out(RESOLVED))
    values, nodata = _burden_values(cfg)
    build = build_panel(resolved, values, load_paper_counts(cfg.paper_counts), cfg.region_kind)
    buf = io.StringIO()
    write_panel(build.rows, buf)
    atomic_write(cfg.out(PANEL), buf.getvalue())
    return {
        "n": len(build.rows),
        "regions_with_tweets": len(build.rows) + len(build.excluded),
        "excluded_regions": dict(sorted(build.excluded.items())),
        "excluded_tweets": build.excluded_tweets,
        "unattributed_tweets": build.unattributed,
        "burden_nodata_regions": nodata,
        "outputs": [PANEL],
    }


def stage_fit(cfg: RunConfig) -> dict:
    cfg.validate(())
    rows = read_panel(cfg.panel or cfg.out(PANEL))
    labels = (cfg.burden_label, cfg.papers_label)
    fit = fit_poisson(rows, labels=labels)
    atomic_write(cfg.out(FIT_TABLE), summarize(fit, labels, cfg.region_kind))
    atomic_write(cfg.out(FIT_CSV), summary_csv(fit, labels, cfg.region_kind))
    summary = fit.to_dict()
    summary["n_label"] = n_label(fit.n, cfg.region_kind)
    summary["outputs"] = [FIT_TABLE, FIT_CSV]
    return summary


def stage_render(cfg: RunConfig) -> dict:
    cfg.validate(("burden", "paper_counts", "boundaries"))
    resolved = _read_resolved(cfg.resolved or cfg.out(RESOLVED))
    values, _ = _burden_values(cfg)
    papers = load_paper_counts(cfg.paper_counts)
    boundaries = load_boundaries(cfg.boundaries)
    burdens = {code: None for code in boundaries}
    burdens.update({b.region_code: b.value for b in values})
    classification = classify(burdens, cfg.classes)
    points = []
    for _, loc in resolved:
        region = region_of(loc, cfg.region_kind)
        if region is not None:
            points.append((loc.lat, loc.lon, region))
    spec = MapSpec.build(classification, points, papers, title=cfg.title or cfg.disease,
                         projection=cfg.projection(), r_base=cfg.dot_base,
                         r_min=cfg.dot_min, r_max=cfg.dot_max)
    svg, warns = render_svg(spec, boundaries)
    atomic_write(cfg.out(MAP_SVG), svg)
    atomic_write(cfg.out(MAP_GEOJSON), render_geojson(spec, boundaries))
    return {
        "regions": len(spec.regions),
        "regions_nodata": sum(r.nodata for r in spec.regions),
        "dots": len(spec.dots),
        "class_breaks": classification.breaks,
        "warnings": classification.warnings + warns,
        "outputs": [MAP_SVG, MAP_GEOJSON],
    }


STAGES = {
    "filter": stage_filter,
    "geocode": stage_geocode,
    "panel": stage_panel,
    "fit": stage_fit,
    "render": stage_render,
}


@dataclass
class RunReport:
    disease: str
    region_kind: str
    coverage: dict
    filter: dict
    geocode: dict
    panel: dict
    fit: dict
    render: dict
    outputs: list
    timings: dict = field(default_factory=dict)
    version: str = __version__

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"


def run_stage(name: str, cfg: RunConfig) -> dict:
    try:
        return STAGES[name](cfg)
    except ValidationError:
        raise
    except (GeosensorError, OSError, ValueError) as exc:
        raise StageError(name, exc) from exc


def run_all(cfg: RunConfig) -> RunReport:
    cfg.validate(("tweets", "paper_ids", "paper_counts", "burden", "gazetteer", "boundaries"))
    results, timings = {}, {}
    for name in STAGES:
        start = time.perf_counter()
        results[name] = run_stage(name, cfg)
        timings[name] = round(time.perf_counter() - start, 6)
        logger.info("stage %s done in %.3fs", name, timings[name])
    if results["fit"]["n"] != results["panel"]["n"]:
        raise StageError("fit", f"fit n={results['fit']['n']} differs from panel n={results['panel']['n']}")
    outputs = [o for r in results.values() for o in r["outputs"]] + [REPORT]
    report = RunReport(
        disease=cfg.disease,
        region_kind=cfg.region_kind,
        coverage=results["geocode"]["coverage"],
        outputs=outputs,
        timings=timings,
        **results,
    )
    atomic_write(cfg.out(REPORT), report.to_json())
    return report
