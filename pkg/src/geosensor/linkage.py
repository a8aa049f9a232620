"""Join tweets to the paper set and tally tweets per region into a panel."""

from __future__ import annotations

import csv
import logging
from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from pathlib import Path

from .errors import EmptyField, MissingFile, SchemaError, UnknownPaperId

logger = logging.getLogger(__name__)

TWEET_HEADER = ["tweet_id", "paper_id", "raw_location", "has_precise_geo"]
PAPER_COUNT_HEADER = ["region_code", "papers"]
PANEL_HEADER = ["region_code", "tweets", "burden", "papers"]

_TRUE = {"1", "true", "yes", "t", "y"}
_FALSE = {"0", "false", "no", "f", "n", ""}


def percent(part: int, whole: int) -> float:
    """100 * part / whole rounded half-up to one decimal (0.0 if whole is 0)."""
    if whole == 0:
        return 0.0
    exact = Fraction(100 * part, whole)
    dec = Decimal(exact.numerator) / Decimal(exact.denominator)
    return float(dec.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class TweetRecord:
    tweet_id: str
    paper_id: str
    raw_location: str | None = None
    has_precise_geo: bool = False

    def __post_init__(self):
        if not self.tweet_id:
            raise EmptyField("tweet_id is empty")
        if not self.paper_id:
            raise EmptyField("paper_id is empty")


@dataclass(frozen=True)
class CoverageStats:
    papers_total: int
    papers_tweeted: int
    coverage_pct: float
    tweets_total: int
    tweets_with_location: int
    tweets_resolved: int
    resolved_pct_of_all: float
    tweets_with_precise_geo: int = 0


@dataclass(frozen=True)
class RegionPanel:
    region_code: str
    tweets: int
    burden: float
    papers: int


@dataclass
class PanelBuild:
    rows: list[RegionPanel]
    # region -> reason it was left out ("no_burden", "no_papers")
    excluded: dict[str, str] = field(default_factory=dict)
    excluded_tweets: int = 0
    # resolutions that cannot be attributed to a region of this kind
    unattributed: int = 0

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)


def _require(path) -> Path:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"file not found: {path}")
    return path


def _check_header(path, header, expected):
    if header != expected:
        raise SchemaError(f"{path}: expected header {','.join(expected)!r}, got {header!r}")


def load_tweets(path) -> list[TweetRecord]:
    path = _require(path)
    records = []
    seen = set()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        _check_header(path, next(reader, None), TWEET_HEADER)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(TWEET_HEADER):
                raise SchemaError(f"{path}:{lineno}: expected {len(TWEET_HEADER)} fields, got {len(row)}")
            tweet_id, paper_id, raw_location = row[0].strip(), row[1].strip(), row[2]
            geo = row[3].strip().lower()
            if not tweet_id:
                raise EmptyField(f"{path}:{lineno}: empty tweet_id")
            if not paper_id:
                raise EmptyField(f"{path}:{lineno}: empty paper_id")
            if geo not in _TRUE and geo not in _FALSE:
                raise SchemaError(f"{path}:{lineno}: has_precise_geo must be a boolean, got {row[3]!r}")
            if tweet_id in seen:
                logger.warning("%s:%d: duplicate tweet_id %s kept as a separate row", path, lineno, tweet_id)
            seen.add(tweet_id)
            records.append(TweetRecord(tweet_id, paper_id, raw_location or None, geo in _TRUE))
    return records


def load_paper_ids(path) -> set[str]:
    """One PubMed-style ID per line; blank lines and ``#`` comments ignored."""
    path = _require(path)
    ids = set()
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                ids.add(line)
    return ids


def load_paper_counts(path) -> dict[str, int]:
    path = _require(path)
    counts: dict[str, int] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        _check_header(path, next(reader, None), PAPER_COUNT_HEADER)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise SchemaError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            code, papers = row[0].strip(), row[1].strip()
            if not code or not papers:
                raise EmptyField(f"{path}:{lineno}: empty field")
            try:
                n = int(papers)
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: papers must be an integer") from exc
            if n < 0:
                raise SchemaError(f"{path}:{lineno}: papers must be nonnegative")
            if code in counts:
                raise SchemaError(f"{path}:{lineno}: duplicate region {code}")
            counts[code] = n
    return counts


def compute_coverage(paper_ids, tweets, resolved_count: int) -> CoverageStats:
    paper_ids = set(paper_ids)
    tweeted = set()
    for t in tweets:
        if t.paper_id not in paper_ids:
            raise UnknownPaperId(f"tweet {t.tweet_id} references unknown paper {t.paper_id}")
        tweeted.add(t.paper_id)
    return coverage_from_counts(
        papers_total=len(paper_ids),
        papers_tweeted=len(tweeted),
        tweets_total=len(tweets),
        tweets_with_location=sum(1 for t in tweets if t.raw_location and t.raw_location.strip()),
        tweets_resolved=resolved_count,
        tweets_with_precise_geo=sum(1 for t in tweets if t.has_precise_geo),
    )


def coverage_from_counts(papers_total, papers_tweeted, tweets_total=0, tweets_with_location=0,
                         tweets_resolved=0, tweets_with_precise_geo=0) -> CoverageStats:
    if not 0 <= papers_tweeted <= papers_total:
        raise ValueError("papers_tweeted must lie in [0, papers_total]")
    if not 0 <= tweets_resolved <= tweets_with_location <= tweets_total:
        raise ValueError("need tweets_resolved <= tweets_with_location <= tweets_total")
    return CoverageStats(
        papers_total=papers_total,
        papers_tweeted=papers_tweeted,
        coverage_pct=percent(papers_tweeted, papers_total),
        tweets_total=tweets_total,
        tweets_with_location=tweets_with_location,
        tweets_resolved=tweets_resolved,
        resolved_pct_of_all=percent(tweets_resolved, tweets_total),
        tweets_with_precise_geo=tweets_with_precise_geo,
    )


def region_of(loc, region_kind: str) -> str | None:
    if region_kind == "country":
        return loc.country_code
    if region_kind == "us-state":
        return loc.state_code if loc.country_code == "USA" else None
    raise ValueError(f"unknown region kind {region_kind!r}")


def tally_tweets(resolved, region_kind: str) -> tuple[Counter, int]:
    """Count resolved tweets per region; also return how many had no region."""
    counts = Counter()
    unattributed = 0
    for _, loc in resolved:
        region = region_of(loc, region_kind)
        if region is None:
            unattributed += 1
        else:
            counts[region] += 1
    return counts, unattributed


def build_panel(resolved, burden, papers, region_kind: str) -> PanelBuild:
    """Assemble regression rows for regions with tweets, burden and papers.

    ``burden`` is an iterable of BurdenValue (or a region -> value map);
    ``papers`` maps region -> paper count. A region enters the panel only
    if it has at least one tweet and both covariates are present.
    """
    if not isinstance(burden, dict):
        burden = {b.region_code: b.value for b in burden}
    counts, unattributed = tally_tweets(resolved, region_kind)
    rows = []
    excluded = {}
    excluded_tweets = unattributed
    for region in sorted(counts):
        n = counts[region]
        if region not in burden:
            excluded[region] = "no_burden"
        elif region not in papers:
            excluded[region] = "no_papers"
        else:
            rows.append(RegionPanel(region, n, float(burden[region]), int(papers[region])))
            continue
        excluded_tweets += n
    return PanelBuild(rows, excluded, excluded_tweets, unattributed)


def write_panel(rows, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(PANEL_HEADER)
    for r in rows:
        writer.writerow([r.region_code, r.tweets, repr(float(r.burden)), r.papers])


def read_panel(path) -> list[RegionPanel]:
    path = _require(path)
    rows = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        _check_header(path, next(reader, None), PANEL_HEADER)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append(RegionPanel(row[0], int(row[1]), float(row[2]), int(row[3])))
            except (IndexError, ValueError) as exc:
                raise SchemaError(f"{path}:{lineno}: bad panel row {row!r}") from exc
    return rows
