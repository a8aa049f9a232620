"""Place-name whitelist and the text normalization shared by the whole pipeline.

The gazetteer is a flat CSV of city and country names (GRID style) with
coordinates. Rows with an empty city act as country centroids, or as
state centroids when a US state code is set.
"""

from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from .errors import BadCoordinate, MissingFile, SchemaError

logger = logging.getLogger(__name__)

HEADER = ["city", "country", "country_code", "state_code", "lat", "lon", "population_rank"]

# injected country tokens; "uk" additionally needs a comma or space before it
EXTRA_COUNTRIES = {"usa": "USA", "uk": "GBR"}
_PRECEDED_BY = {"uk": frozenset(" ,")}

SEPARATORS = frozenset(" ,;")
_ALLOWED = frozenset("abcdefghijklmnopqrstuvwxyz ,;")
_WS = re.compile(r"\s+")
_TOKEN = re.compile(r"[^ ,;]+")
_CODE3 = re.compile(r"^[A-Z]{3}$")
_CODE2 = re.compile(r"^[A-Z]{2}$")


def normalize(raw: str | bytes) -> str:
    """Lowercase ASCII, keep only ``a-z``, space, ``,`` and ``;``.

    Any other character is deleted rather than transliterated, so
    ``"München"`` becomes ``"mnchen"``. ASCII whitespace (tabs, newlines)
    counts as space. Runs of spaces collapse to one and the ends are
    trimmed. Bytes are decoded as UTF-8 with undecodable bytes dropped.
    """
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8", errors="ignore")
    out = []
    for ch in raw:
        if "A" <= ch <= "Z":
            ch = ch.lower()
        elif ch in "\t\n\r\f\v":
            ch = " "
        if ch in _ALLOWED:
            out.append(ch)
    return _WS.sub(" ", "".join(out)).strip()


@dataclass(frozen=True)
class GazetteerEntry:
    city_norm: str
    country_norm: str
    country_code: str
    state_code: str | None
    lat: float
    lon: float
    population_rank: int = 0

    @property
    def is_centroid(self) -> bool:
        return self.city_norm == ""


@dataclass(frozen=True)
class MatchResult:
    city_hits: tuple[int, ...] = ()
    country_hits: tuple[str, ...] = ()
    # spans (start, end) of every matched country token, used by the filter
    country_spans: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class Gazetteer:
    entries: tuple[GazetteerEntry, ...]
    city_index: Mapping[str, tuple[int, ...]]
    country_index: Mapping[str, str]
    centroids: Mapping[tuple[str, str | None], int]
    extra_countries: Mapping[str, str] = field(
        default_factory=lambda: MappingProxyType(dict(EXTRA_COUNTRIES))
    )
    rejected_coordinates: int = 0
    # longest indexed name, in tokens; bounds the n-gram scan in match_tokens
    max_tokens: int = 1

    @property
    def country_codes(self) -> frozenset[str]:
        return frozenset(self.country_index.values()) | {
            e.country_code for e in self.entries
        }

    def centroid(self, country_code: str, state_code: str | None = None) -> GazetteerEntry | None:
        idx = self.centroids.get((country_code, state_code))
        return None if idx is None else self.entries[idx]


def build_gazetteer(entries, rejected_coordinates: int = 0) -> Gazetteer:
    """Index already-normalized entries and inject the extra country tokens."""
    entries = tuple(entries)
    city_index: dict[str, list[int]] = {}
    countries: dict[str, set[str]] = {}
    centroids: dict[tuple[str, str | None], int] = {}
    for i, e in enumerate(entries):
        if e.country_norm:
            countries.setdefault(e.country_norm, set()).add(e.country_code)
        if e.is_centroid:
            key = (e.country_code, e.state_code)
            # first row wins when the file repeats a centroid
            centroids.setdefault(key, i)
        else:
            city_index.setdefault(e.city_norm, []).append(i)
    country_index = {name: min(codes) for name, codes in countries.items()}
    for token, code in EXTRA_COUNTRIES.items():
        country_index[token] = code
    names = list(city_index) + list(country_index)
    max_tokens = max((len(_TOKEN.findall(n)) for n in names), default=1)
    return Gazetteer(
        entries=entries,
        city_index=MappingProxyType({k: tuple(v) for k, v in city_index.items()}),
        country_index=MappingProxyType(country_index),
        centroids=MappingProxyType(centroids),
        rejected_coordinates=rejected_coordinates,
        max_tokens=max(max_tokens, 1),
    )


def load_gazetteer(path) -> Gazetteer:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"gazetteer not found: {path}")
    entries = []
    rejected = 0
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != HEADER:
            raise SchemaError(f"{path}: expected header {','.join(HEADER)!r}, got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(HEADER):
                raise SchemaError(f"{path}:{lineno}: expected {len(HEADER)} fields, got {len(row)}")
            try:
                entry = _parse_row(row)
            except BadCoordinate as exc:
                rejected += 1
                logger.warning("%s:%d: %s (row rejected)", path, lineno, exc)
                continue
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from exc
            if entry is not None:
                entries.append(entry)
    if rejected:
        logger.warning("%s: %d row(s) rejected for out-of-range coordinates", path, rejected)
    return build_gazetteer(entries, rejected_coordinates=rejected)


def _parse_row(row) -> GazetteerEntry | None:
    city, country, code, state, lat, lon, rank = (c.strip() for c in row)
    if not _CODE3.match(code):
        raise ValueError(f"country_code must be ISO alpha-3, got {code!r}")
    if state:
        if not _CODE2.match(state):
            raise ValueError(f"state_code must be two letters, got {state!r}")
        if code != "USA":
            raise ValueError("state_code is only allowed for USA rows")
    lat_f, lon_f = float(lat), float(lon)
    if not (-90.0 <= lat_f <= 90.0 and -180.0 <= lon_f <= 180.0):
        raise BadCoordinate(f"lat/lon out of range: {lat}, {lon}")
    rank_i = int(rank) if rank else 0
    if rank_i < 0:
        raise ValueError(f"population_rank must be nonnegative, got {rank_i}")
    city_norm = normalize(city)
    if city and not city_norm:
        # nothing matchable survives normalization (e.g. a non-Latin script)
        return None
    return GazetteerEntry(city_norm, normalize(country), code, state or None, lat_f, lon_f, rank_i)


def token_spans(text: str) -> list[tuple[int, int]]:
    return [m.span() for m in _TOKEN.finditer(text)]


def match_tokens(loc_norm: str, gaz: Gazetteer) -> MatchResult:
    """Find gazetteer city and country names occurring as whole tokens.

    A name matches when it equals a contiguous run of tokens in
    ``loc_norm``, separators included verbatim, so ``"rome"`` never
    matches inside ``"jerome"``.
    """
    spans = token_spans(loc_norm)
    cities: set[int] = set()
    countries: set[str] = set()
    country_spans = []
    for i, (start, _) in enumerate(spans):
        for j in range(i, min(i + gaz.max_tokens, len(spans))):
            cand = loc_norm[start:spans[j][1]]
            hits = gaz.city_index.get(cand)
            if hits:
                cities.update(hits)
            code = gaz.country_index.get(cand)
            if code is not None:
                need = _PRECEDED_BY.get(cand)
                if need is not None and (start == 0 or loc_norm[start - 1] not in need):
                    continue
                countries.add(code)
                country_spans.append((start, spans[j][1]))
    return MatchResult(tuple(sorted(cities)), tuple(sorted(countries)), tuple(country_spans))
