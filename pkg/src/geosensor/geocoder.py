"""Resolve kept location strings to coordinates and country/state codes.

Offline resolution uses the gazetteer alone. The optional external mode
queries a generic geocoding HTTP endpoint through a persistent TSV cache
and a rate limiter, falling back to offline resolution on any failure.
"""

from __future__ import annotations

import enum
import logging
import math
import os
import threading
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import requests

from .errors import EndpointUnreachable, GeocodeMiss, MalformedResponse, NoCentroid
from .gazetteer import Gazetteer, GazetteerEntry
from .linkage import percent
from .location_filter import FilterDecision, country_state_form

logger = logging.getLogger(__name__)

URL_ENV = "GEOSENSOR_GEOCODE_URL"
KEY_ENV = "GEOSENSOR_GEOCODE_KEY"
MISS = "MISS"


class Source(str, enum.Enum):
    OFFLINE = "Offline"
    EXTERNAL = "External"
    CACHE = "Cache"


@dataclass(frozen=True)
class ResolvedLocation:
    loc_norm: str
    lat: float
    lon: float
    country_code: str
    state_code: str | None = None
    source: Source = Source.OFFLINE

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0 and -180.0 <= self.lon <= 180.0):
            raise ValueError(f"coordinates out of range: {self.lat}, {self.lon}")
        if self.state_code is not None and self.country_code != "USA":
            raise ValueError("state_code is only valid for USA")


def _candidate_key(e: GazetteerEntry):
    # value-based so the choice never depends on gazetteer row order
    return (-e.population_rank, e.country_code, e.city_norm, e.state_code or "", e.lat, e.lon)


def resolve_offline(decision: FilterDecision, gaz: Gazetteer) -> ResolvedLocation:
    """Pick coordinates for a kept location from the gazetteer.

    Among matched cities, prefer those in a matched country, then a unique
    candidate, then the highest ``population_rank``; remaining ties go to
    the lexicographically smallest (country_code, city). Strings with only
    a country (and maybe a US state) resolve to that centroid row.
    """
    if not decision.kept or decision.matched is None:
        raise ValueError("resolve_offline needs a Kept decision")
    match = decision.matched
    if match.city_hits:
        cands = [gaz.entries[i] for i in match.city_hits]
        in_country = [e for e in cands if e.country_code in match.country_hits]
        pool = in_country or cands
        chosen = min(pool, key=_candidate_key)
        return _from_entry(decision.loc_norm, chosen, chosen.state_code)

    state = decision.state_code
    if state is None:
        _, state = country_state_form(decision.loc_norm, match)
    for code in sorted(match.country_hits):
        if code == "USA" and state is not None:
            entry = gaz.centroid(code, state) or gaz.centroid(code)
            if entry is not None:
                return _from_entry(decision.loc_norm, entry, state)
        entry = gaz.centroid(code)
        if entry is not None:
            return _from_entry(decision.loc_norm, entry, None)
    raise NoCentroid(f"no centroid row for {', '.join(match.country_hits)} ({decision.loc_norm!r})")


def _from_entry(loc_norm, entry: GazetteerEntry, state) -> ResolvedLocation:
    state = state if entry.country_code == "USA" else None
    return ResolvedLocation(loc_norm, entry.lat, entry.lon, entry.country_code, state, Source.OFFLINE)


class GeocodeCache:
    """Append-only TSV cache: ``loc_norm lat lon country state`` per line.

    Misses are stored with the ``MISS`` sentinel in the lat column. The
    last line for a key wins on reload. ``path=None`` keeps it in memory.
    """

    def __init__(self, path=None):
        self.path = Path(path) if path is not None else None
        self._rows: dict[str, tuple[str, ...]] = {}
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            with self.path.open(encoding="utf-8") as fh:
                for line in fh:
                    fields = line.rstrip("\n").split("\t")
                    if len(fields) != 5:
                        logger.warning("skipping malformed cache line: %r", line)
                        continue
                    self._rows[fields[0]] = tuple(fields[1:])

    def __contains__(self, loc_norm):
        return loc_norm in self._rows

    def __len__(self):
        return len(self._rows)

    def get(self, loc_norm):
        """Return a ResolvedLocation, the string ``MISS``, or None if absent."""
        fields = self._rows.get(loc_norm)
        if fields is None:
            return None
        if fields[0] == MISS:
            return MISS
        lat, lon, country, state = fields
        return ResolvedLocation(loc_norm, float(lat), float(lon), country, state or None, Source.CACHE)

    def raw(self, loc_norm):
        return self._rows.get(loc_norm)

    def put(self, loc_norm, value) -> None:
        if value == MISS:
            fields = (MISS, "", "", "")
        else:
            fields = (repr(value.lat), repr(value.lon), value.country_code, value.state_code or "")
        line = "\t".join((loc_norm,) + fields) + "\n"
        with self._lock:
            self._rows[loc_norm] = fields
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(line)


class RateLimiter:
    def __init__(self, rps: float, clock=time.monotonic, sleep=time.sleep):
        if rps <= 0:
            raise ValueError("rps must be positive")
        self.interval = 1.0 / rps
        self._clock = clock
        self._sleep = sleep
        self._next = None
        self._lock = threading.Lock()

    def wait(self):
        with self._lock:
            now = self._clock()
            if self._next is not None and now < self._next:
                self._sleep(self._next - now)
                now = self._next
            self._next = now + self.interval


@dataclass
class EndpointConfig:
    url: str
    key: str | None = None
    rps: float = 1.0
    timeout: float = 10.0
    retries: int = 2
    backoff: float = 0.5

    @classmethod
    def from_env(cls, rps: float = 1.0, **kwargs) -> "EndpointConfig":
        url = os.environ.get(URL_ENV)
        if not url:
            raise EndpointUnreachable(f"external geocoding needs {URL_ENV} to be set")
        return cls(url=url, key=os.environ.get(KEY_ENV) or None, rps=rps, **kwargs)


class ExternalGeocoder:
    def __init__(self, endpoint: EndpointConfig, cache: GeocodeCache, session=None,
                 limiter: RateLimiter | None = None, valid_countries=None):
        self.endpoint = endpoint
        self.cache = cache
        self.session = session or requests.Session()
        self.limiter = limiter or RateLimiter(endpoint.rps)
        self.valid_countries = valid_countries
        self.stats = Counter()

    def resolve(self, loc_norm: str, fallback=None) -> ResolvedLocation:
        cached = self.cache.get(loc_norm)
        if isinstance(cached, ResolvedLocation):
            self.stats["cache_hits"] += 1
            return cached
        if cached == MISS:
            self.stats["cache_hits"] += 1
            return self._fallback(loc_norm, fallback, GeocodeMiss(loc_norm))
        try:
            result = self._fetch(loc_norm)
        except EndpointUnreachable as exc:
            self.stats["unreachable"] += 1
            return self._fallback(loc_norm, fallback, exc)
        except MalformedResponse as exc:
            self.stats["malformed"] += 1
            return self._fallback(loc_norm, fallback, exc)
        self.cache.put(loc_norm, result)
        if result == MISS:
            self.stats["misses"] += 1
            return self._fallback(loc_norm, fallback, GeocodeMiss(loc_norm))
        return result

    @staticmethod
    def _fallback(loc_norm, fallback, exc):
        if fallback is None:
            raise exc
        logger.debug("external geocoding failed for %r (%s); using offline", loc_norm, exc)
        return fallback()

    def _fetch(self, loc_norm):
        params = {"q": loc_norm}
        if self.endpoint.key:
            params["key"] = self.endpoint.key
        last = None
        for attempt in range(self.endpoint.retries + 1):
            if attempt:
                time.sleep(self.endpoint.backoff * 2 ** (attempt - 1))
            self.limiter.wait()
            self.stats["requests"] += 1
            try:
                resp = self.session.get(self.endpoint.url, params=params, timeout=self.endpoint.timeout)
            except requests.RequestException as exc:
                last = exc
                continue
            if resp.status_code == 404:
                return MISS
            if resp.status_code >= 500:
                last = f"HTTP {resp.status_code}"
                continue
            if resp.status_code != 200:
                raise MalformedResponse(f"unexpected HTTP {resp.status_code}")
            return self._parse(loc_norm, resp)
        raise EndpointUnreachable(f"{self.endpoint.url}: {last}")

    def _parse(self, loc_norm, resp):
        try:
            data = resp.json()
        except ValueError as exc:
            raise MalformedResponse(f"response is not JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise MalformedResponse("response is not a JSON object")
        if data.get("lat") is None and data.get("lon") is None:
            return MISS
        try:
            lat, lon = float(data["lat"]), float(data["lon"])
            country = str(data["country_code"]).upper()
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedResponse(f"missing or invalid field: {exc}") from exc
        if not (math.isfinite(lat) and math.isfinite(lon)):
            raise MalformedResponse("non-finite coordinates")
        if self.valid_countries is not None and country not in self.valid_countries:
            raise MalformedResponse(f"unknown country code {country!r}")
        state = data.get("state_code") or None
        if state is not None:
            state = str(state).upper() if country == "USA" else None
        try:
            return ResolvedLocation(loc_norm, lat, lon, country, state, Source.EXTERNAL)
        except ValueError as exc:
            raise MalformedResponse(str(exc)) from exc


def resolve_external(loc_norm, cache: GeocodeCache, endpoint: EndpointConfig, *, fallback=None,
                     session=None, limiter=None, valid_countries=None) -> ResolvedLocation:
    """One-shot external resolution; see :class:`ExternalGeocoder`."""
    geocoder = ExternalGeocoder(endpoint, cache, session=session, limiter=limiter,
                                valid_countries=valid_countries)
    return geocoder.resolve(loc_norm, fallback=fallback)


@dataclass
class BatchResult:
    resolved: list = field(default_factory=list)  # (record, ResolvedLocation) pairs
    skipped: int = 0
    skip_reasons: Counter = field(default_factory=Counter)
    sources: Counter = field(default_factory=Counter)


def resolve_batch(kept, gaz: Gazetteer, mode: str = "offline",
                  external: ExternalGeocoder | None = None) -> BatchResult:
    """Resolve ``(record, decision)`` pairs from the filter stage."""
    if mode not in ("offline", "external"):
        raise ValueError(f"unknown geocode mode {mode!r}")
    if mode == "external" and external is None:
        raise ValueError("external mode needs an ExternalGeocoder")
    out = BatchResult()
    memo: dict[str, ResolvedLocation | Exception] = {}
    for rec, decision in kept:
        key = decision.loc_norm
        if key not in memo:
            try:
                if mode == "offline":
                    memo[key] = resolve_offline(decision, gaz)
                else:
                    memo[key] = external.resolve(key, fallback=lambda d=decision: resolve_offline(d, gaz))
            except NoCentroid as exc:
                memo[key] = exc
        res = memo[key]
        if isinstance(res, Exception):
            out.skipped += 1
            out.skip_reasons[type(res).__name__] += 1
            continue
        out.resolved.append((rec, res))
        out.sources[res.source.value] += 1
    return out


def format_resolution(resolved: int, total_tweets: int) -> str:
    """E.g. ``"16,966 geo-coordinates (19.8% of all tweets)"``."""
    return f"{resolved:,} geo-coordinates ({percent(resolved, total_tweets):.1f}% of all tweets)"
