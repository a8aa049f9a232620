"""Keep/exclude decisions for free-text user locations."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MissingFile
from .gazetteer import Gazetteer, MatchResult, _ALLOWED, match_tokens, normalize
from .us_states import STATE_TOKENS

DEFAULT_PATTERNS = (
    "www",
    "http",
    "not from",
    "worldwide",
    "everywhere",
    "mostly nucleus",
    "bcnvcia",
    "&",
    " and ",
    " und ",
    " y ",
)
URL_MARKERS = ("www", "http")


class Verdict(str, enum.Enum):
    KEPT = "Kept"
    EXCLUDED = "Excluded"


class Reason(str, enum.Enum):
    SPURIOUS = "Spurious"
    TOO_SHORT = "TooShort"
    NO_WHITELIST_HIT = "NoWhitelistHit"
    KEPT = "Kept"


@dataclass(frozen=True)
class ExclusionRules:
    substrings: tuple[str, ...] = DEFAULT_PATTERNS
    min_chars_exclusive: int = 3
    raw_markers: tuple[str, ...] = URL_MARKERS

    def with_pattern(self, pattern: str) -> "ExclusionRules":
        return ExclusionRules(self.substrings + (pattern.lower(),), self.min_chars_exclusive, self.raw_markers)

    @property
    def raw_patterns(self) -> tuple[str, ...]:
        # patterns normalization would destroy, plus URL markers
        return tuple(
            p for p in self.substrings if p in self.raw_markers or not set(p) <= _ALLOWED
        )

    @property
    def normalized_patterns(self) -> tuple[str, ...]:
        return tuple(p for p in self.substrings if set(p) <= _ALLOWED)


def load_rules(path, min_chars_exclusive: int = 3) -> ExclusionRules:
    """Read one pattern per line. Surrounding spaces are significant."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"exclusion rules not found: {path}")
    patterns = []
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\r\n")
            if line.strip():
                patterns.append(line.lower())
    return ExclusionRules(tuple(patterns), min_chars_exclusive)


@dataclass(frozen=True)
class FilterDecision:
    verdict: Verdict
    reason: Reason
    loc_norm: str
    matched: MatchResult | None = None
    state_code: str | None = None

    @property
    def kept(self) -> bool:
        return self.verdict is Verdict.KEPT


def _excluded(reason: Reason, loc_norm: str) -> FilterDecision:
    return FilterDecision(Verdict.EXCLUDED, reason, loc_norm)


def country_state_form(loc_norm: str, match: MatchResult) -> tuple[bool, str | None]:
    """Is ``loc_norm`` just country tokens, optionally with one US state?

    Returns ``(ok, state_code)``. Strings such as ``"usa"``, ``"france"``
    or ``"california, usa"`` qualify; a state is only recognised when
    USA is among the country hits.
    """
    if not match.country_hits:
        return False, None
    chars = list(loc_norm)
    for start, end in match.country_spans:
        chars[start:end] = [","] * (end - start)
    segments = [s.strip() for s in "".join(chars).replace(";", ",").split(",")]
    segments = [s for s in segments if s]
    if not segments:
        return True, None
    if len(segments) == 1 and "USA" in match.country_hits:
        code = STATE_TOKENS.get(segments[0])
        if code is not None:
            return True, code
    return False, None


def filter_location(raw, rules: ExclusionRules, gaz: Gazetteer) -> FilterDecision:
    if raw is None:
        raw = ""
    elif isinstance(raw, bytes):
        raw = raw.decode("utf-8", errors="ignore")
    lowered = raw.lower()
    if any(p in lowered for p in rules.raw_patterns):
        return _excluded(Reason.SPURIOUS, normalize(raw))
    loc = normalize(raw)
    if any(p in loc for p in rules.normalized_patterns):
        return _excluded(Reason.SPURIOUS, loc)
    if len(loc) <= rules.min_chars_exclusive:
        return _excluded(Reason.TOO_SHORT, loc)
    match = match_tokens(loc, gaz)
    if not match.country_hits:
        return _excluded(Reason.NO_WHITELIST_HIT, loc)
    if match.city_hits:
        return FilterDecision(Verdict.KEPT, Reason.KEPT, loc, match)
    ok, state = country_state_form(loc, match)
    if ok:
        return FilterDecision(Verdict.KEPT, Reason.KEPT, loc, match, state)
    return _excluded(Reason.NO_WHITELIST_HIT, loc)


@dataclass
class FilterResult:
    kept: list = field(default_factory=list)  # (record, decision) pairs
    excluded: list = field(default_factory=list)
    tally: Counter = field(default_factory=Counter)
    decisions: list = field(default_factory=list)  # aligned with the input


def filter_corpus(records, rules: ExclusionRules, gaz: Gazetteer) -> FilterResult:
    """Filter tweet records, partitioning them in input order.

    Identical raw strings are decided once and reused.
    """
    result = FilterResult()
    seen: dict[str, FilterDecision] = {}
    for rec in records:
        raw = rec.raw_location or ""
        decision = seen.get(raw)
        if decision is None:
            decision = seen[raw] = filter_location(raw, rules, gaz)
        (result.kept if decision.kept else result.excluded).append((rec, decision))
        result.decisions.append(decision)
        result.tally[decision.reason.value] += 1
    return result
