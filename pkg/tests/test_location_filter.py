from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geosensor.errors import MissingFile
from geosensor.gazetteer import normalize
from geosensor.linkage import TweetRecord
from geosensor.location_filter import (
    DEFAULT_PATTERNS,
    ExclusionRules,
    Reason,
    Verdict,
    filter_corpus,
    filter_location,
    load_rules,
)

from filter_oracle import CASES

RULES = ExclusionRules()

# alphabet biased toward gazetteer words so random strings sometimes get kept
WORDS = ["london", "uk", "usa", "paris", "france", "new york", "springfield", "california",
         "ca", "and", "&", "www", "http", ",", ";", " ", "Ü", "x", "berlin", "germany", "y"]
location_text = st.one_of(
    st.text(max_size=40),
    st.lists(st.sampled_from(WORDS), max_size=8).map(" ".join),
)


def test_default_pattern_list():
    assert DEFAULT_PATTERNS == ("www", "http", "not from", "worldwide", "everywhere", "mostly nucleus",
                                "bcnvcia", "&", " and ", " und ", " y ")
    assert "&" in RULES.raw_patterns
    assert {"www", "http"} <= set(RULES.raw_patterns)


@pytest.mark.parametrize("raw, expected", CASES)
def test_hand_traced_corpus(gaz, raw, expected):
    d = filter_location(raw, RULES, gaz)
    assert d.reason.value == expected
    assert (d.verdict is Verdict.KEPT) == (expected == "Kept")


@pytest.mark.parametrize("raw, reason", [
    ("Washington DC & New Delhi", Reason.SPURIOUS),
    ("worldwide", Reason.SPURIOUS),
    ("ber", Reason.TOO_SHORT),
    ("london, uk", Reason.KEPT),
    ("somewhere nice", Reason.NO_WHITELIST_HIT),
])
def test_examples(gaz, raw, reason):
    assert filter_location(raw, RULES, gaz).reason is reason


def test_kept_carries_match_and_excluded_does_not(gaz):
    for raw, _ in CASES:
        d = filter_location(raw, RULES, gaz)
        assert (d.verdict is Verdict.KEPT) == (d.reason is Reason.KEPT) == (d.matched is not None)


def test_country_state_form_reports_state(gaz):
    assert filter_location("California, USA", RULES, gaz).state_code == "CA"
    assert filter_location("ny usa", RULES, gaz).state_code == "NY"
    assert filter_location("France", RULES, gaz).state_code is None


def test_load_rules_keeps_surrounding_spaces(tmp_path):
    p = tmp_path / "rules.txt"
    p.write_text("www\n and \n\nFOO\n", encoding="utf-8")
    rules = load_rules(p)
    assert rules.substrings == ("www", " and ", "foo")
    with pytest.raises(MissingFile):
        load_rules(tmp_path / "nope.txt")


def test_custom_rule_excludes(gaz):
    assert filter_location("London, UK", RULES.with_pattern("london"), gaz).reason is Reason.SPURIOUS


@settings(max_examples=400)
@given(location_text)
def test_pure(gaz, s):
    assert filter_location(s, RULES, gaz) == filter_location(s, RULES, gaz)


@settings(max_examples=400)
@given(location_text)
def test_idempotent_on_kept(gaz, s):
    d = filter_location(s, RULES, gaz)
    if d.kept:
        again = filter_location(d.loc_norm, RULES, gaz)
        assert again == d


@settings(max_examples=400)
@given(location_text, st.text(min_size=1, max_size=6))
def test_adding_a_pattern_never_unexcludes(gaz, s, pattern):
    before = filter_location(s, RULES, gaz)
    after = filter_location(s, RULES.with_pattern(pattern), gaz)
    if not before.kept:
        assert not after.kept


@settings(max_examples=400)
@given(location_text)
def test_kept_strings_are_long_with_a_country(gaz, s):
    d = filter_location(s, RULES, gaz)
    if d.kept:
        assert len(d.loc_norm) > 3
        assert d.matched.country_hits
        assert d.loc_norm == normalize(s)


def test_filter_corpus_empty(gaz):
    r = filter_corpus([], RULES, gaz)
    assert r.kept == [] and r.excluded == [] and sum(r.tally.values()) == 0


def test_filter_corpus_tally_and_order(gaz):
    recs = [TweetRecord("1", "p", "worldwide"), TweetRecord("2", "p", "ber"), TweetRecord("3", "p", "london, uk")]
    r = filter_corpus(recs, RULES, gaz)
    assert r.tally == Counter({"Spurious": 1, "TooShort": 1, "Kept": 1})
    assert [rec.tweet_id for rec, _ in r.kept] == ["3"]
    assert [rec.tweet_id for rec, _ in r.excluded] == ["1", "2"]


@settings(max_examples=100)
@given(st.lists(st.sampled_from([c[0] for c in CASES]), max_size=30))
def test_filter_corpus_partition(gaz, raws):
    recs = [TweetRecord(str(i), "p", raw) for i, raw in enumerate(raws)]
    r = filter_corpus(recs, RULES, gaz)
    assert sum(r.tally.values()) == len(recs)
    assert len(r.kept) + len(r.excluded) == len(recs)
    for part in (r.kept, r.excluded):
        ids = [int(rec.tweet_id) for rec, _ in part]
        assert ids == sorted(ids)
    for rec, d in r.kept + r.excluded:
        assert d == filter_location(rec.raw_location, RULES, gaz)
