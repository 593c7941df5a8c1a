"""Tests for filter-list parsing and blocklist-efficacy evaluation."""

from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from wallettrace.filterlists import (
    DOMAIN_ANCHOR,
    PLAIN_SUBSTRING,
    BlocklistReport,
    FilterList,
    FilterRule,
    evaluate_blocklists,
    load_filter_list,
    parse_adblock_list,
    parse_domain_json,
    probe_url,
    url_blocked,
)

from conftest import fixture_path

EASY = fixture_path("blocklists", "easyprivacy_fixture.txt")
DISCONNECT = fixture_path("blocklists", "disconnect_fixture.json")


@pytest.fixture(scope="module")
def easy() -> FilterList:
    return load_filter_list(EASY, name="easyprivacy")


@pytest.fixture(scope="module")
def disconnect() -> FilterList:
    return load_filter_list(DISCONNECT, name="disconnect")


# ---------------------------------------------------------------------------
# adblock parsing
# ---------------------------------------------------------------------------


def test_parse_adblock_fixture_rules(easy) -> None:
    assert easy.name == "easyprivacy"
    assert easy.rules == (
        FilterRule(DOMAIN_ANCHOR, "wpadmngr.com"),
        FilterRule(DOMAIN_ANCHOR, "google-analytics.com"),
        FilterRule(DOMAIN_ANCHOR, "mixpanel.com"),  # $third-party stripped
        FilterRule(DOMAIN_ANCHOR, "amplitude.com"),
        FilterRule(DOMAIN_ANCHOR, "stats.g.doubleclick.net"),
        FilterRule(PLAIN_SUBSTRING, "/analytics.js"),
        FilterRule(PLAIN_SUBSTRING, "-tracker."),
        FilterRule(DOMAIN_ANCHOR, "goodhost.test", exception=True),
        FilterRule(DOMAIN_ANCHOR, "collector.websift.test"),
        FilterRule(PLAIN_SUBSTRING, "*banner*ads*"),
        FilterRule(PLAIN_SUBSTRING, "https://ads.example"),
        FilterRule(DOMAIN_ANCHOR, "trackzone.test"),  # $script,third-party stripped
    )


def test_parse_adblock_skips_comments_headers_cosmetics() -> None:
    text = "\n".join(
        [
            "[Adblock Plus 2.0]",
            "! a comment",
            "site.example##.banner",
            "site.example#@#.banner",
            "site.example#?#div:-abp-has(.x)",
            "",
            "   ",
        ]
    )
    assert parse_adblock_list(text).rules == ()


def test_parse_adblock_degenerate_lines_dropped() -> None:
    # Lines that reduce to nothing after stripping syntax produce no rule.
    assert parse_adblock_list("@@\n$third-party\n***\n||^\n|\n^").rules == ()


def test_parse_adblock_anchor_case_folded() -> None:
    rules = parse_adblock_list("||Tracker.Example^").rules
    assert rules == (FilterRule(DOMAIN_ANCHOR, "tracker.example"),)


def test_parse_adblock_exception_substring() -> None:
    rules = parse_adblock_list("@@/allowed.js").rules
    assert rules == (FilterRule(PLAIN_SUBSTRING, "/allowed.js", exception=True),)


@given(text=st.text(alphabet="abcz.|^$!#*@-/:\n \t[]{}()", max_size=300))
def test_parse_adblock_is_total(text: str) -> None:
    flist = parse_adblock_list(text)
    for rule in flist.rules:
        assert rule.kind in (DOMAIN_ANCHOR, PLAIN_SUBSTRING)
        assert rule.text


# ---------------------------------------------------------------------------
# domain JSON parsing
# ---------------------------------------------------------------------------


def test_parse_domain_json_fixture(disconnect) -> None:
    assert disconnect.name == "disconnect"
    assert [r.text for r in disconnect.rules] == [
        "mixpanel.com",
        "mxpnl.com",
        "amplitude.com",
        "adsco.re",
        "chainstat.test",
        "api.chainstat.test",
    ]
    assert all(r.kind == DOMAIN_ANCHOR and not r.exception for r in disconnect.rules)


def test_parse_domain_json_dedup_and_case() -> None:
    text = json.dumps({"a": [["Tracker.Example", "tracker.example", "not a domain!"]]})
    flist = parse_domain_json(text)
    assert [r.text for r in flist.rules] == ["tracker.example"]


def test_parse_domain_json_ignores_non_domain_strings() -> None:
    text = json.dumps({"c": [["https://x.test/", "single", "ends-with-.", "x.test"]]})
    assert [r.text for r in parse_domain_json(text).rules] == ["x.test"]


_JSON_VALUES = st.recursive(
    st.none() | st.booleans() | st.integers() | st.text(max_size=12),
    lambda children: st.lists(children, max_size=4)
    | st.dictionaries(st.text(max_size=6), children, max_size=4),
    max_leaves=12,
)


@given(doc=_JSON_VALUES)
def test_parse_domain_json_is_total_on_valid_json(doc) -> None:
    flist = parse_domain_json(json.dumps(doc))
    for rule in flist.rules:
        assert rule.kind == DOMAIN_ANCHOR
        assert "." in rule.text


# ---------------------------------------------------------------------------
# format auto-detection
# ---------------------------------------------------------------------------


def test_load_detects_adblock_despite_bracket_header(easy) -> None:
    with open(EASY, encoding="utf-8") as f:
        text = f.read()
    assert easy.rules == parse_adblock_list(text).rules


def test_load_detects_domain_json(disconnect) -> None:
    with open(DISCONNECT, encoding="utf-8") as f:
        text = f.read()
    assert disconnect.rules == parse_domain_json(text).rules


def test_load_default_name_is_basename(tmp_path) -> None:
    path = tmp_path / "mylist.txt"
    path.write_text("||x.test^\n", encoding="utf-8")
    assert load_filter_list(path).name == "mylist.txt"


# ---------------------------------------------------------------------------
# url_blocked
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    ("url", "expected"),
    [
        # ||wpadmngr.com^ — dot-boundary anchor
        ("https://wpadmngr.com/active", True),
        ("https://js.wpadmngr.com/active", True),
        ("https://notwpadmngr.com/active", False),
        ("https://wpadmngr.com.evil.test/", False),
        # deep anchor does not block its parent
        ("https://stats.g.doubleclick.net/j/collect", True),
        ("https://doubleclick.net/", False),
        # substring rules
        ("https://cdn.site.example/analytics.js", True),
        ("https://site.example/assets/-tracker.gif", True),
        ("https://media.example/banner/big-ads/x.png", True),
        ("https://ads.example/pixel", True),
        # exception host: matching substring is overridden
        ("https://goodhost.test/analytics.js", False),
        ("https://goodhost.test/", False),
        # unrelated
        ("https://example.org/", False),
        # non-http schemes still resolve the host
        ("wss://collector.websift.test/sock", True),
    ],
)
def test_url_blocked_easyprivacy(easy, url: str, expected: bool) -> None:
    assert url_blocked(easy, url) is expected


def test_url_blocked_disconnect(disconnect) -> None:
    assert url_blocked(disconnect, "https://api.mixpanel.com/track") is True
    assert url_blocked(disconnect, "https://chainstat.test/") is True
    assert url_blocked(disconnect, "https://api.chainstat.test/v1") is True
    assert url_blocked(disconnect, "https://mixpanel.com.evil.test/") is False


def test_exception_wins_regardless_of_rule_order() -> None:
    flist = parse_adblock_list("||host.test^\n@@||host.test^")
    assert url_blocked(flist, "https://host.test/") is False
    flist2 = parse_adblock_list("@@||host.test^\n||host.test^")
    assert url_blocked(flist2, "https://host.test/") is False


@given(
    host=st.from_regex(r"[a-z]{1,8}(\.[a-z]{1,8}){1,3}", fullmatch=True),
    path=st.text(alphabet="abc/-.", max_size=12),
)
def test_url_blocked_never_raises(easy, host: str, path: str) -> None:
    url_blocked(easy, f"https://{host}/{path}")


# ---------------------------------------------------------------------------
# efficacy evaluation
# ---------------------------------------------------------------------------

UNIVERSE = [
    "wpadmngr.com",
    "mixpanel.com",
    "mxpnl.com",
    "amplitude.com",
    "adsco.re",
    "goodhost.test",
    "benign.example",
    "stats.g.doubleclick.net",
    "chainstat.test",
    "api.chainstat.test",
    "collector.websift.test",
    "trackzone.test",
]


def test_probe_url() -> None:
    assert probe_url("x.test") == "https://x.test/"


def test_evaluate_blocklists_fixture(easy, disconnect) -> None:
    report = evaluate_blocklists(UNIVERSE, [easy, disconnect])
    assert report.universe == tuple(sorted(UNIVERSE))
    assert report.per_list["easyprivacy"] == frozenset(
        {
            "wpadmngr.com",
            "mixpanel.com",
            "amplitude.com",
            "stats.g.doubleclick.net",
            "collector.websift.test",
            "trackzone.test",
        }
    )
    assert report.per_list["disconnect"] == frozenset(
        {
            "mixpanel.com",
            "mxpnl.com",
            "amplitude.com",
            "adsco.re",
            "chainstat.test",
            "api.chainstat.test",
        }
    )
    assert report.fraction("easyprivacy") == Fraction(1, 2)
    assert report.fraction("disconnect") == Fraction(1, 2)
    assert report.combined_fraction == Fraction(5, 6)


def test_combined_is_brute_force_union(easy, disconnect) -> None:
    report = evaluate_blocklists(UNIVERSE, [easy, disconnect])
    oracle = frozenset(
        d
        for d in report.universe
        if url_blocked(easy, probe_url(d)) or url_blocked(disconnect, probe_url(d))
    )
    assert report.combined == oracle
    assert report.combined == report.per_list["easyprivacy"] | report.per_list["disconnect"]


def test_evaluate_dedups_and_sorts_universe(easy) -> None:
    report = evaluate_blocklists(["b.test", "a.test", "b.test"], [easy])
    assert report.universe == ("a.test", "b.test")


def test_evaluate_empty_universe() -> None:
    report = evaluate_blocklists([], [FilterList("l", ())])
    assert report.combined_fraction == Fraction(0)
    assert report.fraction("l") == Fraction(0)


def test_fraction_is_exact() -> None:
    flist = parse_adblock_list("||blocked.test^")
    domains = [f"d{i}.test" for i in range(107)] + ["blocked.test"]
    report = evaluate_blocklists(domains, [flist])
    assert report.fraction(flist.name) == Fraction(1, 108)
    assert report.combined_fraction == Fraction(1, 108)
