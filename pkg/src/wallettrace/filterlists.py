"""Minimal filter-list evaluation: would a blocker have stopped the hosts
we observed making wallet probes?

Two list formats are supported:

* adblock-style text (EasyList syntax subset): ``||host^`` network rules
  become dot-boundary domain anchors, ``@@`` prefixed rules are exceptions
  (an exception match forces "not blocked"), ``$option`` suffixes are
  stripped, cosmetic rules (``##``, ``#@#``, ``#?#``) and comments are
  ignored. Anything else degrades to a substring rule (with ``*`` as "any
  sequence"), so parsing is total: no input line is an error.
* domain JSON: any string inside the document's arrays that looks like a
  domain becomes a domain anchor.

Hosts are probed as ``https://<host>/``. Efficacy is reported as an exact
fraction (blocked wallet-probing domains / all wallet-probing domains); the
combined figure is the union of the per-list blocked sets.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from urllib.parse import urlsplit

DOMAIN_ANCHOR = "domain_anchor"
PLAIN_SUBSTRING = "plain_substring"

_DOMAIN_ANCHOR_RE = re.compile(r"\|\|([A-Za-z0-9.-]+)\^?\Z")
_DOMAIN_STRING_RE = re.compile(
    r"[a-z0-9]([a-z0-9-]*[a-z0-9])?(\.[a-z0-9]([a-z0-9-]*[a-z0-9])?)+\Z"
)
_COSMETIC_MARKERS = ("##", "#@#", "#?#")


@dataclass(frozen=True)
class FilterRule:
    kind: str  # DOMAIN_ANCHOR | PLAIN_SUBSTRING
    text: str  # anchor host, or substring pattern ("*" = any sequence)
    exception: bool = False


@dataclass(frozen=True)
class FilterList:
    name: str
    rules: tuple[FilterRule, ...]


def parse_adblock_list(text: str, name: str = "adblock") -> FilterList:
    rules = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("!") or line.startswith("["):
            continue
        if any(marker in line for marker in _COSMETIC_MARKERS):
            continue
        exception = line.startswith("@@")
        if exception:
            line = line[2:]
        dollar = line.find("$")
        if dollar != -1:
            line = line[:dollar]
        if not line:
            continue
        m = _DOMAIN_ANCHOR_RE.match(line)
        if m:
            rules.append(FilterRule(DOMAIN_ANCHOR, m.group(1).lower(), exception))
            continue
        # Fallback: substring rule. Strip adblock anchors that have no
        # substring meaning; a trailing "^" matches "separator or end",
        # which the bare substring already approximates.
        body = line.lstrip("|").rstrip("|")
        if body.endswith("^"):
            body = body[:-1]
        if body.strip("*"):
            rules.append(FilterRule(PLAIN_SUBSTRING, body, exception))
    return FilterList(name=name, rules=tuple(rules))


def parse_domain_json(text: str, name: str = "domains") -> FilterList:
    doc = json.loads(text)
    found: dict[str, None] = {}

    def walk(node) -> None:
        if isinstance(node, list):
            for item in node:
                if isinstance(item, str) and _DOMAIN_STRING_RE.match(item.lower()):
                    found.setdefault(item.lower())
                else:
                    walk(item)
        elif isinstance(node, dict):
            for value in node.values():
                walk(value)

    walk(doc)
    return FilterList(name=name, rules=tuple(FilterRule(DOMAIN_ANCHOR, d) for d in found))


def load_filter_list(path, name: str | None = None) -> FilterList:
    """Auto-detects the format: JSON documents get the domain-JSON parser,
    everything else the adblock parser."""
    with open(path, encoding="utf-8", errors="replace") as f:
        text = f.read()
    if name is None:
        import os

        name = os.path.basename(str(path))
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        try:
            return parse_domain_json(text, name)
        except json.JSONDecodeError:
            pass  # "[Adblock Plus 2.0]" headers also start with "["
    return parse_adblock_list(text, name)


def _host_anchored(host: str, anchor: str) -> bool:
    return host == anchor or host.endswith("." + anchor)


def _substring_match(url: str, pattern: str) -> bool:
    pos = 0
    for part in pattern.split("*"):
        if not part:
            continue
        i = url.find(part, pos)
        if i < 0:
            return False
        pos = i + len(part)
    return True


def _rule_matches(rule: FilterRule, url: str, host: str) -> bool:
    if rule.kind == DOMAIN_ANCHOR:
        return bool(host) and _host_anchored(host, rule.text)
    return _substring_match(url, rule.text)


def url_blocked(flist: FilterList, url: str) -> bool:
    host = (urlsplit(url).hostname or "").lower()
    matched = False
    for rule in flist.rules:
        if _rule_matches(rule, url, host):
            if rule.exception:
                return False
            matched = True
    return matched


def probe_url(domain: str) -> str:
    return f"https://{domain}/"


@dataclass(frozen=True)
class BlocklistReport:
    universe: tuple[str, ...]
    per_list: dict[str, frozenset[str]]
    combined: frozenset[str]

    def fraction(self, name: str) -> Fraction:
        n = len(self.universe)
        return Fraction(len(self.per_list[name]), n) if n else Fraction(0)

    @property
    def combined_fraction(self) -> Fraction:
        n = len(self.universe)
        return Fraction(len(self.combined), n) if n else Fraction(0)


def evaluate_blocklists(domains, lists) -> BlocklistReport:
    universe = tuple(sorted(set(domains)))
    per_list: dict[str, frozenset[str]] = {}
    combined: set[str] = set()
    for flist in lists:
        blocked = frozenset(d for d in universe if url_blocked(flist, probe_url(d)))
        per_list[flist.name] = blocked
        combined |= blocked
    return BlocklistReport(universe=universe, per_list=per_list, combined=frozenset(combined))
