"""Registrable-domain (eTLD+1) computation, first/third-party verdicts, and
the bare-domain → URL resolution heuristic used for corpus preparation.

Suffix data is always loaded from a file in the standard public-suffix list
text format (``//`` comments, one rule per line, ``*.`` wildcards, ``!``
exceptions), never embedded, so tests can pin a small fixture table.
"""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass, field
from typing import Callable, Iterable
from urllib.parse import urlsplit


class OriginError(ValueError):
    pass


@dataclass(frozen=True)
class PublicSuffixTable:
    exact: frozenset[str]
    wildcard: frozenset[str]  # rule "*.foo" stored as "foo"
    exception: frozenset[str]  # rule "!bar.foo" stored as "bar.foo"
    version: str = ""

    def __post_init__(self) -> None:
        if not (self.exact or self.wildcard or self.exception):
            raise OriginError("public suffix table is empty")


def parse_public_suffix_list(text: str, version: str = "") -> PublicSuffixTable:
    exact: set[str] = set()
    wildcard: set[str] = set()
    exception: set[str] = set()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("//"):
            continue
        # Rules apply to the whole line up to the first whitespace.
        rule = line.split()[0].lower()
        if rule.startswith("!"):
            exception.add(rule[1:])
        elif rule.startswith("*."):
            wildcard.add(rule[2:])
        else:
            exact.add(rule)
    return PublicSuffixTable(frozenset(exact), frozenset(wildcard), frozenset(exception), version)


def load_public_suffix_list(path) -> PublicSuffixTable:
    with open(path, encoding="utf-8") as f:
        return parse_public_suffix_list(f.read(), version=str(path))


def _is_ip_literal(host: str) -> bool:
    try:
        ipaddress.ip_address(host)
        return True
    except ValueError:
        return False


def registrable_domain_of_host(host: str, psl: PublicSuffixTable) -> str:
    """eTLD+1 of a bare hostname (IP literals pass through verbatim)."""
    if not host:
        raise OriginError("empty hostname")
    host = host.lower().rstrip(".")
    if _is_ip_literal(host):
        return host
    labels = host.split(".")
    n = len(labels)

    suffix_len = 0
    for i in range(n):
        if ".".join(labels[i:]) in psl.exception:
            # An exception rule makes the rule itself registrable: the
            # public suffix is the rule minus its leftmost label.
            suffix_len = n - i - 1
            break
    else:
        suffix_len = 1  # the implicit default rule "*"
        for i in range(n):
            size = n - i
            if size > suffix_len and ".".join(labels[i:]) in psl.exact:
                suffix_len = size
            if size > suffix_len and size >= 2 and ".".join(labels[i + 1 :]) in psl.wildcard:
                suffix_len = size

    if suffix_len >= n:
        # The host itself is a public suffix; no registrable label remains.
        return host
    return ".".join(labels[n - suffix_len - 1 :])


def registrable_domain(url: str, psl: PublicSuffixTable) -> str:
    """eTLD+1 of a URL's hostname per public-suffix semantics.

    Longest matching rule wins; exception rules beat wildcard/exact rules;
    hosts matching no rule fall back to the implicit "*" rule (last two
    labels). IP-address hosts are returned verbatim.
    """
    try:
        host = urlsplit(url).hostname
    except ValueError as e:
        raise OriginError(f"unparseable URL {url!r}: {e}") from None
    if not host:
        raise OriginError(f"URL has no hostname: {url!r}")
    return registrable_domain_of_host(host, psl)


@dataclass(frozen=True)
class PartyVerdict:
    resource_domain: str
    site_domain: str
    is_third_party: bool = field(init=False, default=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "is_third_party", self.resource_domain != self.site_domain)


def is_third_party(resource_url: str, site_url: str, psl: PublicSuffixTable) -> PartyVerdict:
    return PartyVerdict(registrable_domain(resource_url, psl), registrable_domain(site_url, psl))


#: Probe prefixes in fixed priority order.
RESOLUTION_PREFIXES = ("https://www.", "https://", "http://www.", "http://")


def resolve_candidate_url(
    domain: str,
    crux_index: Iterable[str],
    prober: Callable[[str], bool],
) -> str | None:
    """Resolve a bare domain to a crawlable URL.

    A URL already known for the domain (hostname equal to the domain, or to
    "www." + domain) wins without probing — exact-host matches preferred,
    ties broken lexicographically. Otherwise the four prefixes are probed in
    priority order (at most 4 probes); prober exceptions count as
    unreachable. Returns None when nothing resolves (the domain is skipped).
    """
    matches: list[tuple[int, str]] = []
    for u in crux_index:
        try:
            host = urlsplit(u).hostname
        except ValueError:
            continue
        if host == domain:
            matches.append((0, u))
        elif host == "www." + domain:
            matches.append((1, u))
    if matches:
        return min(matches)[1]
    for prefix in RESOLUTION_PREFIXES:
        candidate = prefix + domain
        try:
            ok = bool(prober(candidate))
        except Exception:
            ok = False
        if ok:
            return candidate
    return None
