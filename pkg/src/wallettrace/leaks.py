"""Secret-leak detection over request and cookie channels.

The scanner hunts known secrets (wallet addresses, the wallet password,
visited hostnames) in GET query strings, POST bodies, outgoing WebSocket
payloads, and cookie names/values — plain or hidden under up to three
layers of encodings/digests.

Search runs in three stages per payload:

1. plain substring scan — case-insensitive for wallet addresses (they
   appear both checksummed and lowercased on the wire), case-sensitive for
   other kinds, with non-hostname-character boundaries for hostnames;
2. exact token lookup in a precomputed index of every transform chain
   (depth ≤ 3, at most one digest) over every canonical secret variant;
3. per token, each reversible decoding is attempted (both base64 flavors,
   percent, lzstring) and the decoded bytes are rescanned with one less
   depth, prepending the decoding to any recovered chain.

Results are deduplicated by (secret_id, offset). Two suppression rules keep
attribution sane: a plain hit strictly contained in a longer hit of the same
secret is dropped (the 0x-stripped alias inside the full address), and a
decoded-layer (stage-3) hit is dropped when the same secret was already
found inside that token's span — re-discovering, through the decoding, an
occurrence that is already visible in the raw bytes adds nothing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from urllib.parse import urlsplit

from .origins import PublicSuffixTable, registrable_domain, registrable_domain_of_host
from .trace import TraceBundle
from .transforms import (
    DECODERS,
    TransformSet,
    apply_chain,
    canonical_variants,
)

SECRET_KINDS = ("wallet_address", "password", "hostname")

#: Payload bytes that end a token. Deliberately not split on: "%" (keeps
#: percent-encoded blobs intact for decode attempts), "+", "-", "_", ".",
#: "~", "@" (all appear inside encoded or hostname material).
SEPARATORS = b"&=;,:\"'{}[]() \t\n\r/?#"

#: The same set minus "/": base64/lzstring output may legally contain "/",
#: so the scanner also considers these coarser runs (see scan_payload).
_COARSE_SEPARATORS = SEPARATORS.replace(b"/", b"")

_FINE_RE = re.compile(b"[^" + re.escape(SEPARATORS) + b"]+")
_HOSTNAME_CHARS = frozenset(b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789.-")

REDACTION_MARKER = "«SECRET»"
_EVIDENCE_LIMIT = 120
_MAX_DECODE_TOKEN = 8192
_MIN_DECODED = 4

_ADDRESS_RE = re.compile(r"0x[0-9a-fA-F]{40}\Z")


class SecretProfileError(ValueError):
    pass


@dataclass(frozen=True)
class Secret:
    secret_id: str
    kind: str
    value: str


@dataclass(frozen=True)
class SecretProfile:
    profile_id: str
    secrets: tuple[Secret, ...]

    def __post_init__(self) -> None:
        if not self.profile_id:
            raise SecretProfileError("profile_id must be non-empty")
        seen = set()
        for s in self.secrets:
            if s.kind not in SECRET_KINDS:
                raise SecretProfileError(f"secret {s.secret_id!r}: unknown kind {s.kind!r}")
            if s.secret_id in seen:
                raise SecretProfileError(f"duplicate secret id {s.secret_id!r}")
            seen.add(s.secret_id)
            if s.kind == "wallet_address" and not _ADDRESS_RE.match(s.value):
                raise SecretProfileError(f"secret {s.secret_id!r}: wallet_address must be 0x + 40 hex chars")
            if len(s.value) < 4:
                raise SecretProfileError(f"secret {s.secret_id!r}: value shorter than 4 characters")
            if not s.value.isascii() or not s.value.isprintable():
                # Keeps the transform index and the scanner's decode gates
                # sound; real addresses/passwords/hostnames are ASCII.
                raise SecretProfileError(f"secret {s.secret_id!r}: value must be printable ASCII")


def load_secret_profile(path) -> SecretProfile:
    """Secrets file: {"profile_id": ..., "secrets": [{"id","kind","value"}]}."""
    import json

    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    try:
        secrets = tuple(Secret(s["id"], s["kind"], s["value"]) for s in doc["secrets"])
        return SecretProfile(profile_id=doc["profile_id"], secrets=secrets)
    except (KeyError, TypeError) as e:
        raise SecretProfileError(f"malformed secrets file: {e}") from None


@dataclass(frozen=True)
class IndexEntry:
    secret_id: str
    chain: tuple[str, ...]
    variant: str


@dataclass(frozen=True)
class _Needle:
    secret_id: str
    data: bytes
    case_insensitive: bool
    boundary: bool


class TermIndex:
    """Candidate string → (secret, chain, variant) for every chain of
    length 0..max_depth (one digest max) over every canonical variant.

    Chains are enumerated shortest-first and the first chain producing a
    candidate wins, so aliasing collisions (e.g. percent-encoding being the
    identity on unreserved text) resolve to the shortest chain
    deterministically.
    """

    def __init__(self, profile: SecretProfile, transforms: TransformSet):
        self.profile = profile
        self.transforms = transforms
        self.entries: dict[str, IndexEntry] = {}
        self._secret_order = {s.secret_id: i for i, s in enumerate(profile.secrets)}

        for secret in profile.secrets:
            for variant_name, text in canonical_variants(secret.value, transforms.variants):
                for chain in transforms.iter_chains():
                    candidate = apply_chain(chain, text)
                    if candidate not in self.entries:
                        self.entries[candidate] = IndexEntry(secret.secret_id, chain, variant_name)

        self._bentries = {c.encode("utf-8"): e for c, e in self.entries.items()}

        # Stage-1 needles. Address variants collapse to their lowercase
        # forms (the haystack is lowercased for them).
        self._needles: list[_Needle] = []
        redaction_texts: set[str] = set()
        for secret in profile.secrets:
            seen: set[bytes] = set()
            for _, text in canonical_variants(secret.value, transforms.variants):
                redaction_texts.add(text)
                ci = secret.kind == "wallet_address"
                data = text.lower().encode("utf-8") if ci else text.encode("utf-8")
                if data in seen:
                    continue
                seen.add(data)
                self._needles.append(_Needle(secret.secret_id, data, ci, secret.kind == "hostname"))
        self._has_ci = any(n.case_insensitive for n in self._needles)

        non_identity = [len(c) for c, e in self._bentries.items() if e.chain]
        self._min_token_len = min(non_identity) if non_identity else None
        if self._min_token_len is not None:
            self._coarse_re = re.compile(
                b"[^" + re.escape(_COARSE_SEPARATORS) + b"]{%d,}" % self._min_token_len
            )
        else:
            self._coarse_re = None

        self._redactor = re.compile(
            "|".join(re.escape(t) for t in sorted(redaction_texts, key=lambda t: (-len(t), t))),
            re.IGNORECASE,
        )

    def redact(self, text: str) -> str:
        out = self._redactor.sub(REDACTION_MARKER, text)
        low = out.lower()
        if any(t.lower() in low for t in (s.value for s in self.profile.secrets)):
            return REDACTION_MARKER  # belt and braces: never leak
        return out


def build_term_index(profile: SecretProfile, transforms: TransformSet | None = None) -> TermIndex:
    return TermIndex(profile, transforms or TransformSet())


def tokenize(payload: bytes) -> list[tuple[bytes, int]]:
    """Maximal runs of non-separator bytes with their offsets."""
    return [(m.group(), m.start()) for m in _FINE_RE.finditer(payload)]


@dataclass(frozen=True)
class PayloadHit:
    secret_id: str
    chain: tuple[str, ...]
    offset: int
    length: int


def _boundary_ok(payload: bytes, start: int, end: int) -> bool:
    if start > 0 and payload[start - 1] in _HOSTNAME_CHARS:
        return False
    if end < len(payload) and payload[end] in _HOSTNAME_CHARS:
        return False
    return True


def scan_payload(
    payload: bytes,
    index: TermIndex,
    transforms: TransformSet | None = None,
    depth_budget: int | None = None,
) -> list[PayloadHit]:
    """All recovered secret occurrences in one payload, sorted by offset
    (ties: secret order in the profile). See the module docstring for the
    staging and suppression rules."""
    transforms = transforms or index.transforms
    if depth_budget is None:
        depth_budget = transforms.max_depth

    kept: dict[tuple[str, int], PayloadHit] = {}
    spans: dict[str, list[tuple[int, int]]] = {}

    def keep(sid: str, chain: tuple[str, ...], start: int, length: int) -> None:
        if (sid, start) not in kept:
            kept[(sid, start)] = PayloadHit(sid, chain, start, length)
            spans.setdefault(sid, []).append((start, start + length))

    # Stage 1: plain scans.
    low = payload.lower() if index._has_ci else b""
    by_secret: dict[str, list[tuple[int, int]]] = {}
    for needle in index._needles:
        hay = low if needle.case_insensitive else payload
        start = 0
        while True:
            i = hay.find(needle.data, start)
            if i < 0:
                break
            start = i + 1
            end = i + len(needle.data)
            if needle.boundary and not _boundary_ok(payload, i, end):
                continue
            by_secret.setdefault(needle.secret_id, []).append((i, end))
    for sid, hits in by_secret.items():
        hits.sort(key=lambda t: (t[0], -t[1]))
        max_end = -1
        for s, e in hits:
            if e <= max_end:
                continue  # contained in an already-kept longer hit
            max_end = e
            keep(sid, (), s, e - s)

    # Stages 2+3 over tokens.
    if index._coarse_re is not None:
        min_len = index._min_token_len
        lookup = index._bentries
        for m in index._coarse_re.finditer(payload):
            ctok = m.group()
            cstart = m.start()
            if b"/" in ctok:
                candidates = [(cstart, ctok)]
                pos = cstart
                for part in ctok.split(b"/"):
                    if len(part) >= min_len:
                        candidates.append((pos, part))
                    pos += len(part) + 1
            else:
                candidates = [(cstart, ctok)]
            for tstart, tok in candidates:
                tend = tstart + len(tok)
                # Stage 2: exact candidate lookup.
                entry = lookup.get(tok)
                if entry is not None and len(entry.chain) <= depth_budget:
                    keep(entry.secret_id, entry.chain, tstart, len(tok))
                # Stage 3: decode attempts + recursion.
                if depth_budget < 1 or len(tok) > _MAX_DECODE_TOKEN:
                    continue
                for name, fn in DECODERS:
                    out = fn(tok)
                    if out is None or len(out) < _MIN_DECODED:
                        continue
                    for sub in scan_payload(out, index, transforms, depth_budget - 1):
                        prior = spans.get(sub.secret_id)
                        if prior is not None and any(tstart <= s < tend for s, _ in prior):
                            # The same secret is already visible inside this
                            # token's raw bytes; the decoded re-discovery is
                            # redundant.
                            continue
                        keep(sub.secret_id, (name,) + sub.chain, tstart, len(tok))

    order = index._secret_order
    return sorted(kept.values(), key=lambda h: (h.offset, order.get(h.secret_id, 1 << 30)))


@dataclass(frozen=True)
class LeakFinding:
    visit_id: str
    secret_id: str
    channel: str  # get_param | post_body | ws_payload | cookie_name | cookie_value
    receiver: str  # registrable domain of the request URL / cookie domain
    chain: tuple[str, ...]
    evidence: str
    record_index: int
    offset: int = 0

    def to_dict(self) -> dict:
        return {
            "visit_id": self.visit_id,
            "secret_id": self.secret_id,
            "channel": self.channel,
            "receiver": self.receiver,
            "chain": list(self.chain),
            "evidence": self.evidence,
            "record_index": self.record_index,
            "offset": self.offset,
        }


def make_evidence(payload: bytes, offset: int, length: int, index: TermIndex) -> str:
    """≤120-char excerpt around the match with the secret region replaced
    by the redaction marker; any other secret material in the window is
    scrubbed too."""
    window = 40
    pre = payload[max(0, offset - window) : offset].decode("utf-8", "replace")
    post = payload[offset + length : offset + length + window].decode("utf-8", "replace")
    budget = _EVIDENCE_LIMIT - len(REDACTION_MARKER)
    pre = pre[-(budget // 2) :]
    post = post[: budget - len(pre)]
    return index.redact(pre + REDACTION_MARKER + post)


def scan_bundle(
    bundle: TraceBundle,
    index: TermIndex,
    transforms: TransformSet | None = None,
    psl: PublicSuffixTable | None = None,
) -> list[LeakFinding]:
    """Scan every leak channel of a bundle.

    GET requests are scanned over the URL query component only; POST over
    the post body; ws_out over the payload; cookies over name and value
    separately. Receiver = registrable domain of the request URL (cookies:
    of the cookie domain, leading dot stripped). Findings are ordered
    request records first then cookie records, by record index within each
    list, cookie_name before cookie_value, then by offset.
    """
    if psl is None:
        raise ValueError("scan_bundle needs a public suffix table for receiver attribution")
    transforms = transforms or index.transforms
    findings: list[LeakFinding] = []

    for i, req in enumerate(bundle.requests):
        if req.kind == "http_get":
            query = urlsplit(req.url).query
            if not query:
                continue
            payload, channel = query.encode("utf-8"), "get_param"
        elif req.kind == "http_post":
            payload, channel = req.post_body or b"", "post_body"
        else:
            payload, channel = req.ws_payload or b"", "ws_payload"
        if not payload:
            continue
        receiver = registrable_domain(req.url, psl)
        for hit in scan_payload(payload, index, transforms):
            findings.append(
                LeakFinding(
                    visit_id=bundle.visit_id,
                    secret_id=hit.secret_id,
                    channel=channel,
                    receiver=receiver,
                    chain=hit.chain,
                    evidence=make_evidence(payload, hit.offset, hit.length, index),
                    record_index=i,
                    offset=hit.offset,
                )
            )

    for j, cookie in enumerate(bundle.cookies):
        receiver = registrable_domain_of_host(cookie.domain.lstrip("."), psl)
        for channel, text in (("cookie_name", cookie.name), ("cookie_value", cookie.value)):
            payload = text.encode("utf-8")
            if not payload:
                continue
            for hit in scan_payload(payload, index, transforms):
                findings.append(
                    LeakFinding(
                        visit_id=bundle.visit_id,
                        secret_id=hit.secret_id,
                        channel=channel,
                        receiver=receiver,
                        chain=hit.chain,
                        evidence=make_evidence(payload, hit.offset, hit.length, index),
                        record_index=j,
                        offset=hit.offset,
                    )
                )
    return findings
