"""Trace-bundle data model and its JSONL wire format (v1).

One visit = one bundle = one JSONL file: the first line is a header record
carrying bundle-level fields; each following line is one api_call, request,
cookie, or script record. Binary payloads are carried base64-encoded with an
explicit ``"encoding": "base64"`` sibling field; payloads that are valid
UTF-8 may be stored raw with ``"encoding": "utf8"``. Unknown fields are
preserved on round trip but otherwise ignored. Timestamps are milliseconds
relative to capture start, so fixtures are reproducible.
"""

from __future__ import annotations

import base64
import hashlib
import json
from dataclasses import dataclass, field
from typing import Any
from urllib.parse import urlsplit

TARGET_KINDS = ("website", "dapp", "extension")
REQUEST_KINDS = ("http_get", "http_post", "ws_out")
ACCESS_MODES = ("direct", "enumeration")
COOKIE_SOURCES = ("header", "script")

#: script_url / initiator_url values that are not URLs but are still valid.
URL_MARKERS = ("inline", "unknown")


class TraceError(Exception):
    pass


class TraceParseError(TraceError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class TraceValidationError(TraceError):
    def __init__(self, field_name: str, message: str, record_index: int | None = None):
        where = f"record {record_index}, " if record_index is not None else ""
        super().__init__(f"{where}field '{field_name}': {message}")
        self.field_name = field_name
        self.record_index = record_index


@dataclass
class TargetDescriptor:
    kind: str
    url: str
    rank: int | None = None
    category: str | None = None
    extra: dict = field(default_factory=dict)


@dataclass
class CaptureMeta:
    capture_started_at: str
    max_duration_s: int
    pages_visited: list[str] = field(default_factory=list)
    wallet_profile_id: str = ""
    extra: dict = field(default_factory=dict)


@dataclass
class ApiCallRecord:
    script_url: str
    symbol: str
    access_mode: str
    stack: list[str] = field(default_factory=list)
    timestamp: float = 0
    extra: dict = field(default_factory=dict)


@dataclass
class NetworkRecord:
    kind: str
    url: str
    post_body: bytes | None = None
    ws_payload: bytes | None = None
    response_set_cookies: list[str] = field(default_factory=list)
    timestamp: float = 0
    initiator_url: str = "unknown"
    extra: dict = field(default_factory=dict)


@dataclass
class CookieRecord:
    name: str
    value: str
    domain: str
    source: str = "header"
    timestamp: float = 0
    extra: dict = field(default_factory=dict)


@dataclass
class ScriptRecord:
    script_url: str
    body_hash: str
    body: bytes | None = None
    extra: dict = field(default_factory=dict)


@dataclass
class TraceBundle:
    visit_id: str
    target: TargetDescriptor
    capture_meta: CaptureMeta
    api_calls: list[ApiCallRecord] = field(default_factory=list)
    requests: list[NetworkRecord] = field(default_factory=list)
    cookies: list[CookieRecord] = field(default_factory=list)
    scripts: list[ScriptRecord] = field(default_factory=list)
    extra: dict = field(default_factory=dict)


def compute_body_hash(body: bytes) -> str:
    """Content hash used for exact-code script clustering (sha256 hex)."""
    return hashlib.sha256(body).hexdigest()


def is_absolute_url(u: str) -> bool:
    try:
        parts = urlsplit(u)
    except ValueError:
        return False
    return bool(parts.scheme) and bool(parts.netloc)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _check_timestamp(ts: Any, prev: float, field_name: str, idx: int) -> float:
    if not isinstance(ts, (int, float)) or isinstance(ts, bool):
        raise TraceValidationError(field_name, "timestamp must be a number", idx)
    if ts < 0:
        raise TraceValidationError(field_name, "timestamp precedes capture start", idx)
    if ts < prev:
        raise TraceValidationError(field_name, "timestamps must be non-decreasing", idx)
    return float(ts)


def _check_url_or_marker(u: Any, field_name: str, idx: int | None) -> None:
    if not isinstance(u, str) or not u:
        raise TraceValidationError(field_name, "must be a non-empty string", idx)
    if u in URL_MARKERS:
        return
    if not is_absolute_url(u):
        raise TraceValidationError(field_name, f"not an absolute URL or {'/'.join(URL_MARKERS)}: {u!r}", idx)


def validate_bundle(bundle: TraceBundle) -> None:
    """Raise TraceValidationError on the first invariant violation."""
    if not bundle.visit_id or not isinstance(bundle.visit_id, str):
        raise TraceValidationError("visit_id", "must be a non-empty string")

    t = bundle.target
    if t.kind not in TARGET_KINDS:
        raise TraceValidationError("target.kind", f"must be one of {TARGET_KINDS}")
    if not t.url or not isinstance(t.url, str):
        raise TraceValidationError("target.url", "must be a non-empty string")
    if t.kind == "extension":
        if "://" in t.url:
            raise TraceValidationError("target.url", "extension targets take an extension id, not a URL")
    elif not is_absolute_url(t.url):
        raise TraceValidationError("target.url", f"not an absolute URL: {t.url!r}")
    if t.rank is not None and (not isinstance(t.rank, int) or isinstance(t.rank, bool) or t.rank < 1):
        raise TraceValidationError("target.rank", "must be a positive integer when present")

    m = bundle.capture_meta
    if not isinstance(m.max_duration_s, int) or isinstance(m.max_duration_s, bool) or m.max_duration_s <= 0:
        raise TraceValidationError("capture_meta.max_duration_s", "must be a positive integer")
    if not isinstance(m.capture_started_at, str) or not m.capture_started_at:
        raise TraceValidationError("capture_meta.capture_started_at", "must be a non-empty string")
    if not isinstance(m.pages_visited, list) or any(not isinstance(p, str) for p in m.pages_visited):
        raise TraceValidationError("capture_meta.pages_visited", "must be a list of strings")

    prev = 0.0
    for i, rec in enumerate(bundle.api_calls):
        _check_url_or_marker(rec.script_url, "script_url", i)
        if not isinstance(rec.symbol, str) or not rec.symbol.startswith("window."):
            raise TraceValidationError("symbol", "must begin with 'window.'", i)
        if rec.access_mode not in ACCESS_MODES:
            raise TraceValidationError("access_mode", f"must be one of {ACCESS_MODES}", i)
        if not isinstance(rec.stack, list) or any(not isinstance(f, str) for f in rec.stack):
            raise TraceValidationError("stack", "must be a list of strings", i)
        prev = _check_timestamp(rec.timestamp, prev, "timestamp", i)

    prev = 0.0
    for i, req in enumerate(bundle.requests):
        if req.kind not in REQUEST_KINDS:
            raise TraceValidationError("kind", f"must be one of {REQUEST_KINDS}", i)
        if not isinstance(req.url, str) or not is_absolute_url(req.url):
            raise TraceValidationError("url", f"not an absolute URL: {req.url!r}", i)
        if req.kind == "http_post" and req.post_body is None:
            raise TraceValidationError("post_body", "post_body required for http_post", i)
        if req.kind == "ws_out" and req.ws_payload is None:
            raise TraceValidationError("ws_payload", "ws_payload required for ws_out", i)
        if req.kind == "http_get" and (req.post_body is not None or req.ws_payload is not None):
            raise TraceValidationError("kind", "http_get carries no body payload", i)
        if req.kind == "http_post" and req.ws_payload is not None:
            raise TraceValidationError("ws_payload", "ws_payload only valid for ws_out", i)
        if req.kind == "ws_out" and req.post_body is not None:
            raise TraceValidationError("post_body", "post_body only valid for http_post", i)
        _check_url_or_marker(req.initiator_url, "initiator_url", i)
        if not isinstance(req.response_set_cookies, list) or any(
            not isinstance(h, str) for h in req.response_set_cookies
        ):
            raise TraceValidationError("response_set_cookies", "must be a list of strings", i)
        prev = _check_timestamp(req.timestamp, prev, "timestamp", i)

    prev = 0.0
    for i, c in enumerate(bundle.cookies):
        if not isinstance(c.name, str):
            raise TraceValidationError("name", "must be a string", i)
        if not isinstance(c.value, str):
            raise TraceValidationError("value", "must be a string", i)
        if not isinstance(c.domain, str) or not c.domain:
            raise TraceValidationError("domain", "must be a non-empty string", i)
        if c.source not in COOKIE_SOURCES:
            raise TraceValidationError("source", f"must be one of {COOKIE_SOURCES}", i)
        prev = _check_timestamp(c.timestamp, prev, "timestamp", i)

    for i, s in enumerate(bundle.scripts):
        if not isinstance(s.script_url, str) or not s.script_url:
            raise TraceValidationError("script_url", "must be a non-empty string", i)
        if (
            not isinstance(s.body_hash, str)
            or not s.body_hash
            or s.body_hash != s.body_hash.lower()
            or any(ch not in "0123456789abcdef" for ch in s.body_hash)
        ):
            raise TraceValidationError("body_hash", "must be lowercase hex", i)
        if s.body is not None and compute_body_hash(s.body) != s.body_hash:
            raise TraceValidationError("body_hash", "does not match script body", i)


# ---------------------------------------------------------------------------
# JSONL parsing
# ---------------------------------------------------------------------------

def _take(obj: dict, key: str, line_no: int, required: bool = True, default: Any = None) -> Any:
    if key in obj:
        return obj.pop(key)
    if required:
        raise TraceParseError(line_no, f"missing field '{key}'")
    return default


def _decode_payload(obj: dict, key: str, line_no: int) -> bytes | None:
    if key not in obj:
        return None
    raw = obj.pop(key)
    if raw is None:
        return None
    if not isinstance(raw, str):
        raise TraceParseError(line_no, f"field '{key}' must be a string")
    encoding = obj.get("encoding", "utf8")
    if encoding == "base64":
        try:
            return base64.b64decode(raw, validate=True)
        except Exception:
            raise TraceParseError(line_no, f"field '{key}': invalid base64 payload") from None
    if encoding == "utf8":
        return raw.encode("utf-8")
    raise TraceParseError(line_no, f"unknown payload encoding {encoding!r}")


def parse_trace_bundle(raw: bytes | str) -> TraceBundle:
    """Parse and validate one serialized bundle.

    Raises TraceParseError (with a line number) for malformed JSON or
    structure, TraceValidationError (naming field and record index) for
    invariant violations. A returned bundle always satisfies
    :func:`validate_bundle`.
    """
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    bundle: TraceBundle | None = None
    for line_no, line in enumerate(raw.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise TraceParseError(line_no, f"malformed JSON: {e.msg}") from None
        if not isinstance(obj, dict):
            raise TraceParseError(line_no, "record must be a JSON object")
        rtype = obj.pop("type", None)
        if bundle is None:
            if rtype != "header":
                raise TraceParseError(line_no, "first record must have type 'header'")
            tgt = _take(obj, "target", line_no)
            meta = _take(obj, "capture_meta", line_no)
            if not isinstance(tgt, dict) or not isinstance(meta, dict):
                raise TraceParseError(line_no, "target and capture_meta must be objects")
            target = TargetDescriptor(
                kind=tgt.pop("kind", None),
                url=tgt.pop("url", None),
                rank=tgt.pop("rank", None),
                category=tgt.pop("category", None),
                extra=tgt,
            )
            capture_meta = CaptureMeta(
                capture_started_at=meta.pop("capture_started_at", ""),
                max_duration_s=meta.pop("max_duration_s", 0),
                pages_visited=meta.pop("pages_visited", []),
                wallet_profile_id=meta.pop("wallet_profile_id", ""),
                extra=meta,
            )
            bundle = TraceBundle(
                visit_id=_take(obj, "visit_id", line_no),
                target=target,
                capture_meta=capture_meta,
                extra=obj,
            )
            continue
        if rtype == "header":
            raise TraceParseError(line_no, "duplicate header record")
        if rtype == "api_call":
            bundle.api_calls.append(
                ApiCallRecord(
                    script_url=_take(obj, "script_url", line_no),
                    symbol=_take(obj, "symbol", line_no),
                    access_mode=_take(obj, "access_mode", line_no),
                    stack=_take(obj, "stack", line_no, required=False, default=[]),
                    timestamp=_take(obj, "timestamp", line_no, required=False, default=0),
                    extra=obj,
                )
            )
        elif rtype == "request":
            post_body = _decode_payload(obj, "post_body", line_no)
            ws_payload = _decode_payload(obj, "ws_payload", line_no)
            obj.pop("encoding", None)
            bundle.requests.append(
                NetworkRecord(
                    kind=_take(obj, "kind", line_no),
                    url=_take(obj, "url", line_no),
                    post_body=post_body,
                    ws_payload=ws_payload,
                    response_set_cookies=_take(obj, "response_set_cookies", line_no, required=False, default=[]),
                    timestamp=_take(obj, "timestamp", line_no, required=False, default=0),
                    initiator_url=_take(obj, "initiator_url", line_no, required=False, default="unknown"),
                    extra=obj,
                )
            )
        elif rtype == "cookie":
            bundle.cookies.append(
                CookieRecord(
                    name=_take(obj, "name", line_no),
                    value=_take(obj, "value", line_no),
                    domain=_take(obj, "domain", line_no),
                    source=_take(obj, "source", line_no, required=False, default="header"),
                    timestamp=_take(obj, "timestamp", line_no, required=False, default=0),
                    extra=obj,
                )
            )
        elif rtype == "script":
            body = _decode_payload(obj, "body", line_no)
            obj.pop("encoding", None)
            bundle.scripts.append(
                ScriptRecord(
                    script_url=_take(obj, "script_url", line_no),
                    body_hash=_take(obj, "body_hash", line_no),
                    body=body,
                    extra=obj,
                )
            )
        else:
            raise TraceParseError(line_no, f"unknown record type {rtype!r}")
    if bundle is None:
        raise TraceParseError(1, "empty input: no header record")
    validate_bundle(bundle)
    return bundle


def load_trace_bundle(path) -> TraceBundle:
    with open(path, "rb") as f:
        return parse_trace_bundle(f.read())


# ---------------------------------------------------------------------------
# JSONL writing
# ---------------------------------------------------------------------------

def _dump(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def _with_extra(obj: dict, extra: dict) -> dict:
    for k in sorted(extra):
        if k not in obj:
            obj[k] = extra[k]
    return obj


def _encode_payload(obj: dict, key: str, data: bytes | None) -> None:
    if data is None:
        return
    try:
        text = data.decode("utf-8")
        obj[key] = text
        obj["encoding"] = "utf8"
    except UnicodeDecodeError:
        obj[key] = base64.b64encode(data).decode("ascii")
        obj["encoding"] = "base64"


def write_trace_bundle(bundle: TraceBundle) -> bytes:
    """Serialize to JSONL. parse(write(b)) is structurally equal to b."""
    lines: list[str] = []
    tgt: dict[str, Any] = {"kind": bundle.target.kind, "url": bundle.target.url}
    if bundle.target.rank is not None:
        tgt["rank"] = bundle.target.rank
    if bundle.target.category is not None:
        tgt["category"] = bundle.target.category
    _with_extra(tgt, bundle.target.extra)
    meta: dict[str, Any] = {
        "capture_started_at": bundle.capture_meta.capture_started_at,
        "max_duration_s": bundle.capture_meta.max_duration_s,
        "pages_visited": bundle.capture_meta.pages_visited,
        "wallet_profile_id": bundle.capture_meta.wallet_profile_id,
    }
    _with_extra(meta, bundle.capture_meta.extra)
    header = {"type": "header", "visit_id": bundle.visit_id, "target": tgt, "capture_meta": meta}
    _with_extra(header, bundle.extra)
    lines.append(_dump(header))

    for rec in bundle.api_calls:
        obj = {
            "type": "api_call",
            "script_url": rec.script_url,
            "symbol": rec.symbol,
            "access_mode": rec.access_mode,
            "stack": rec.stack,
            "timestamp": rec.timestamp,
        }
        _with_extra(obj, rec.extra)
        lines.append(_dump(obj))
    for req in bundle.requests:
        obj = {"type": "request", "kind": req.kind, "url": req.url}
        _encode_payload(obj, "post_body", req.post_body)
        _encode_payload(obj, "ws_payload", req.ws_payload)
        obj["response_set_cookies"] = req.response_set_cookies
        obj["timestamp"] = req.timestamp
        obj["initiator_url"] = req.initiator_url
        _with_extra(obj, req.extra)
        lines.append(_dump(obj))
    for c in bundle.cookies:
        obj = {
            "type": "cookie",
            "name": c.name,
            "value": c.value,
            "domain": c.domain,
            "source": c.source,
            "timestamp": c.timestamp,
        }
        _with_extra(obj, c.extra)
        lines.append(_dump(obj))
    for s in bundle.scripts:
        obj = {"type": "script", "script_url": s.script_url, "body_hash": s.body_hash}
        _encode_payload(obj, "body", s.body)
        _with_extra(obj, s.extra)
        lines.append(_dump(obj))
    return ("\n".join(lines) + "\n").encode("utf-8")
