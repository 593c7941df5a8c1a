/**
 * Trace JSONL writer (format v1).
 *
 * One visit = one bundle = one JSONL file: a header line followed by one
 * line per api_call / request / cookie / script record. Payloads that are
 * not valid UTF-8 are carried base64-encoded with an `encoding` sibling
 * field. The writer re-checks the format invariants before serializing so a
 * harness bug fails the visit instead of emitting a file the analyzer would
 * reject.
 */

import { createHash } from "node:crypto";

import {
  HarnessError,
  type ApiCallRecord,
  type CookieRecord,
  type NetworkRecord,
  type ScriptRecord,
  type TraceBundle,
} from "./types.js";

const REQUEST_KINDS = new Set(["http_get", "http_post", "ws_out"]);
const TARGET_KINDS = new Set(["website", "dapp", "extension"]);
const ACCESS_MODES = new Set(["direct", "enumeration"]);
const COOKIE_SOURCES = new Set(["header", "script"]);
const URL_MARKERS = new Set(["inline", "unknown"]);

export function computeBodyHash(body: string | Buffer): string {
  return createHash("sha256").update(body).digest("hex");
}

export function isAbsoluteUrl(u: string): boolean {
  let parsed: URL;
  try {
    parsed = new URL(u);
  } catch {
    return false;
  }
  // Require a host, so file:///... and data: URIs do not count.
  return parsed.protocol !== "" && parsed.host !== "";
}

function checkUrlOrMarker(u: string, field: string): void {
  if (!u) throw new HarnessError(`${field} must be a non-empty string`);
  if (URL_MARKERS.has(u)) return;
  if (!isAbsoluteUrl(u)) {
    throw new HarnessError(`${field} is not an absolute URL or inline/unknown: ${u}`);
  }
}

function checkTimestamps(records: Array<{ timestamp: number }>, section: string): void {
  let prev = 0;
  for (const [i, rec] of records.entries()) {
    if (!Number.isFinite(rec.timestamp) || rec.timestamp < 0) {
      throw new HarnessError(`${section}[${i}]: timestamp must be a non-negative number`);
    }
    if (rec.timestamp < prev) {
      throw new HarnessError(`${section}[${i}]: timestamps must be non-decreasing`);
    }
    prev = rec.timestamp;
  }
}

/** Mirror of the analyzer-side bundle validation; throws HarnessError. */
export function checkBundle(bundle: TraceBundle): void {
  if (!bundle.visit_id) throw new HarnessError("visit_id must be non-empty");
  const t = bundle.target;
  if (!TARGET_KINDS.has(t.kind)) throw new HarnessError(`bad target.kind ${t.kind}`);
  if (!t.url) throw new HarnessError("target.url must be non-empty");
  if (t.kind === "extension") {
    if (t.url.includes("://")) {
      throw new HarnessError("extension targets take an extension id, not a URL");
    }
  } else if (!isAbsoluteUrl(t.url)) {
    throw new HarnessError(`target.url is not an absolute URL: ${t.url}`);
  }
  const m = bundle.capture_meta;
  if (!Number.isInteger(m.max_duration_s) || m.max_duration_s <= 0) {
    throw new HarnessError("capture_meta.max_duration_s must be a positive integer");
  }
  if (!m.capture_started_at) {
    throw new HarnessError("capture_meta.capture_started_at must be non-empty");
  }

  for (const [i, rec] of bundle.api_calls.entries()) {
    checkUrlOrMarker(rec.script_url, `api_calls[${i}].script_url`);
    if (!rec.symbol.startsWith("window.")) {
      throw new HarnessError(`api_calls[${i}].symbol must begin with 'window.'`);
    }
    if (!ACCESS_MODES.has(rec.access_mode)) {
      throw new HarnessError(`api_calls[${i}].access_mode invalid: ${rec.access_mode}`);
    }
  }
  checkTimestamps(bundle.api_calls, "api_calls");

  for (const [i, req] of bundle.requests.entries()) {
    if (!REQUEST_KINDS.has(req.kind)) {
      throw new HarnessError(`requests[${i}].kind invalid: ${req.kind}`);
    }
    if (!isAbsoluteUrl(req.url)) {
      throw new HarnessError(`requests[${i}].url is not absolute: ${req.url}`);
    }
    if (req.kind === "http_post" && req.post_body === undefined) {
      throw new HarnessError(`requests[${i}]: post_body required for http_post`);
    }
    if (req.kind === "ws_out" && req.ws_payload === undefined) {
      throw new HarnessError(`requests[${i}]: ws_payload required for ws_out`);
    }
    if (req.kind === "http_get" && (req.post_body !== undefined || req.ws_payload !== undefined)) {
      throw new HarnessError(`requests[${i}]: http_get carries no body payload`);
    }
    if (req.kind === "http_post" && req.ws_payload !== undefined) {
      throw new HarnessError(`requests[${i}]: ws_payload only valid for ws_out`);
    }
    if (req.kind === "ws_out" && req.post_body !== undefined) {
      throw new HarnessError(`requests[${i}]: post_body only valid for http_post`);
    }
    checkUrlOrMarker(req.initiator_url, `requests[${i}].initiator_url`);
  }
  checkTimestamps(bundle.requests, "requests");

  for (const [i, c] of bundle.cookies.entries()) {
    if (!c.domain) throw new HarnessError(`cookies[${i}].domain must be non-empty`);
    if (!COOKIE_SOURCES.has(c.source)) {
      throw new HarnessError(`cookies[${i}].source invalid: ${c.source}`);
    }
  }
  checkTimestamps(bundle.cookies, "cookies");

  for (const [i, s] of bundle.scripts.entries()) {
    if (!s.script_url) throw new HarnessError(`scripts[${i}].script_url must be non-empty`);
    if (!/^[0-9a-f]+$/.test(s.body_hash)) {
      throw new HarnessError(`scripts[${i}].body_hash must be lowercase hex`);
    }
    if (s.body !== undefined && computeBodyHash(s.body) !== s.body_hash) {
      throw new HarnessError(`scripts[${i}].body_hash does not match body`);
    }
  }
}

function encodePayload(obj: Record<string, unknown>, key: string, data: string | undefined): void {
  if (data === undefined) return;
  // Strings captured from page APIs are always valid UTF-8 once re-encoded;
  // lone surrogates are the only case that round-trips badly, so base64 them.
  if (isWellFormedUtf16(data)) {
    obj[key] = data;
    obj["encoding"] = "utf8";
  } else {
    obj[key] = Buffer.from(data, "utf8").toString("base64");
    obj["encoding"] = "base64";
  }
}

function isWellFormedUtf16(s: string): boolean {
  // String.prototype.isWellFormed exists on node 20.
  const probe = s as string & { isWellFormed?: () => boolean };
  if (typeof probe.isWellFormed === "function") return probe.isWellFormed();
  return true;
}

function apiCallLine(rec: ApiCallRecord): string {
  const obj: Record<string, unknown> = {
    type: "api_call",
    script_url: rec.script_url,
    symbol: rec.symbol,
    access_mode: rec.access_mode,
    stack: rec.stack,
    timestamp: rec.timestamp,
    ...rec.extra,
  };
  return JSON.stringify(obj);
}

function requestLine(req: NetworkRecord): string {
  const obj: Record<string, unknown> = { type: "request", kind: req.kind, url: req.url };
  encodePayload(obj, "post_body", req.post_body);
  encodePayload(obj, "ws_payload", req.ws_payload);
  obj["response_set_cookies"] = req.response_set_cookies;
  obj["timestamp"] = req.timestamp;
  obj["initiator_url"] = req.initiator_url;
  Object.assign(obj, req.extra);
  return JSON.stringify(obj);
}

function cookieLine(c: CookieRecord): string {
  const obj: Record<string, unknown> = {
    type: "cookie",
    name: c.name,
    value: c.value,
    domain: c.domain,
    source: c.source,
    timestamp: c.timestamp,
    ...c.extra,
  };
  return JSON.stringify(obj);
}

function scriptLine(s: ScriptRecord): string {
  const obj: Record<string, unknown> = {
    type: "script",
    script_url: s.script_url,
    body_hash: s.body_hash,
  };
  encodePayload(obj, "body", s.body);
  Object.assign(obj, s.extra);
  return JSON.stringify(obj);
}

/** Serialize a bundle to JSONL bytes; throws HarnessError if invalid. */
export function writeTraceBundle(bundle: TraceBundle): string {
  checkBundle(bundle);
  const target: Record<string, unknown> = { kind: bundle.target.kind, url: bundle.target.url };
  if (bundle.target.rank !== undefined) target["rank"] = bundle.target.rank;
  if (bundle.target.category !== undefined) target["category"] = bundle.target.category;
  const header: Record<string, unknown> = {
    type: "header",
    visit_id: bundle.visit_id,
    target,
    capture_meta: {
      capture_started_at: bundle.capture_meta.capture_started_at,
      max_duration_s: bundle.capture_meta.max_duration_s,
      pages_visited: bundle.capture_meta.pages_visited,
      wallet_profile_id: bundle.capture_meta.wallet_profile_id,
    },
    ...bundle.extra,
  };
  const lines = [JSON.stringify(header)];
  for (const rec of bundle.api_calls) lines.push(apiCallLine(rec));
  for (const req of bundle.requests) lines.push(requestLine(req));
  for (const c of bundle.cookies) lines.push(cookieLine(c));
  for (const s of bundle.scripts) lines.push(scriptLine(s));
  return lines.join("\n") + "\n";
}
