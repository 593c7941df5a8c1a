/**
 * Per-visit record sink.
 *
 * Owns the capture clock (milliseconds since visit start) and the four
 * record sections of the trace bundle. All recording funnels through one
 * recorder instance per visit, so each section is appended in chronological
 * order and the non-decreasing timestamp invariant holds by construction.
 *
 * Script attribution: record sites capture a stack with `new Error()`, keep
 * only page-world frames (locations under http/https or about:), and take
 * the first such frame's URL as the accessing script. Harness frames (file
 * paths, node internals) never appear in emitted stacks.
 */

import type {
  AccessMode,
  ApiCallRecord,
  CookieRecord,
  NetworkRecord,
  ScriptRecord,
} from "./types.js";
import { computeBodyHash } from "./traceWriter.js";

const FRAME_URL = /(https?:\/\/[^()\s]+?):\d+:\d+\)?$/;

export interface StackAttribution {
  /** Page-world frames, outermost call last. */
  stack: string[];
  /** URL of the innermost page-world frame, or "inline"/"unknown". */
  scriptUrl: string;
  /** True when no stack could be captured at all. */
  unavailable: boolean;
}

export interface RequestInput {
  kind: "http_get" | "http_post" | "ws_out";
  url: string;
  post_body?: string;
  ws_payload?: string;
  response_set_cookies?: string[];
  initiator_url?: string;
  extra?: Record<string, unknown>;
}

interface ParsedCookie {
  name: string;
  value: string;
  domain: string | null;
}

/** First name=value pair and the Domain attribute of a Set-Cookie header. */
export function parseSetCookie(header: string): ParsedCookie {
  const parts = header.split(";");
  const pair = parts[0] ?? "";
  const eq = pair.indexOf("=");
  const name = eq >= 0 ? pair.slice(0, eq).trim() : "";
  const value = eq >= 0 ? pair.slice(eq + 1).trim() : pair.trim();
  let domain: string | null = null;
  for (const attr of parts.slice(1)) {
    const [k, ...rest] = attr.split("=");
    if (k && k.trim().toLowerCase() === "domain" && rest.length) {
      domain = rest.join("=").trim().replace(/^\./, "").toLowerCase() || null;
    }
  }
  return { name, value, domain };
}

export class VisitRecorder {
  readonly apiCalls: ApiCallRecord[] = [];
  readonly requests: NetworkRecord[] = [];
  readonly cookies: CookieRecord[] = [];
  readonly scripts: ScriptRecord[] = [];
  readonly diagnostics: string[] = [];

  /** Disable to exercise the stack-unavailable path. */
  captureStacks = true;

  private readonly t0 = performance.now();
  private readonly scriptKeys = new Set<string>();
  private pendingSweeps = 0;

  /** Milliseconds since visit start, microsecond precision. */
  now(): number {
    return Math.round((performance.now() - this.t0) * 1000) / 1000;
  }

  /** True while a window-property enumeration sweep is in flight. */
  get enumerating(): boolean {
    return this.pendingSweeps > 0;
  }

  /** Called by the enumeration sentinel when a sweep API runs over the
   * page's window. The flag covers the rest of the current synchronous
   * unit: reads made while walking the key list land in the same task. */
  noteWindowSweep(): void {
    this.pendingSweeps += 1;
    queueMicrotask(() => {
      this.pendingSweeps -= 1;
    });
  }

  capturePageStack(): StackAttribution {
    if (!this.captureStacks) {
      return { stack: [], scriptUrl: "unknown", unavailable: true };
    }
    const raw = new Error().stack;
    if (!raw) {
      return { stack: [], scriptUrl: "unknown", unavailable: true };
    }
    const frames = raw
      .split("\n")
      .slice(1)
      .map((f) => f.trim())
      .filter((f) => f.includes("http://") || f.includes("https://") || f.includes("about:"));
    let scriptUrl = "unknown";
    for (const frame of frames) {
      const m = FRAME_URL.exec(frame);
      if (m?.[1]) {
        scriptUrl = m[1];
        break;
      }
      if (frame.includes("about:")) {
        scriptUrl = "inline";
        break;
      }
    }
    return { stack: frames, scriptUrl, unavailable: false };
  }

  recordApiAccess(symbol: string, mode?: AccessMode): void {
    const att = this.capturePageStack();
    const rec: ApiCallRecord = {
      script_url: att.scriptUrl,
      symbol,
      access_mode: mode ?? (this.enumerating ? "enumeration" : "direct"),
      stack: att.stack,
      timestamp: this.now(),
    };
    if (att.unavailable) {
      rec.extra = { stack_unavailable: true };
    }
    this.apiCalls.push(rec);
  }

  recordRequest(input: RequestInput): void {
    this.requests.push({
      kind: input.kind,
      url: input.url,
      ...(input.post_body !== undefined && { post_body: input.post_body }),
      ...(input.ws_payload !== undefined && { ws_payload: input.ws_payload }),
      response_set_cookies: input.response_set_cookies ?? [],
      timestamp: this.now(),
      initiator_url: input.initiator_url ?? "unknown",
      ...(input.extra && { extra: input.extra }),
    });
  }

  /** One CookieRecord(source=header) per Set-Cookie header of a response. */
  recordHeaderCookies(setCookies: string[], responseUrl: string): void {
    let fallbackDomain = "unknown-host";
    try {
      fallbackDomain = new URL(responseUrl).hostname;
    } catch {
      // keep fallback
    }
    for (const header of setCookies) {
      const parsed = parseSetCookie(header);
      this.cookies.push({
        name: parsed.name,
        value: parsed.value,
        domain: parsed.domain ?? fallbackDomain,
        source: "header",
        timestamp: this.now(),
      });
    }
  }

  /** One CookieRecord(source=script) per document.cookie assignment. */
  recordScriptCookie(assignment: string, docHost: string): void {
    const parsed = parseSetCookie(assignment);
    this.cookies.push({
      name: parsed.name,
      value: parsed.value,
      domain: parsed.domain ?? docHost,
      source: "script",
      timestamp: this.now(),
    });
  }

  /** Deduplicated script body capture (one record per distinct url+body). */
  addScript(scriptUrl: string, body: string | Buffer): void {
    const hash = computeBodyHash(body);
    const key = `${scriptUrl}\n${hash}`;
    if (this.scriptKeys.has(key)) return;
    this.scriptKeys.add(key);
    this.scripts.push({
      script_url: scriptUrl,
      body_hash: hash,
      body: typeof body === "string" ? body : body.toString("utf8"),
    });
  }

  diagnostic(message: string): void {
    this.diagnostics.push(message);
  }
}

type SweepFn = (...args: unknown[]) => unknown;

/**
 * Patch the page realm's property-sweep APIs so reads of the wallet roots
 * that happen while a script walks the window's properties are labeled
 * access_mode=enumeration. Covers Object.keys / values / entries /
 * getOwnPropertyNames / getOwnPropertyDescriptors and Reflect.ownKeys called
 * on the window; a hand-rolled for..in loop is not observable from here and
 * its reads are labeled direct.
 */
export function installEnumerationSentinel(
  // eslint-disable-next-line @typescript-eslint/no-explicit-any
  window: any,
  recorder: VisitRecorder,
): void {
  const globalObj = window;
  const wrap = (host: Record<string, unknown>, name: string): void => {
    const original = host[name] as SweepFn | undefined;
    if (typeof original !== "function") return;
    host[name] = function (this: unknown, ...args: unknown[]): unknown {
      if (args[0] === globalObj) {
        recorder.noteWindowSweep();
      }
      return original.apply(this, args);
    };
  };
  for (const name of [
    "keys",
    "values",
    "entries",
    "getOwnPropertyNames",
    "getOwnPropertyDescriptors",
  ]) {
    wrap(window.Object, name);
  }
  wrap(window.Reflect, "ownKeys");
}
