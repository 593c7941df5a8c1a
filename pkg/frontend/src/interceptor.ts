/**
 * Page-traffic interception.
 *
 * Replaces the page realm's fetch / XMLHttpRequest / WebSocket with
 * recording stubs and wraps the document.cookie setter. Every outgoing GET,
 * POST, and WebSocket message becomes a request record; every Set-Cookie
 * header of a stubbed response and every script cookie assignment becomes a
 * cookie record. Inbound WebSocket traffic is dropped by design. Nothing
 * here touches the real network: responses come from a configurable stub
 * map (default: 204 empty), which keeps capture fully offline.
 */

import type { VisitRecorder } from "./recorder.js";

export interface StubResponse {
  status?: number;
  body?: string;
  /** Set-Cookie headers the stubbed server attaches. */
  setCookies?: string[];
  headers?: Record<string, string>;
}

/** Maps an outgoing request to a canned response; return undefined for the
 * default 204. */
export type ResponseStubs = (url: string, method: string) => StubResponse | undefined;

export interface InterceptorHandle {
  /** Human-readable descriptions of hooks the page tore down. A non-empty
   * result means capture detached mid-visit and the trace is partial. */
  verify(): string[];
}

interface InstallOptions {
  stubs?: ResponseStubs;
  /** Hostname recorded for script-set cookies without a Domain attribute. */
  docHost: string;
}

function headersFrom(stub: StubResponse): Map<string, string> {
  const out = new Map<string, string>();
  for (const [k, v] of Object.entries(stub.headers ?? {})) {
    out.set(k.toLowerCase(), v);
  }
  return out;
}

// eslint-disable-next-line @typescript-eslint/no-explicit-any
export function installTrafficInterceptor(
  // eslint-disable-next-line @typescript-eslint/no-explicit-any
  window: any,
  recorder: VisitRecorder,
  options: InstallOptions,
): InterceptorHandle {
  const stubs: ResponseStubs = options.stubs ?? (() => undefined);
  const resolveUrl = (url: string): string => new URL(url, window.document.baseURI).href;

  const takeStub = (url: string, method: string): Required<Pick<StubResponse, "status" | "body">> & StubResponse => {
    const stub = stubs(url, method) ?? {};
    return { status: stub.status ?? 204, body: stub.body ?? "", ...stub };
  };

  const recordHttp = (url: string, method: string, body: string | undefined): StubResponse => {
    const stub = takeStub(url, method);
    const isGet = method === "GET" || method === "HEAD";
    const att = recorder.capturePageStack();
    recorder.recordRequest({
      kind: isGet ? "http_get" : "http_post",
      url,
      ...(isGet ? {} : { post_body: body ?? "" }),
      response_set_cookies: stub.setCookies ?? [],
      initiator_url: att.scriptUrl,
    });
    if (stub.setCookies?.length) {
      recorder.recordHeaderCookies(stub.setCookies, url);
    }
    return stub;
  };

  const bodyToString = (body: unknown): string | undefined => {
    if (body === undefined || body === null) return undefined;
    if (typeof body === "string") return body;
    if (typeof URLSearchParams !== "undefined" && body instanceof URLSearchParams) {
      return body.toString();
    }
    if (window.URLSearchParams && body instanceof window.URLSearchParams) {
      return body.toString();
    }
    return String(body);
  };

  // --- fetch ---------------------------------------------------------------

  const stubFetch = function fetch(input: unknown, init?: Record<string, unknown>): Promise<unknown> {
    let url: string;
    let method = "GET";
    let body: unknown;
    if (typeof input === "object" && input !== null && "url" in input) {
      const req = input as { url: string; method?: string; body?: unknown };
      url = req.url;
      method = req.method ?? "GET";
    } else {
      url = String(input);
    }
    if (init) {
      if (typeof init["method"] === "string") method = init["method"];
      body = init["body"];
    }
    method = method.toUpperCase();
    let resolved: string;
    try {
      resolved = resolveUrl(url);
    } catch (err) {
      return Promise.reject(new window.Error(`invalid URL for fetch: ${String(err)}`));
    }
    const stub = recordHttp(resolved, method, bodyToString(body));
    const headerMap = headersFrom(stub);
    const responseBody = stub.body ?? "";
    const status = stub.status ?? 204;
    return Promise.resolve({
      ok: status >= 200 && status < 300,
      status,
      url: resolved,
      headers: {
        get: (name: string) => headerMap.get(String(name).toLowerCase()) ?? null,
      },
      text: () => Promise.resolve(responseBody),
      json: () => Promise.resolve(JSON.parse(responseBody || "null")),
      arrayBuffer: () =>
        Promise.resolve(Uint8Array.from(Buffer.from(responseBody, "utf8")).buffer),
    });
  };
  window.fetch = stubFetch;

  // --- XMLHttpRequest --------------------------------------------------------

  class StubXMLHttpRequest {
    static readonly UNSENT = 0;
    static readonly OPENED = 1;
    static readonly HEADERS_RECEIVED = 2;
    static readonly LOADING = 3;
    static readonly DONE = 4;

    readyState = 0;
    status = 0;
    responseText = "";
    response = "";
    onload: ((ev: unknown) => void) | null = null;
    onerror: ((ev: unknown) => void) | null = null;
    onreadystatechange: ((ev: unknown) => void) | null = null;

    private method = "GET";
    private url = "";
    private readonly listeners = new Map<string, Array<(ev: unknown) => void>>();
    private readonly requestHeaders = new Map<string, string>();
    private responseHeaders = new Map<string, string>();

    open(method: string, url: string): void {
      this.method = String(method).toUpperCase();
      this.url = resolveUrl(String(url));
      this.readyState = 1;
      this.fire("readystatechange");
    }

    setRequestHeader(name: string, value: string): void {
      this.requestHeaders.set(String(name).toLowerCase(), String(value));
    }

    getResponseHeader(name: string): string | null {
      return this.responseHeaders.get(String(name).toLowerCase()) ?? null;
    }

    send(body?: unknown): void {
      if (this.readyState !== 1) {
        throw new window.Error("XMLHttpRequest state: open() must precede send()");
      }
      const stub = recordHttp(this.url, this.method, bodyToString(body));
      this.responseHeaders = headersFrom(stub);
      queueMicrotask(() => {
        this.status = stub.status ?? 204;
        this.responseText = stub.body ?? "";
        this.response = this.responseText;
        this.readyState = 4;
        this.fire("readystatechange");
        this.fire("load");
        this.fire("loadend");
      });
    }

    abort(): void {
      this.readyState = 0;
    }

    addEventListener(type: string, fn: (ev: unknown) => void): void {
      const list = this.listeners.get(type) ?? [];
      list.push(fn);
      this.listeners.set(type, list);
    }

    removeEventListener(type: string, fn: (ev: unknown) => void): void {
      const list = this.listeners.get(type) ?? [];
      const i = list.indexOf(fn);
      if (i >= 0) list.splice(i, 1);
    }

    private fire(type: string): void {
      const ev = { type, target: this };
      const prop = (this as unknown as Record<string, unknown>)[`on${type}`];
      if (typeof prop === "function") {
        (prop as (ev: unknown) => void).call(this, ev);
      }
      for (const fn of this.listeners.get(type) ?? []) {
        fn.call(this, ev);
      }
    }
  }
  window.XMLHttpRequest = StubXMLHttpRequest;

  // --- WebSocket -------------------------------------------------------------

  class StubWebSocket {
    static readonly CONNECTING = 0;
    static readonly OPEN = 1;
    static readonly CLOSING = 2;
    static readonly CLOSED = 3;

    readonly url: string;
    readyState = 0;
    onopen: ((ev: unknown) => void) | null = null;
    onmessage: ((ev: unknown) => void) | null = null;
    onclose: ((ev: unknown) => void) | null = null;
    onerror: ((ev: unknown) => void) | null = null;

    private readonly listeners = new Map<string, Array<(ev: unknown) => void>>();

    constructor(url: string) {
      this.url = new URL(String(url), window.document.baseURI).href;
      window.setTimeout(() => {
        if (this.readyState === 0) {
          this.readyState = 1;
          this.fire("open");
        }
      }, 0);
    }

    send(data: unknown): void {
      if (this.readyState !== 1) {
        throw new window.Error("WebSocket is not open");
      }
      const att = recorder.capturePageStack();
      recorder.recordRequest({
        kind: "ws_out",
        url: this.url,
        ws_payload: typeof data === "string" ? data : String(data),
        initiator_url: att.scriptUrl,
      });
      // Inbound traffic is dropped: the stub never delivers messages.
    }

    close(): void {
      if (this.readyState === 3) return;
      this.readyState = 3;
      this.fire("close");
    }

    addEventListener(type: string, fn: (ev: unknown) => void): void {
      const list = this.listeners.get(type) ?? [];
      list.push(fn);
      this.listeners.set(type, list);
    }

    removeEventListener(type: string, fn: (ev: unknown) => void): void {
      const list = this.listeners.get(type) ?? [];
      const i = list.indexOf(fn);
      if (i >= 0) list.splice(i, 1);
    }

    private fire(type: string): void {
      const ev = { type, target: this };
      const prop = (this as unknown as Record<string, unknown>)[`on${type}`];
      if (typeof prop === "function") {
        (prop as (ev: unknown) => void).call(this, ev);
      }
      for (const fn of this.listeners.get(type) ?? []) {
        fn.call(this, ev);
      }
    }
  }
  window.WebSocket = StubWebSocket;

  // --- document.cookie -------------------------------------------------------

  const docProto = window.Document?.prototype;
  const cookieDesc = docProto
    ? Object.getOwnPropertyDescriptor(docProto, "cookie")
    : undefined;
  let ourCookieGet: (() => unknown) | null = null;
  if (docProto && cookieDesc?.get && cookieDesc?.set) {
    ourCookieGet = function cookie(this: unknown) {
      return cookieDesc.get!.call(this);
    };
    Object.defineProperty(docProto, "cookie", {
      configurable: true,
      get: ourCookieGet,
      set(this: unknown, value: unknown) {
        recorder.recordScriptCookie(String(value), options.docHost);
        cookieDesc.set!.call(this, value);
      },
    });
  } else {
    recorder.diagnostic("document.cookie accessor not found; script cookies unrecorded");
  }

  return {
    verify(): string[] {
      const torn: string[] = [];
      if (window.fetch !== stubFetch) torn.push("window.fetch");
      if (window.XMLHttpRequest !== StubXMLHttpRequest) torn.push("window.XMLHttpRequest");
      if (window.WebSocket !== StubWebSocket) torn.push("window.WebSocket");
      if (ourCookieGet && docProto) {
        const current = Object.getOwnPropertyDescriptor(docProto, "cookie");
        if (current?.get !== ourCookieGet) {
          torn.push("document.cookie");
        }
      }
      return torn;
    },
  };
}
