/**
 * Page hosting.
 *
 * `FixtureServer` serves a directory of fixture pages over 127.0.0.1 with
 * optional per-path extra headers (Set-Cookie) and scripted failure routes,
 * so the whole capture flow runs against repo-local pages.
 *
 * `openPage` fetches the document itself (capturing status and Set-Cookie
 * headers), then parses it in a jsdom window with scripts enabled. The
 * instrumentation installer runs in jsdom's beforeParse hook, which executes
 * before any page content —  that is what guarantees injected wallet
 * properties exist before the first site script. Subresources load through a
 * recording resource loader that captures each script body for the trace's
 * script section. Multi-page crawls are out of scope: one window per visit,
 * landing page only.
 */

import { readFile, stat } from "node:fs/promises";
import http from "node:http";
import https from "node:https";
import type { AddressInfo } from "node:net";
import path from "node:path";

import { CookieJar, JSDOM, ResourceLoader, VirtualConsole } from "jsdom";
import type { DOMWindow, FetchOptions } from "jsdom";

import type { VisitRecorder } from "./recorder.js";

const MIME: Record<string, string> = {
  ".html": "text/html; charset=utf-8",
  ".js": "text/javascript; charset=utf-8",
  ".mjs": "text/javascript; charset=utf-8",
  ".css": "text/css; charset=utf-8",
  ".json": "application/json; charset=utf-8",
  ".txt": "text/plain; charset=utf-8",
  ".png": "image/png",
  ".svg": "image/svg+xml",
  ".ico": "image/x-icon",
};

export interface FixtureServerOptions {
  root: string;
  /** Port to bind on 127.0.0.1; 0 (the default) picks an ephemeral port. */
  port?: number;
  /** Extra response headers per request path, e.g. Set-Cookie. */
  extraHeaders?: Record<string, Record<string, string | string[]>>;
  /** Scripted routes checked before static files. */
  routes?: Record<string, (req: http.IncomingMessage, res: http.ServerResponse) => void>;
}

export class FixtureServer {
  private constructor(
    private readonly server: http.Server,
    readonly port: number,
  ) {}

  static async start(options: FixtureServerOptions): Promise<FixtureServer> {
    const root = path.resolve(options.root);
    const server = http.createServer((req, res) => {
      void handle(req, res);
    });

    async function handle(req: http.IncomingMessage, res: http.ServerResponse): Promise<void> {
      const urlPath = (req.url ?? "/").split("?")[0] ?? "/";
      const route = options.routes?.[urlPath];
      if (route) {
        route(req, res);
        return;
      }
      const rel = urlPath === "/" ? "/index.html" : urlPath;
      const filePath = path.normalize(path.join(root, "." + rel));
      if (!filePath.startsWith(root)) {
        res.writeHead(403).end("forbidden");
        return;
      }
      try {
        const st = await stat(filePath);
        if (!st.isFile()) throw new Error("not a file");
      } catch {
        res.writeHead(404, { "content-type": "text/plain" }).end("not found");
        return;
      }
      const body = await readFile(filePath);
      const headers: Record<string, string | string[]> = {
        "content-type": MIME[path.extname(filePath)] ?? "application/octet-stream",
        ...options.extraHeaders?.[urlPath],
      };
      res.writeHead(200, headers).end(body);
    }

    await new Promise<void>((resolve) =>
      server.listen(options.port ?? 0, "127.0.0.1", resolve),
    );
    const port = (server.address() as AddressInfo).port;
    return new FixtureServer(server, port);
  }

  get origin(): string {
    return `http://127.0.0.1:${this.port}`;
  }

  url(p: string): string {
    return this.origin + (p.startsWith("/") ? p : "/" + p);
  }

  async close(): Promise<void> {
    this.server.closeAllConnections?.();
    await new Promise<void>((resolve, reject) =>
      this.server.close((err) => (err ? reject(err) : resolve())),
    );
  }
}

// ---------------------------------------------------------------------------
// Plain HTTP fetching (documents and subresources)
// ---------------------------------------------------------------------------

export interface HttpResponse {
  status: number;
  setCookies: string[];
  body: Buffer;
}

export class HttpFetchError extends Error {
  constructor(
    readonly kind: "network" | "timeout",
    message: string,
  ) {
    super(message);
  }
}

export function httpFetch(url: string, timeoutMs: number): Promise<HttpResponse> {
  return new Promise((resolve, reject) => {
    let mod: typeof http | typeof https;
    let parsed: URL;
    try {
      parsed = new URL(url);
      if (parsed.protocol === "http:") mod = http;
      else if (parsed.protocol === "https:") mod = https;
      else throw new Error(`unsupported scheme ${parsed.protocol}`);
    } catch (err) {
      reject(
        new HttpFetchError("network", err instanceof Error ? err.message : String(err)),
      );
      return;
    }
    const req = mod.get(parsed, { timeout: timeoutMs }, (res) => {
      const chunks: Buffer[] = [];
      res.on("data", (c: Buffer) => chunks.push(c));
      res.on("end", () => {
        resolve({
          status: res.statusCode ?? 0,
          setCookies: res.headers["set-cookie"] ?? [],
          body: Buffer.concat(chunks),
        });
      });
    });
    req.on("timeout", () => {
      req.destroy(new HttpFetchError("timeout", `no response within ${timeoutMs} ms`));
    });
    req.on("error", (err) => {
      reject(
        err instanceof HttpFetchError
          ? err
          : new HttpFetchError("network", err instanceof Error ? err.message : String(err)),
      );
    });
  });
}

// ---------------------------------------------------------------------------
// jsdom page opening
// ---------------------------------------------------------------------------

export interface LoadFailure {
  kind: "network" | "timeout" | "http_status";
  detail: string;
}

export interface OpenedPage {
  window: DOMWindow;
  document: Document;
  url: string;
  /** Let queued page work (timers, microtasks) run. */
  settle(rounds?: number): Promise<void>;
  close(): void;
}

export type OpenResult =
  | { ok: true; page: OpenedPage }
  | { ok: false; failure: LoadFailure };

export interface OpenOptions {
  /** Runs in beforeParse: install simulator/interceptor/sentinel. A throw
   * here aborts the visit (instrumentation must never be partial). */
  install: (window: DOMWindow) => void;
  recorder: VisitRecorder;
  /** Budget for the document fetch. */
  docTimeoutMs: number;
  /** Cap on waiting for the load event (resources may hang; that is not a
   * load failure, the capture just proceeds). */
  loadWaitMs?: number;
}

class RecordingResourceLoader extends ResourceLoader {
  constructor(
    private readonly recorder: VisitRecorder,
    private readonly docUrl: string,
    private readonly timeoutMs: number,
  ) {
    super();
  }

  override fetch(url: string, options: FetchOptions): ReturnType<ResourceLoader["fetch"]> {
    const recorder = this.recorder;
    const docUrl = this.docUrl;
    const isScript = options.element?.localName === "script";
    const promise = (async (): Promise<Buffer> => {
      let res: HttpResponse;
      try {
        res = await httpFetch(url, this.timeoutMs);
      } catch (err) {
        recorder.recordRequest({
          kind: "http_get",
          url,
          initiator_url: docUrl,
          extra: { resource: "subresource", failed: String(err) },
        });
        throw err;
      }
      recorder.recordRequest({
        kind: "http_get",
        url,
        response_set_cookies: res.setCookies,
        initiator_url: docUrl,
        extra: { resource: "subresource", status: res.status },
      });
      if (res.setCookies.length) {
        recorder.recordHeaderCookies(res.setCookies, url);
      }
      if (res.status >= 400) {
        throw new Error(`HTTP ${res.status} for ${url}`);
      }
      if (isScript) {
        recorder.addScript(url, res.body.toString("utf8"));
      }
      return res.body;
    })();
    const abortable = promise as Promise<Buffer> & { abort: () => void };
    abortable.abort = () => {};
    return abortable;
  }
}

const sleep = (ms: number): Promise<void> => new Promise((r) => setTimeout(r, ms));

export async function openPage(url: string, options: OpenOptions): Promise<OpenResult> {
  const recorder = options.recorder;
  let res: HttpResponse;
  try {
    res = await httpFetch(url, options.docTimeoutMs);
  } catch (err) {
    const kind = err instanceof HttpFetchError ? err.kind : "network";
    const reason = err instanceof Error ? err.message : String(err);
    return { ok: false, failure: { kind, detail: `document fetch failed: ${reason}` } };
  }
  recorder.recordRequest({
    kind: "http_get",
    url,
    response_set_cookies: res.setCookies,
    initiator_url: "unknown",
    extra: { resource: "document", status: res.status },
  });
  if (res.setCookies.length) {
    recorder.recordHeaderCookies(res.setCookies, url);
  }
  if (res.status >= 400) {
    return {
      ok: false,
      failure: { kind: "http_status", detail: `document fetch returned HTTP ${res.status}` },
    };
  }

  const virtualConsole = new VirtualConsole();
  virtualConsole.on("jsdomError", (err: Error) => {
    recorder.diagnostic(`page error: ${err.message}`);
  });

  const cookieJar = new CookieJar();
  for (const header of res.setCookies) {
    try {
      cookieJar.setCookieSync(header, url);
    } catch {
      recorder.diagnostic(`unparseable Set-Cookie header: ${header}`);
    }
  }

  const dom = new JSDOM(res.body.toString("utf8"), {
    url,
    contentType: "text/html",
    runScripts: "dangerously",
    pretendToBeVisual: true,
    resources: new RecordingResourceLoader(recorder, url, options.docTimeoutMs),
    cookieJar,
    virtualConsole,
    beforeParse: (window) => options.install(window),
  });

  const window = dom.window;
  const loadWait = options.loadWaitMs ?? 5_000;
  if (window.document.readyState !== "complete") {
    await new Promise<void>((resolve) => {
      const timer = setTimeout(() => {
        recorder.diagnostic("load event did not fire within the wait budget");
        resolve();
      }, loadWait);
      window.addEventListener("load", () => {
        clearTimeout(timer);
        resolve();
      });
    });
  }

  const page: OpenedPage = {
    window,
    document: window.document as unknown as Document,
    url,
    async settle(rounds = 3): Promise<void> {
      for (let i = 0; i < rounds; i++) {
        await sleep(5);
      }
    },
    close(): void {
      window.close();
    },
  };
  return { ok: true, page };
}
