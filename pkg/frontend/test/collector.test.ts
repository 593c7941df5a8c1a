import { readFileSync } from "node:fs";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { visitIdFor } from "../src/collector.js";
import type { FixtureServer } from "../src/host.js";
import { computeBodyHash } from "../src/traceWriter.js";
import { FIXTURES_ROOT, makeSession, scratchDir, startFixtureServer } from "./helpers.js";

describe("visitIdFor", () => {
  it("uses mode, zero-padded ordinal, and a host+path slug", () => {
    expect(
      visitIdFor({ mode: "website", url: "http://127.0.0.1:4100/website-plain.html", index: 0 }),
    ).toBe("website-000-127-0-0-1-website-plain-html");
    expect(visitIdFor({ mode: "dapp", url: "https://swap.example.io/app", index: 12 })).toBe(
      "dapp-012-swap-example-io-app",
    );
  });

  it("uses the extension id for extension visits", () => {
    expect(
      visitIdFor({
        mode: "extension",
        url: "http://127.0.0.1:4100/extension-popup.html",
        extensionId: "abCdEfGh",
        index: 3,
      }),
    ).toBe("extension-003-abcdefgh");
  });

  it("caps the slug length", () => {
    const id = visitIdFor({
      mode: "website",
      url: `http://very-long-host-name.example.com/${"segment/".repeat(20)}`,
      index: 1,
    });
    expect(id.length).toBeLessThanOrEqual("website-001-".length + 40);
  });
});

describe("collection over fixture pages", () => {
  let server: FixtureServer;
  let out: string;

  beforeAll(async () => {
    server = await startFixtureServer();
    out = scratchDir("collector");
  });

  afterAll(async () => {
    await server.close();
  });

  it("captures a plain page with no wallet accesses and only the document request", async () => {
    const result = await makeSession(out).runVisit({
      mode: "website",
      url: server.url("/website-plain.html"),
      index: 0,
      rank: 5,
      category: "news",
    });
    expect(result.aborted).toBe(false);
    expect(result.outcome).toBeNull();
    expect(result.clickSequence).toBeNull();
    const bundle = result.bundle;
    expect(bundle).not.toBeNull();
    expect(bundle?.target).toEqual({
      kind: "website",
      url: server.url("/website-plain.html"),
      rank: 5,
      category: "news",
    });
    expect(bundle?.capture_meta.max_duration_s).toBe(60);
    expect(bundle?.capture_meta.pages_visited).toEqual([server.url("/website-plain.html")]);
    expect(bundle?.api_calls).toEqual([]);
    expect(bundle?.cookies).toEqual([]);
    expect(bundle?.scripts).toEqual([]);
    expect(bundle?.requests).toHaveLength(1);
    expect(bundle?.requests[0]).toMatchObject({ kind: "http_get", url: server.url("/website-plain.html") });
    // No interaction artifacts on a website visit — only the injection stamp.
    expect(Object.keys(bundle?.extra ?? {})).toEqual(["injected_at_ms"]);
  });

  it("records fingerprint probes with per-script attribution and access modes", async () => {
    const result = await makeSession(out).runVisit({
      mode: "website",
      url: server.url("/website-fingerprint.html"),
      index: 1,
    });
    const bundle = result.bundle;
    expect(bundle).not.toBeNull();
    const calls = bundle?.api_calls ?? [];

    // fingerprint.js performs 17 direct reads (guard + property reads, one
    // record per path segment the page touches) and reads the four roots
    // once each inside its Object.keys(window) walk.
    const direct = calls.filter((c) => c.access_mode === "direct");
    const enumerated = calls.filter((c) => c.access_mode === "enumeration");
    expect(direct).toHaveLength(17);
    expect(enumerated).toHaveLength(4);
    expect(new Set(enumerated.map((c) => c.symbol))).toEqual(
      new Set(["window.ethereum", "window.BinanceChain", "window.solana", "window.cardano"]),
    );
    for (const leaf of [
      "window.ethereum.isMetaMask",
      "window.ethereum.isCoinbaseWallet",
      "window.BinanceChain.chainId",
      "window.solana.isPhantom",
      "window.cardano.nami.name",
    ]) {
      expect(direct.map((c) => c.symbol)).toContain(leaf);
    }
    const scriptUrl = server.url("/fingerprint.js");
    expect(calls.every((c) => c.script_url === scriptUrl)).toBe(true);
    expect(calls.every((c) => c.stack.length > 0)).toBe(true);

    // The probe exfiltrates over fetch POST and an image-style XHR GET; the
    // pixel tag counts the four enumerated roots.
    const post = bundle?.requests.find((r) => r.kind === "http_post");
    expect(post).toMatchObject({
      url: "https://collect.fixture.test/fp",
      initiator_url: scriptUrl,
    });
    const report = JSON.parse(post?.post_body ?? "{}") as {
      direct: Record<string, unknown>;
      enumerated: string[];
    };
    expect(report.direct).toEqual({
      metamask: true,
      coinbase: true,
      binance: "0x38",
      phantom: true,
      nami: "Nami Wallet",
    });
    expect(new Set(report.enumerated)).toEqual(
      new Set(["ethereum", "BinanceChain", "solana", "cardano"]),
    );
    expect(
      bundle?.requests.some((r) => r.url === "https://collect.fixture.test/fp-pixel?tag=4"),
    ).toBe(true);

    // Script cookie and script body captured.
    expect(bundle?.cookies).toContainEqual(
      expect.objectContaining({ name: "fpid", value: "fp-7f3a12", source: "script" }),
    );
    const fpScript = bundle?.scripts.find((s) => s.script_url === scriptUrl);
    const fixtureBody = readFileSync(join(FIXTURES_ROOT, "fingerprint.js"), "utf8");
    expect(fpScript?.body).toBe(fixtureBody);
    expect(fpScript?.body_hash).toBe(computeBodyHash(fixtureBody));
  });

  it("captures every traffic channel of a busy page", async () => {
    const result = await makeSession(out).runVisit({
      mode: "website",
      url: server.url("/website-traffic.html"),
      index: 2,
    });
    const bundle = result.bundle;
    const shape = (bundle?.requests ?? []).map((r) => [r.kind, new URL(r.url).pathname]);
    expect(shape).toEqual([
      ["http_get", "/website-traffic.html"],
      ["http_get", "/traffic.js"],
      ["http_post", "/ingest"],
      ["http_get", "/poll"],
      ["ws_out", "/live"],
    ]);
    const ws = bundle?.requests.find((r) => r.kind === "ws_out");
    expect(ws).toMatchObject({
      url: "wss://collect.fixture.test/live",
      ws_payload: "subscribe:latency",
    });
    const doc = bundle?.requests[0];
    expect(doc?.response_set_cookies).toEqual(["session=s1; Path=/"]);
    expect(bundle?.cookies).toEqual([
      expect.objectContaining({ name: "session", value: "s1", source: "header" }),
      expect.objectContaining({ name: "viewpref", value: "compact", source: "script" }),
    ]);
    const ingest = JSON.parse(
      bundle?.requests.find((r) => r.kind === "http_post")?.post_body ?? "{}",
    ) as Record<string, unknown>;
    expect(ingest).toEqual({ page: "/website-traffic.html", t: 12345 });
  });

  it("marks the capture partial when the page tears down a hook", async () => {
    const result = await makeSession(out).runVisit({
      mode: "website",
      url: server.url("/website-hook-tamper.html"),
      index: 3,
    });
    expect(result.bundle?.extra?.["partial"]).toBe(true);
    expect(result.bundle?.extra?.["partial_reason"]).toBe("window.fetch");
    expect(result.diagnostics).toContain("capture marked partial: window.fetch");
  });

  it("collects inline script bodies under the inline marker", async () => {
    const result = await makeSession(out).runVisit({
      mode: "dapp",
      url: server.url("/dapp-blind-click.html"),
      index: 4,
    });
    const inline = (result.bundle?.scripts ?? []).filter((s) => s.script_url === "inline");
    expect(inline.length).toBeGreaterThanOrEqual(1);
    for (const s of inline) {
      expect(s.body_hash).toBe(computeBodyHash(s.body ?? ""));
    }
    expect(inline.some((s) => (s.body ?? "").includes("eth_requestAccounts"))).toBe(true);
  });

  it("records a website load failure in the header instead of an outcome", async () => {
    const result = await makeSession(out).runVisit({
      mode: "website",
      url: server.url("/status-500"),
      index: 5,
    });
    expect(result.outcome).toBeNull();
    expect(result.bundle?.extra?.["load_failure"]).toEqual({
      kind: "http_status",
      detail: "document fetch returned HTTP 500",
    });
  });

  it("classifies DApp load failures: connection drop, bad status, timeout", async () => {
    const session = makeSession(out, { collector: { max_duration_s: 1 } });
    const cases: Array<[string, string, string]> = [
      ["/down", "network", "document fetch failed"],
      ["/status-500", "http_status", "HTTP 500"],
      ["/hang", "timeout", "no response within"],
    ];
    for (const [route, kind, detailPart] of cases) {
      const result = await session.runVisit({
        mode: "dapp",
        url: server.url(route),
        index: 6,
      });
      expect(result.outcome?.status).toBe("site_down");
      expect(result.outcome?.detail.startsWith(`${kind}:`)).toBe(true);
      expect(result.outcome?.detail).toContain(detailPart);
      expect(result.bundle?.capture_meta.max_duration_s).toBe(1);
      expect(result.bundle?.extra?.["connect_outcome"]).toEqual(result.outcome);
    }
  });

  it("aborts the visit without a bundle when injection fails", async () => {
    const session = makeSession(out, {
      collector: {
        wallet_api_table: [
          {
            wallet_name: "Clash",
            breakpoint_symbol: "window.location",
            simulated_property_path: "window.location.isClash",
            simulated_value: true,
          },
        ],
      },
    });
    const result = await session.runVisit({
      mode: "website",
      url: server.url("/website-plain.html"),
      index: 7,
    });
    expect(result.aborted).toBe(true);
    expect(result.bundlePath).toBeNull();
    expect(result.bundle).toBeNull();
    expect(result.diagnostics.join("\n")).toMatch(/visit aborted: cannot define window\.location/);
  });

  it("writes the bundle as one JSON line per record, header first", async () => {
    const result = await makeSession(out).runVisit({
      mode: "website",
      url: server.url("/website-traffic.html"),
      index: 8,
    });
    const text = readFileSync(result.bundlePath as string, "utf8");
    const lines = text.trimEnd().split("\n");
    const bundle = result.bundle;
    const recordCount =
      (bundle?.api_calls.length ?? 0) +
      (bundle?.requests.length ?? 0) +
      (bundle?.cookies.length ?? 0) +
      (bundle?.scripts.length ?? 0);
    expect(lines).toHaveLength(1 + recordCount);
    const header = JSON.parse(lines[0]) as Record<string, unknown>;
    expect(header["type"]).toBe("header");
    expect(header["visit_id"]).toBe(result.visitId);
    for (const line of lines.slice(1)) {
      const parsed = JSON.parse(line) as { type: string };
      expect(["api_call", "request", "cookie", "script"]).toContain(parsed.type);
    }
  });
});
