import { afterEach, describe, expect, it, vi } from "vitest";

import { installEnumerationSentinel, parseSetCookie, VisitRecorder } from "../src/recorder.js";
import { computeBodyHash } from "../src/traceWriter.js";

function fakeSweepWindow(): Record<string, unknown> {
  // Fresh Object/Reflect hosts so the sentinel never patches the real globals.
  const win: Record<string, unknown> = {};
  win["Object"] = {
    keys: (o: object) => Object.keys(o),
    values: (o: object) => Object.values(o),
    entries: (o: object) => Object.entries(o),
    getOwnPropertyNames: (o: object) => Object.getOwnPropertyNames(o),
    getOwnPropertyDescriptors: (o: object) => Object.getOwnPropertyDescriptors(o),
  };
  win["Reflect"] = { ownKeys: (o: object) => Reflect.ownKeys(o) };
  return win;
}

describe("parseSetCookie", () => {
  it("extracts name, value, and normalized domain", () => {
    expect(parseSetCookie("sid=abc123; Path=/; Domain=.Example.COM; HttpOnly")).toEqual({
      name: "sid",
      value: "abc123",
      domain: "example.com",
    });
  });

  it("returns a null domain when no Domain attribute is present", () => {
    expect(parseSetCookie("sid=abc123; Path=/")).toEqual({
      name: "sid",
      value: "abc123",
      domain: null,
    });
  });

  it("keeps '=' inside the value", () => {
    expect(parseSetCookie("tok=a=b=c")).toEqual({ name: "tok", value: "a=b=c", domain: null });
  });

  it("treats a pair without '=' as a bare value", () => {
    expect(parseSetCookie("justvalue")).toEqual({ name: "", value: "justvalue", domain: null });
  });
});

describe("VisitRecorder clock and ordering", () => {
  it("now() is non-negative and non-decreasing", () => {
    const rec = new VisitRecorder();
    let prev = rec.now();
    expect(prev).toBeGreaterThanOrEqual(0);
    for (let i = 0; i < 50; i++) {
      const t = rec.now();
      expect(t).toBeGreaterThanOrEqual(prev);
      prev = t;
    }
  });

  it("appends records with non-decreasing timestamps per section", () => {
    const rec = new VisitRecorder();
    for (let i = 0; i < 5; i++) {
      rec.recordRequest({ kind: "http_get", url: "http://x.test/" });
      rec.recordApiAccess("window.ethereum");
    }
    for (const section of [rec.requests, rec.apiCalls]) {
      for (let i = 1; i < section.length; i++) {
        expect(section[i].timestamp).toBeGreaterThanOrEqual(section[i - 1].timestamp);
      }
    }
  });
});

describe("stack attribution", () => {
  afterEach(() => {
    vi.unstubAllGlobals();
  });

  /** Capture attribution under a canned stack, restoring Error before any
   * assertion machinery runs. */
  function attributionFor(stack: string): ReturnType<VisitRecorder["capturePageStack"]> {
    class FakeError {
      stack = stack;
    }
    vi.stubGlobal("Error", FakeError as unknown as ErrorConstructor);
    try {
      return new VisitRecorder().capturePageStack();
    } finally {
      vi.unstubAllGlobals();
    }
  }

  it("attributes to the innermost page-world frame and drops harness frames", () => {
    const att = attributionFor(
      [
        "Error",
        "    at probeDirect (http://site.test/fingerprint.js:3:15)",
        "    at http://site.test/fingerprint.js:20:1",
        "    at runScript (/opt/harness/host.js:100:5)",
        "    at node:internal/modules/run_main:15:3",
      ].join("\n"),
    );
    expect(att.scriptUrl).toBe("http://site.test/fingerprint.js");
    expect(att.stack).toEqual([
      "at probeDirect (http://site.test/fingerprint.js:3:15)",
      "at http://site.test/fingerprint.js:20:1",
    ]);
    expect(att.unavailable).toBe(false);
  });

  it("marks about: frames as inline", () => {
    const att = attributionFor(["Error", "    at about:blank:1:10"].join("\n"));
    expect(att.scriptUrl).toBe("inline");
  });

  it("reports unknown when no page frame exists", () => {
    const att = attributionFor(["Error", "    at harness (/opt/harness/host.js:1:1)"].join("\n"));
    expect(att.scriptUrl).toBe("unknown");
    expect(att.stack).toEqual([]);
    expect(att.unavailable).toBe(false);
  });

  it("flags stack_unavailable when capture is disabled", () => {
    const rec = new VisitRecorder();
    rec.captureStacks = false;
    rec.recordApiAccess("window.solana");
    expect(rec.apiCalls[0].script_url).toBe("unknown");
    expect(rec.apiCalls[0].extra).toEqual({ stack_unavailable: true });
  });
});

describe("access-mode labeling", () => {
  it("defaults to direct", () => {
    const rec = new VisitRecorder();
    rec.recordApiAccess("window.ethereum");
    expect(rec.apiCalls[0].access_mode).toBe("direct");
  });

  it("labels reads during a window sweep as enumeration, then reverts", async () => {
    const rec = new VisitRecorder();
    rec.noteWindowSweep();
    expect(rec.enumerating).toBe(true);
    rec.recordApiAccess("window.ethereum");
    rec.recordApiAccess("window.solana");
    await Promise.resolve();
    expect(rec.enumerating).toBe(false);
    rec.recordApiAccess("window.cardano");
    expect(rec.apiCalls.map((c) => c.access_mode)).toEqual([
      "enumeration",
      "enumeration",
      "direct",
    ]);
  });

  it("honors an explicit mode override", () => {
    const rec = new VisitRecorder();
    rec.noteWindowSweep();
    rec.recordApiAccess("window.ethereum", "direct");
    expect(rec.apiCalls[0].access_mode).toBe("direct");
  });
});

describe("enumeration sentinel", () => {
  it("flags sweeps over the window for every patched API", () => {
    const sweeps: Array<(win: Record<string, unknown>) => unknown> = [
      (w) => (w["Object"] as { keys: (o: object) => unknown }).keys(w),
      (w) => (w["Object"] as { values: (o: object) => unknown }).values(w),
      (w) => (w["Object"] as { entries: (o: object) => unknown }).entries(w),
      (w) => (w["Object"] as { getOwnPropertyNames: (o: object) => unknown }).getOwnPropertyNames(w),
      (w) =>
        (w["Object"] as { getOwnPropertyDescriptors: (o: object) => unknown })
          .getOwnPropertyDescriptors(w),
      (w) => (w["Reflect"] as { ownKeys: (o: object) => unknown }).ownKeys(w),
    ];
    for (const sweep of sweeps) {
      const rec = new VisitRecorder();
      const win = fakeSweepWindow();
      installEnumerationSentinel(win, rec);
      expect(rec.enumerating).toBe(false);
      sweep(win);
      expect(rec.enumerating).toBe(true);
    }
  });

  it("ignores sweeps over other objects", () => {
    const rec = new VisitRecorder();
    const win = fakeSweepWindow();
    installEnumerationSentinel(win, rec);
    (win["Object"] as { keys: (o: object) => unknown }).keys({ a: 1 });
    expect(rec.enumerating).toBe(false);
  });

  it("preserves the sweep API return values", () => {
    const rec = new VisitRecorder();
    const win = fakeSweepWindow();
    installEnumerationSentinel(win, rec);
    expect((win["Object"] as { keys: (o: object) => unknown }).keys({ a: 1, b: 2 })).toEqual([
      "a",
      "b",
    ]);
    expect((win["Reflect"] as { ownKeys: (o: object) => unknown }).ownKeys({ x: 1 })).toEqual([
      "x",
    ]);
  });
});

describe("cookie and script capture", () => {
  it("records one header cookie per Set-Cookie with hostname fallback", () => {
    const rec = new VisitRecorder();
    rec.recordHeaderCookies(
      ["sid=1; Path=/", "pref=dark; Domain=cdn.example.com"],
      "http://www.example.com/page",
    );
    expect(rec.cookies).toHaveLength(2);
    expect(rec.cookies[0]).toMatchObject({
      name: "sid",
      value: "1",
      domain: "www.example.com",
      source: "header",
    });
    expect(rec.cookies[1]).toMatchObject({
      name: "pref",
      value: "dark",
      domain: "cdn.example.com",
      source: "header",
    });
  });

  it("records script cookies with the document host fallback", () => {
    const rec = new VisitRecorder();
    rec.recordScriptCookie("fpid=fp-7f3a12; path=/", "site.test");
    expect(rec.cookies[0]).toMatchObject({
      name: "fpid",
      value: "fp-7f3a12",
      domain: "site.test",
      source: "script",
    });
  });

  it("deduplicates script bodies by (url, hash)", () => {
    const rec = new VisitRecorder();
    rec.addScript("http://site.test/a.js", "var x = 1;");
    rec.addScript("http://site.test/a.js", "var x = 1;");
    rec.addScript("http://site.test/a.js", "var x = 2;");
    rec.addScript("inline", "var x = 1;");
    expect(rec.scripts).toHaveLength(3);
    expect(rec.scripts[0].body_hash).toBe(computeBodyHash("var x = 1;"));
    expect(rec.scripts.map((s) => s.script_url)).toEqual([
      "http://site.test/a.js",
      "http://site.test/a.js",
      "inline",
    ]);
  });

  it("defaults request fields and stores diagnostics", () => {
    const rec = new VisitRecorder();
    rec.recordRequest({ kind: "http_get", url: "http://x.test/" });
    expect(rec.requests[0].response_set_cookies).toEqual([]);
    expect(rec.requests[0].initiator_url).toBe("unknown");
    rec.diagnostic("early wallet access before hooks");
    expect(rec.diagnostics).toEqual(["early wallet access before hooks"]);
  });
});
