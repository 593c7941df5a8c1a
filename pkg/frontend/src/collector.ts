/**
 * Visit collector: orchestrates one recorded visit end to end.
 *
 * Per visit: open the target page with the wallet simulator injected before
 * any page script executes, record API accesses / traffic / cookies /
 * script bodies, run the mode-specific interaction (none for websites, the
 * connect automator for DApps, the bounded random walk for extension
 * pages), then verify hook integrity and emit one validated trace bundle
 * as a JSONL file.
 *
 * Injection failure aborts the visit with a diagnostic and emits nothing:
 * a visit observed without the simulator in place would be silently
 * missing the signal this harness exists to capture.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { connectDapp } from "./automator.js";
import { effectiveMaxDurationS } from "./config.js";
import { interactExtension } from "./extension.js";
import { openPage, type LoadFailure, type OpenedPage } from "./host.js";
import { installTrafficInterceptor, type ResponseStubs } from "./interceptor.js";
import { installEnumerationSentinel, VisitRecorder } from "./recorder.js";
import { visitRng } from "./rng.js";
import { InjectionError, WalletSimulator } from "./simulator.js";
import { writeTraceBundle } from "./traceWriter.js";
import type {
  AutomatorConfig,
  CollectorConfig,
  ConnectOutcome,
  TargetDescriptor,
  TraceBundle,
  WalletProfile,
} from "./types.js";

export type VisitMode = "website" | "dapp" | "extension";

export interface VisitSpec {
  mode: VisitMode;
  /** Page URL to load (for extension targets: the locally served page that
   * stands in for the extension's UI page). */
  url: string;
  /** Extension id (no scheme); required when mode is "extension". */
  extensionId?: string;
  /** Position in the target list; part of the visit id. */
  index: number;
  rank?: number;
  category?: string;
}

export interface CollectorSessionOptions {
  collector: CollectorConfig;
  automator: AutomatorConfig;
  profile: WalletProfile;
  seed: number;
  /** Scripted responses for page-initiated traffic (tests and fixtures). */
  stubs?: ResponseStubs;
  /** How long to wait for the page load event before proceeding anyway. */
  loadWaitMs?: number;
}

export interface VisitResult {
  visitId: string;
  /** Absolute path of the emitted bundle, or null when the visit aborted. */
  bundlePath: string | null;
  bundle: TraceBundle | null;
  /** Present for DApp visits only — exactly one outcome per visit. */
  outcome: ConnectOutcome | null;
  /** Click-sequence witness for extension visits. */
  clickSequence: string[] | null;
  diagnostics: string[];
  aborted: boolean;
}

function slugify(text: string): string {
  return (
    text
      .toLowerCase()
      .replace(/[^a-z0-9]+/g, "-")
      .replace(/^-+|-+$/g, "")
      .slice(0, 40) || "target"
  );
}

export function visitIdFor(spec: VisitSpec): string {
  const ordinal = String(spec.index).padStart(3, "0");
  let basis: string;
  if (spec.mode === "extension") {
    basis = spec.extensionId ?? spec.url;
  } else {
    const u = new URL(spec.url);
    basis = `${u.hostname}${u.pathname}`;
  }
  return `${spec.mode}-${ordinal}-${slugify(basis)}`;
}

function targetFor(spec: VisitSpec): TargetDescriptor {
  const target: TargetDescriptor = {
    kind: spec.mode,
    url: spec.mode === "extension" ? (spec.extensionId ?? "") : spec.url,
  };
  if (spec.rank !== undefined) target.rank = spec.rank;
  if (spec.category !== undefined) target.category = spec.category;
  return target;
}

function collectInlineScripts(document: Document, recorder: VisitRecorder): void {
  for (const script of Array.from(document.querySelectorAll("script"))) {
    if (script.getAttribute("src")) continue;
    const body = script.textContent ?? "";
    if (body.trim()) recorder.addScript("inline", body);
  }
}

export class CollectorSession {
  readonly options: CollectorSessionOptions;

  constructor(options: CollectorSessionOptions) {
    this.options = options;
  }

  async runVisit(spec: VisitSpec): Promise<VisitResult> {
    const { collector, automator, profile, seed } = this.options;
    if (spec.mode === "extension" && !spec.extensionId) {
      throw new Error("extension visits require an extensionId");
    }
    const visitId = visitIdFor(spec);
    const rng = visitRng(seed, visitId);
    const recorder = new VisitRecorder();
    const simulator = new WalletSimulator(collector.wallet_api_table, profile, recorder);
    const maxDurationS = effectiveMaxDurationS(collector, spec.mode);
    const captureStartedAt = new Date().toISOString();
    const visitStart = performance.now();
    const deadlineMs = visitStart + maxDurationS * 1000;
    const docHost = new URL(spec.url).hostname;

    const extra: Record<string, unknown> = {};
    let outcome: ConnectOutcome | null = null;
    let clickSequence: string[] | null = null;
    let interceptor: ReturnType<typeof installTrafficInterceptor> | null = null;

    let opened;
    try {
      opened = await openPage(spec.url, {
        recorder,
        docTimeoutMs: maxDurationS * 1000,
        loadWaitMs: this.options.loadWaitMs,
        install: (window) => {
          simulator.install(window);
          interceptor = installTrafficInterceptor(window, recorder, {
            stubs: this.options.stubs,
            docHost,
          });
          installEnumerationSentinel(window, recorder);
        },
      });
    } catch (err) {
      if (err instanceof InjectionError) {
        recorder.diagnostic(`visit aborted: ${err.message}`);
        return {
          visitId,
          bundlePath: null,
          bundle: null,
          outcome: null,
          clickSequence: null,
          diagnostics: [...recorder.diagnostics],
          aborted: true,
        };
      }
      throw err;
    }

    if (!opened.ok) {
      const failure: LoadFailure = opened.failure;
      if (spec.mode === "dapp") {
        outcome = { status: "site_down", detail: `${failure.kind}: ${failure.detail}` };
      } else {
        extra["load_failure"] = { kind: failure.kind, detail: failure.detail };
      }
    } else {
      const page: OpenedPage = opened.page;
      try {
        await page.settle();
        if (spec.mode === "dapp") {
          outcome = await connectDapp(
            {
              window: page.window,
              document: page.document,
              simulator,
              recorder,
              settle: (rounds) => page.settle(rounds),
              deadlineMs,
            },
            automator,
          );
        } else if (spec.mode === "extension") {
          clickSequence = await interactExtension(
            {
              window: page.window,
              document: page.document,
              settle: (rounds) => page.settle(rounds),
              rng,
            },
            collector.extension_interaction,
          );
        } else {
          // Websites get no interaction beyond loading the landing page;
          // extra settle rounds let timers and microtasks drain.
          await page.settle(5);
        }

        collectInlineScripts(page.document, recorder);

        const torn: string[] = [
          ...(interceptor ? (interceptor as { verify(): string[] }).verify() : []),
          ...simulator.verifyRoots(),
        ];
        if (torn.length > 0) {
          extra["partial"] = true;
          extra["partial_reason"] = torn.join("; ");
          recorder.diagnostic(`capture marked partial: ${torn.join("; ")}`);
        }
      } finally {
        page.close();
      }
    }

    if (simulator.injectedAtMs !== null) {
      extra["injected_at_ms"] = simulator.injectedAtMs;
      const early = recorder.apiCalls.find((c) => c.timestamp < simulator.injectedAtMs!);
      if (early) {
        recorder.diagnostic(
          `api access recorded before injection finished: ${early.symbol} at ${early.timestamp}`,
        );
      }
    }
    if (outcome) extra["connect_outcome"] = outcome;
    if (clickSequence) extra["interaction_clicks"] = clickSequence;

    const bundle: TraceBundle = {
      visit_id: visitId,
      target: targetFor(spec),
      capture_meta: {
        capture_started_at: captureStartedAt,
        max_duration_s: Math.ceil(maxDurationS),
        pages_visited: [spec.url],
        wallet_profile_id: profile.profile_id,
      },
      api_calls: [...recorder.apiCalls],
      requests: [...recorder.requests],
      cookies: [...recorder.cookies],
      scripts: [...recorder.scripts],
      ...(Object.keys(extra).length > 0 ? { extra } : {}),
    };

    mkdirSync(collector.output_dir, { recursive: true });
    const bundlePath = join(collector.output_dir, `${visitId}.jsonl`);
    writeFileSync(bundlePath, writeTraceBundle(bundle), "utf8");

    return {
      visitId,
      bundlePath,
      bundle,
      outcome,
      clickSequence,
      diagnostics: [...recorder.diagnostics],
      aborted: false,
    };
  }
}
