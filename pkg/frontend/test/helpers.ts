/** Shared test scaffolding: fixture server, sessions, scratch dirs. */

import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";

import { CollectorSession, type CollectorSessionOptions } from "../src/collector.js";
import {
  DEFAULT_WALLET_PROFILE,
  defaultAutomatorConfig,
  defaultCollectorConfig,
} from "../src/defaults.js";
import { FixtureServer, type FixtureServerOptions } from "../src/host.js";
import type { CollectorConfig } from "../src/types.js";

export const FIXTURES_ROOT = fileURLToPath(new URL("../fixtures", import.meta.url));

export function scratchDir(prefix: string): string {
  return mkdtempSync(join(tmpdir(), `${prefix}-`));
}

/** Fixture server with the scripted failure routes the suite exercises. */
export function startFixtureServer(
  overrides: Partial<FixtureServerOptions> = {},
): Promise<FixtureServer> {
  return FixtureServer.start({
    root: FIXTURES_ROOT,
    extraHeaders: {
      "/website-traffic.html": { "Set-Cookie": ["session=s1; Path=/"] },
    },
    routes: {
      "/down": (req) => {
        req.socket.destroy();
      },
      "/status-500": (_req, res) => {
        res.writeHead(500, { "Content-Type": "text/plain" }).end("oops");
      },
      "/hang": () => {
        // Never responds; the client's timeout ends the request.
      },
    },
    ...overrides,
  });
}

export interface SessionOverrides {
  seed?: number;
  collector?: Partial<CollectorConfig>;
  stubs?: CollectorSessionOptions["stubs"];
}

export function makeSession(outputDir: string, overrides: SessionOverrides = {}): CollectorSession {
  const collector = { ...defaultCollectorConfig(), ...overrides.collector, output_dir: outputDir };
  return new CollectorSession({
    collector,
    automator: defaultAutomatorConfig(),
    profile: DEFAULT_WALLET_PROFILE,
    seed: overrides.seed ?? 0,
    ...(overrides.stubs ? { stubs: overrides.stubs } : {}),
  });
}
