#!/usr/bin/env node
/**
 * `collect` command-line entry point.
 *
 *   collect --targets <file> --mode website|dapp|extension --out <dir>
 *           [--seed N] [--collector-config F] [--automator-config F]
 *           [--wallet-profile F]
 *
 * The targets file lists one target per line; blank lines and lines
 * starting with `#` are skipped. Website and DApp lines are absolute
 * http(s) URLs. Extension lines are `<extension-id> <page-url>`: the id
 * (no scheme) names the target, the URL is the locally served page that
 * stands in for the extension's UI page.
 *
 * Exit codes: 0 success; 1 usage error; 2 unreadable/invalid inputs;
 * 3 internal error or at least one aborted visit.
 */

import { readFileSync } from "node:fs";
import { resolve } from "node:path";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { CollectorSession, type VisitMode, type VisitSpec } from "./collector.js";
import {
  loadAutomatorConfig,
  loadCollectorConfig,
  loadWalletProfile,
} from "./config.js";
import {
  defaultAutomatorConfig,
  defaultCollectorConfig,
  DEFAULT_WALLET_PROFILE,
} from "./defaults.js";
import { ConfigError } from "./types.js";

const USAGE = `usage: collect --targets <file> --mode website|dapp|extension --out <dir>
               [--seed N] [--collector-config F] [--automator-config F]
               [--wallet-profile F]`;

const MODES: ReadonlySet<string> = new Set(["website", "dapp", "extension"]);

interface ParsedTargets {
  specs: VisitSpec[];
}

function isAbsoluteHttpUrl(text: string): boolean {
  try {
    const u = new URL(text);
    return (u.protocol === "http:" || u.protocol === "https:") && u.host !== "";
  } catch {
    return false;
  }
}

export function parseTargetsFile(content: string, mode: VisitMode): ParsedTargets {
  const specs: VisitSpec[] = [];
  const lines = content.split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i]!.trim();
    if (!line || line.startsWith("#")) continue;
    const lineNo = i + 1;
    if (mode === "extension") {
      const parts = line.split(/\s+/);
      if (parts.length !== 2) {
        throw new ConfigError(
          `targets line ${lineNo}: extension targets are "<id> <url>", got ${JSON.stringify(line)}`,
        );
      }
      const [id, url] = parts as [string, string];
      if (id.includes("://")) {
        throw new ConfigError(`targets line ${lineNo}: extension id must not contain "://"`);
      }
      if (!isAbsoluteHttpUrl(url)) {
        throw new ConfigError(`targets line ${lineNo}: not an absolute http(s) URL: ${url}`);
      }
      specs.push({ mode, url, extensionId: id, index: specs.length + 1 });
    } else {
      if (!isAbsoluteHttpUrl(line)) {
        throw new ConfigError(`targets line ${lineNo}: not an absolute http(s) URL: ${line}`);
      }
      specs.push({ mode, url: line, index: specs.length + 1 });
    }
  }
  if (specs.length === 0) {
    throw new ConfigError("targets file contains no targets");
  }
  return { specs };
}

export async function main(argv: string[]): Promise<number> {
  let values;
  try {
    const parsed = parseArgs({
      args: argv,
      options: {
        targets: { type: "string" },
        mode: { type: "string" },
        out: { type: "string" },
        seed: { type: "string" },
        "collector-config": { type: "string" },
        "automator-config": { type: "string" },
        "wallet-profile": { type: "string" },
        help: { type: "boolean", short: "h" },
      },
      allowPositionals: false,
    });
    values = parsed.values;
  } catch (err) {
    process.stderr.write(`${err instanceof Error ? err.message : String(err)}\n${USAGE}\n`);
    return 1;
  }

  if (values.help) {
    process.stdout.write(`${USAGE}\n`);
    return 0;
  }
  if (!values.targets || !values.mode || !values.out) {
    process.stderr.write(`${USAGE}\n`);
    return 1;
  }
  if (!MODES.has(values.mode)) {
    process.stderr.write(`unknown mode: ${values.mode}\n${USAGE}\n`);
    return 1;
  }
  const mode = values.mode as VisitMode;

  let seed = 0;
  if (values.seed !== undefined) {
    seed = Number(values.seed);
    if (!Number.isInteger(seed)) {
      process.stderr.write(`--seed must be an integer, got ${values.seed}\n`);
      return 1;
    }
  }

  let specs: VisitSpec[];
  let session: CollectorSession;
  try {
    const collector = values["collector-config"]
      ? loadCollectorConfig(values["collector-config"])
      : defaultCollectorConfig();
    collector.output_dir = resolve(values.out);
    const automator = values["automator-config"]
      ? loadAutomatorConfig(values["automator-config"])
      : defaultAutomatorConfig();
    const profile = values["wallet-profile"]
      ? loadWalletProfile(values["wallet-profile"])
      : DEFAULT_WALLET_PROFILE;

    let content: string;
    try {
      content = readFileSync(values.targets, "utf8");
    } catch (err) {
      throw new ConfigError(
        `cannot read targets file ${values.targets}: ${err instanceof Error ? err.message : String(err)}`,
      );
    }
    specs = parseTargetsFile(content, mode).specs;
    session = new CollectorSession({ collector, automator, profile, seed });
  } catch (err) {
    if (err instanceof ConfigError) {
      process.stderr.write(`${err.message}\n`);
      return 2;
    }
    throw err;
  }

  let failures = 0;
  for (const spec of specs) {
    try {
      const result = await session.runVisit(spec);
      const status = result.aborted
        ? "aborted"
        : (result.outcome?.status ??
          (result.bundle?.extra && "load_failure" in result.bundle.extra
            ? "load_failure"
            : "ok"));
      const records = result.bundle
        ? result.bundle.api_calls.length +
          result.bundle.requests.length +
          result.bundle.cookies.length +
          result.bundle.scripts.length
        : 0;
      process.stdout.write(
        `${result.visitId} status=${status} records=${records} -> ${result.bundlePath ?? "(no bundle)"}\n`,
      );
      if (result.aborted) {
        failures++;
        for (const d of result.diagnostics) {
          process.stderr.write(`  ${d}\n`);
        }
      }
    } catch (err) {
      failures++;
      process.stderr.write(
        `visit ${spec.url} failed: ${err instanceof Error ? (err.stack ?? err.message) : String(err)}\n`,
      );
    }
  }
  return failures > 0 ? 3 : 0;
}

const invokedDirectly =
  typeof process.argv[1] === "string" &&
  import.meta.url === pathToFileURL(process.argv[1]).href;

if (invokedDirectly) {
  main(process.argv.slice(2)).then(
    (code) => process.exit(code),
    (err) => {
      process.stderr.write(`${err instanceof Error ? (err.stack ?? err.message) : String(err)}\n`);
      process.exit(3);
    },
  );
}
