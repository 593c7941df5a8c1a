#!/usr/bin/env node
/**
 * Serve the bundled fixture pages over local HTTP for manual poking:
 *
 *   npm run serve-fixtures [-- --port N]
 *
 * Prints the origin and serves until interrupted. The test suite starts
 * its own ephemeral server instead of using this.
 */

import { fileURLToPath, pathToFileURL } from "node:url";
import { dirname, join } from "node:path";
import { parseArgs } from "node:util";

import { FixtureServer } from "./host.js";

export function fixturesDir(): string {
  return join(dirname(fileURLToPath(import.meta.url)), "..", "fixtures");
}

async function run(): Promise<void> {
  const { values } = parseArgs({
    args: process.argv.slice(2),
    options: { port: { type: "string" } },
  });
  const port = values.port ? Number(values.port) : 0;
  const server = await FixtureServer.start({ root: fixturesDir(), port });
  process.stdout.write(`serving fixtures from ${fixturesDir()}\n`);
  process.stdout.write(`${server.origin}\n`);
  const stop = (): void => {
    void server.close().then(() => process.exit(0));
  };
  process.on("SIGINT", stop);
  process.on("SIGTERM", stop);
}

const invokedDirectly =
  typeof process.argv[1] === "string" &&
  import.meta.url === pathToFileURL(process.argv[1]).href;

if (invokedDirectly) {
  run().catch((err) => {
    process.stderr.write(`${err instanceof Error ? err.message : String(err)}\n`);
    process.exit(1);
  });
}
