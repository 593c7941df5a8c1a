/**
 * Extension interaction driver.
 *
 * Extension pages carry no connect flow; instead the driver exercises the
 * page with a bounded random walk: at most `max_clicks` clicks or
 * `max_duration_s` seconds, whichever is reached first. Extension pages
 * tend to expose only a handful of clickable controls, so the walk cycles
 * over them. Clicks are drawn from a per-visit seeded RNG, which makes the
 * click sequence a pure function of (seed, visit_id, page state) — replays
 * with the same seed reproduce the same walk.
 */

import type { DOMWindow } from "jsdom";

import { clickElement, describeElement } from "./automator.js";
import type { SeededRng } from "./rng.js";
import type { ExtensionInteractionConfig } from "./types.js";

const CLICKABLE_SELECTOR = [
  "a",
  "button",
  'input[type="button"]',
  'input[type="submit"]',
  'input[type="checkbox"]',
  'input[type="radio"]',
  'input[type="image"]',
  '[role="button"]',
  "[onclick]",
].join(", ");

export interface ExtensionInteractionContext {
  window: DOMWindow;
  document: Document;
  settle: (rounds?: number) => Promise<void>;
  rng: SeededRng;
}

function findClickables(document: Document): Element[] {
  return Array.from(document.querySelectorAll(CLICKABLE_SELECTOR)).filter((el) => {
    const input = el as HTMLInputElement;
    return !(typeof input.disabled === "boolean" && input.disabled);
  });
}

/**
 * Run the bounded random walk. Returns one descriptor per click performed,
 * in order — the replay witness for a given (seed, visit) pair.
 */
export async function interactExtension(
  ctx: ExtensionInteractionContext,
  config: ExtensionInteractionConfig,
): Promise<string[]> {
  const deadline = performance.now() + config.max_duration_s * 1000;
  const clicks: string[] = [];
  while (clicks.length < config.max_clicks && performance.now() <= deadline) {
    // Re-scan each round: clicks can add or remove controls.
    const clickables = findClickables(ctx.document);
    if (clickables.length === 0) break;
    const idx = ctx.rng.int(clickables.length);
    const el = clickables[idx]!;
    clicks.push(`${idx}:${describeElement(el)}`);
    clickElement(el, ctx.window);
    await ctx.settle(1);
  }
  return clicks;
}
