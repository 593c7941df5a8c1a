/**
 * DApp connect automator.
 *
 * Procedure per visit: tick consent checkboxes, click candidate connect
 * controls matched by label keywords, click a wallet-selection control
 * matched by wallet keywords, approve the wallet permission popup via its
 * accessibility role, and — only when no keyword matched anything — fall
 * back to blind clicks at configured offsets from the window center.
 * Produces exactly one ConnectOutcome, classified by the failure taxonomy
 * when no permission was granted.
 *
 * Label matching is exact and case-sensitive on whitespace-normalized
 * element labels (text content and common labeling attributes); the keyword
 * list enumerates case variants on purpose. Pages whose button label is not
 * in the list therefore land in button_not_found, mirroring how differently
 * labeled buttons defeat keyword scans in the wild.
 */

import type { DOMWindow } from "jsdom";

import { validateAutomatorConfig } from "./config.js";
import type { VisitRecorder } from "./recorder.js";
import type { WalletSimulator } from "./simulator.js";
import type { AutomatorConfig, ConnectOutcome } from "./types.js";

const SKIP_TAGS = new Set(["html", "head", "meta", "link", "script", "style", "title"]);
const MAX_CANDIDATE_CLICKS = 25;
const MAX_WALLET_CLICKS = 10;

export interface DappVisitContext {
  window: DOMWindow;
  document: Document;
  simulator: WalletSimulator;
  recorder: VisitRecorder;
  settle: (rounds?: number) => Promise<void>;
  /** Absolute deadline on performance.now(); crossing it during a button
   * phase yields button_not_found (the page was up but unresponsive). */
  deadlineMs: number;
}

export function normalizeLabel(text: string): string {
  return text.replace(/\s+/g, " ").trim();
}

function elementLabels(el: Element): string[] {
  const labels: string[] = [];
  const text = normalizeLabel(el.textContent ?? "");
  if (text) labels.push(text);
  for (const attr of ["aria-label", "value", "alt", "title", "placeholder"]) {
    const v = el.getAttribute(attr);
    if (v) labels.push(normalizeLabel(v));
  }
  return labels;
}

/** All elements whose label exactly matches one of the keywords, in
 * document order. Hidden elements are included: jsdom does not lay out
 * pages, and handlers fire regardless. When a match contains another match
 * (a wrapper whose whole text is its child's label), only the innermost
 * element is returned — that is where a real page attaches the handler,
 * and a bubbled click from it still reaches any ancestor listener. */
export function findByKeywords(document: Document, keywords: string[]): Element[] {
  const wanted = new Set(keywords.map(normalizeLabel).filter(Boolean));
  const out: Element[] = [];
  for (const el of Array.from(document.querySelectorAll("*"))) {
    if (SKIP_TAGS.has(el.localName)) continue;
    if (elementLabels(el).some((label) => wanted.has(label))) {
      out.push(el);
    }
  }
  return out.filter((el) => !out.some((other) => other !== el && el.contains(other)));
}

export function describeElement(el: Element): string {
  const id = el.id ? `#${el.id}` : "";
  const label = elementLabels(el)[0] ?? "";
  return `<${el.localName}${id}> ${JSON.stringify(label.slice(0, 40))}`;
}

export function clickElement(el: Element, window: DOMWindow): void {
  const maybeClickable = el as Element & { click?: () => void };
  if (typeof maybeClickable.click === "function") {
    maybeClickable.click();
    return;
  }
  el.dispatchEvent(
    new window.MouseEvent("click", {
      bubbles: true,
      cancelable: true,
      view: window as unknown as Window,
    }),
  );
}

function tickConsentCheckboxes(document: Document, window: DOMWindow): number {
  let ticked = 0;
  for (const el of Array.from(
    document.querySelectorAll<HTMLInputElement>('input[type="checkbox"]'),
  )) {
    if (!el.checked && !el.disabled) {
      clickElement(el, window);
      ticked++;
    }
  }
  return ticked;
}

/** Approve any open wallet permission popup: the dialog is located by its
 * role and popup marker, the confirm control inside purely by role and
 * accessible name. Returns how many confirms were activated. */
export function approvePermissionPopups(document: Document, window: DOMWindow): number {
  let approved = 0;
  for (const dialog of Array.from(
    document.querySelectorAll('[role="dialog"][data-simulated-wallet-popup]'),
  )) {
    const controls = Array.from(dialog.querySelectorAll('button, [role="button"]'));
    const confirm = controls.find((b) => {
      const name = normalizeLabel(b.getAttribute("aria-label") ?? b.textContent ?? "");
      return /^(connect|confirm|approve|ok)$/i.test(name);
    });
    if (confirm) {
      clickElement(confirm, window);
      approved++;
    }
  }
  return approved;
}

function blindClicks(
  document: Document,
  window: DOMWindow,
  offsets: Array<[number, number]>,
): string[] {
  const cx = (window.innerWidth || 1024) / 2;
  const cy = (window.innerHeight || 768) / 2;
  const points: string[] = [];
  for (const [dx, dy] of offsets) {
    const x = cx + dx;
    const y = cy + dy;
    points.push(`(${x},${y})`);
    // Without layout there is no hit-testing; the coordinate-stamped click
    // goes to the body, which is where page-wide handlers live.
    let target: Element | null = null;
    try {
      target = document.elementFromPoint?.(x, y) ?? null;
    } catch {
      target = null;
    }
    (target ?? document.body ?? document.documentElement)?.dispatchEvent(
      new window.MouseEvent("click", {
        bubbles: true,
        cancelable: true,
        view: window as unknown as Window,
        clientX: x,
        clientY: y,
      }),
    );
  }
  return points;
}

// ---------------------------------------------------------------------------
// Failure classification
// ---------------------------------------------------------------------------

interface FailureContext {
  sawConnectCandidates: boolean;
  walletApiTouched: boolean;
  handleCheckboxes: boolean;
}

function bodyText(document: Document): string {
  return normalizeLabel(document.body?.textContent ?? "");
}

function captchaPresent(document: Document): boolean {
  if (
    document.querySelector('[class*="captcha" i], [id*="captcha" i], iframe[src*="captcha"]')
  ) {
    return true;
  }
  return /\bcaptcha\b/i.test(bodyText(document));
}

function walletUnsupported(document: Document): boolean {
  const text = bodyText(document);
  return (
    /\b(metamask|browser wallet|wallet)\b[^.!?]{0,60}\bnot supported\b/i.test(text) ||
    /\bunsupported (wallet|browser)\b/i.test(text)
  );
}

function networkSelectionRequired(document: Document): boolean {
  for (const dialog of Array.from(document.querySelectorAll('[role="dialog"]'))) {
    if ((dialog as HTMLElement).hidden) continue;
    const text = normalizeLabel(dialog.textContent ?? "");
    if (/\b(select|choose|switch)\b[^.!?]{0,40}\bnetwork\b/i.test(text)) {
      return true;
    }
  }
  return /\bselect (a |your )?network\b/i.test(bodyText(document));
}

function loginRequired(document: Document): boolean {
  return Boolean(document.querySelector('input[type="password"], input[type="email"]'));
}

function consentBlocked(document: Document): boolean {
  for (const box of Array.from(
    document.querySelectorAll<HTMLInputElement>('input[type="checkbox"]'),
  )) {
    if (box.checked) continue;
    const labelled =
      (box.id ? document.querySelector(`label[for="${box.id}"]`)?.textContent : "") ?? "";
    const context = normalizeLabel(
      `${labelled} ${box.closest("label")?.textContent ?? ""} ${box.parentElement?.textContent ?? ""}`,
    );
    if (/\b(terms|consent|agree|privacy|cookie|policy)\b/i.test(context)) {
      return true;
    }
  }
  return false;
}

function imageButtonPresent(document: Document): boolean {
  return Boolean(
    document.querySelector('input[type="image"], a img, button img, [role="button"] img'),
  );
}

/** Ordered taxonomy for visits that never reached a permission grant. */
export function classifyFailure(document: Document, ctx: FailureContext): ConnectOutcome {
  if (captchaPresent(document)) {
    return { status: "captcha", detail: "captcha challenge present on the page" };
  }
  if (walletUnsupported(document)) {
    return { status: "wallet_unsupported", detail: "page states the wallet is not supported" };
  }
  if (networkSelectionRequired(document)) {
    return {
      status: "network_selection_required",
      detail: "a network-selection dialog blocks the connect flow",
    };
  }
  if (consentBlocked(document)) {
    return {
      status: "consent_required",
      detail: ctx.handleCheckboxes
        ? "a consent checkbox could not be ticked"
        : "consent checkboxes present and checkbox handling is disabled",
    };
  }
  if (loginRequired(document)) {
    return { status: "login_required", detail: "email/password login form present" };
  }
  if (!ctx.sawConnectCandidates && !ctx.walletApiTouched) {
    return {
      status: "not_a_dapp",
      detail: "no connect-label matches and no wallet API access by page scripts",
    };
  }
  if (!ctx.sawConnectCandidates && imageButtonPresent(document)) {
    return {
      status: "button_is_image",
      detail: "only image-based clickables present; blind clicks did not connect",
    };
  }
  return {
    status: "button_not_found",
    detail: ctx.sawConnectCandidates
      ? "keyword-labeled elements were clicked but no permission was granted"
      : "no element label matched the connect keywords",
  };
}

// ---------------------------------------------------------------------------
// Main procedure
// ---------------------------------------------------------------------------

export async function connectDapp(
  ctx: DappVisitContext,
  config: AutomatorConfig,
): Promise<ConnectOutcome> {
  validateAutomatorConfig(config);
  const { document, window, simulator } = ctx;
  const connected = (how: string): ConnectOutcome => ({
    status: "connected",
    detail: how,
  });
  const timedOut = (): boolean => performance.now() > ctx.deadlineMs;

  if (config.handle_checkboxes) {
    const ticked = tickConsentCheckboxes(document, window);
    if (ticked) await ctx.settle();
  }
  if (simulator.isConnected()) {
    return connected("page connected without interaction");
  }

  const candidates = findByKeywords(document, config.connect_keywords);
  for (const el of candidates.slice(0, MAX_CANDIDATE_CLICKS)) {
    if (timedOut()) {
      return { status: "button_not_found", detail: "connect phase exceeded the capture budget" };
    }
    clickElement(el, window);
    await ctx.settle();
    approvePermissionPopups(document, window);
    await ctx.settle();
    if (simulator.isConnected()) {
      return connected(`clicked ${describeElement(el)} and approved the permission popup`);
    }
    const walletEls = findByKeywords(document, config.wallet_keywords);
    for (const wel of walletEls.slice(0, MAX_WALLET_CLICKS)) {
      if (timedOut()) {
        return { status: "button_not_found", detail: "wallet-select phase exceeded the capture budget" };
      }
      clickElement(wel, window);
      await ctx.settle();
      approvePermissionPopups(document, window);
      await ctx.settle();
      if (simulator.isConnected()) {
        return connected(
          `clicked ${describeElement(el)}, selected ${describeElement(wel)}, approved the popup`,
        );
      }
    }
  }

  // A wallet-select control may be reachable without a connect click (e.g.
  // pre-rendered chooser).
  if (candidates.length === 0) {
    for (const wel of findByKeywords(document, config.wallet_keywords).slice(0, MAX_WALLET_CLICKS)) {
      clickElement(wel, window);
      await ctx.settle();
      approvePermissionPopups(document, window);
      await ctx.settle();
      if (simulator.isConnected()) {
        return connected(`selected ${describeElement(wel)} and approved the popup`);
      }
    }
  }

  // Late approval pass: a popup may still be pending from earlier clicks.
  if (simulator.pendingPermissionCount() > 0) {
    approvePermissionPopups(document, window);
    await ctx.settle();
    if (simulator.isConnected()) {
      return connected("approved a pending permission popup");
    }
  }

  // Blind clicks only when keywords matched nothing at all.
  if (candidates.length === 0) {
    const points = blindClicks(document, window, config.blind_click_offsets);
    await ctx.settle();
    approvePermissionPopups(document, window);
    await ctx.settle();
    if (simulator.isConnected()) {
      return connected(`blind click at ${points.join(" ")} led to a permission grant`);
    }
  }

  return classifyFailure(document, {
    sawConnectCandidates: candidates.length > 0,
    walletApiTouched: ctx.recorder.apiCalls.length > 0,
    handleCheckboxes: config.handle_checkboxes,
  });
}
