/**
 * In-page wallet simulator.
 *
 * Installed before the page parses, so every simulated property exists with
 * its configured value before the first site script runs. Each root object
 * (window.ethereum, window.BinanceChain, ...) is exposed through a recording
 * getter plus a recursive recording proxy: every page-world property read
 * produces one api_call record carrying the full symbol path, recorded
 * stack, and direct/enumeration access mode. Harness code never touches the
 * providers through window properties — it uses this object's control
 * methods — so only page-world accesses appear in the trace.
 *
 * Wallet permission requests (eth_requestAccounts and friends) render a
 * synthetic in-page popup: a [role=dialog] element with Cancel/Connect
 * buttons. The request promise resolves with the profile's account when the
 * confirm control is activated, which is how the connect automator approves
 * permissions by accessibility role.
 */

import { HarnessError, type WalletApiEntry, type WalletProfile } from "./types.js";
import type { VisitRecorder } from "./recorder.js";

export class InjectionError extends HarnessError {}

interface PendingPermission {
  wallet: string;
  dialog: Element;
  resolve: () => void;
  reject: (err: unknown) => void;
}

type AnyRecord = Record<string, unknown>;

export class WalletSimulator {
  private readonly entries: WalletApiEntry[];
  private readonly profile: WalletProfile;
  private readonly recorder: VisitRecorder;

  // eslint-disable-next-line @typescript-eslint/no-explicit-any
  private pageWindow: any = null;
  private accounts: string[] = [];
  private readonly pending: PendingPermission[] = [];
  private approvalsSeen = 0;
  private readonly rootGetters = new Map<string, () => unknown>();
  private readonly proxyCache = new WeakMap<object, Map<string, unknown>>();
  private readonly listeners = new Map<string, Array<(...args: unknown[]) => void>>();
  /** Stamped (capture clock) when installation finished. */
  injectedAtMs: number | null = null;

  constructor(entries: WalletApiEntry[], profile: WalletProfile, recorder: VisitRecorder) {
    this.entries = entries;
    this.profile = profile;
    this.recorder = recorder;
  }

  /** Plant every root before any site script executes. Throws
   * InjectionError when a root cannot be defined; the visit must then be
   * aborted with a diagnostic rather than captured half-instrumented. */
  // eslint-disable-next-line @typescript-eslint/no-explicit-any
  install(window: any): void {
    this.pageWindow = window;
    const roots = this.buildRoots();
    for (const [rootName, rawRoot] of roots) {
      const symbol = `window.${rootName}`;
      const proxy = this.wrap(rawRoot, symbol);
      const getter = (): unknown => {
        this.recorder.recordApiAccess(symbol);
        return proxy;
      };
      try {
        Object.defineProperty(window, rootName, {
          configurable: true,
          enumerable: true,
          get: getter,
          set: () => {
            // Pages may try to replace the provider; swallow the write so
            // the simulated object keeps answering (tamper is reported by
            // verifyRoots, not by breaking the page).
            this.recorder.diagnostic(`page attempted to overwrite window.${rootName}`);
          },
        });
      } catch (err) {
        throw new InjectionError(
          `cannot define window.${rootName} before page scripts: ${String(err)}`,
        );
      }
      this.rootGetters.set(rootName, getter);
    }
    this.injectedAtMs = this.recorder.now();
  }

  /** Names of roots whose window property no longer resolves to the
   * simulator (the page deleted or shadowed it). */
  verifyRoots(): string[] {
    const tampered: string[] = [];
    if (!this.pageWindow) return tampered;
    for (const [rootName, getter] of this.rootGetters) {
      const desc = Object.getOwnPropertyDescriptor(this.pageWindow, rootName);
      if (!desc || desc.get !== getter) {
        tampered.push(`window.${rootName}`);
      }
    }
    return tampered;
  }

  // -- control surface for the harness (never recorded) --------------------

  isConnected(): boolean {
    return this.accounts.length > 0;
  }

  pendingPermissionCount(): number {
    return this.pending.length;
  }

  approvalCount(): number {
    return this.approvalsSeen;
  }

  connectedAccounts(): string[] {
    return [...this.accounts];
  }

  // -- provider construction ------------------------------------------------

  private buildRoots(): Map<string, AnyRecord> {
    const roots = new Map<string, AnyRecord>();
    for (const entry of this.entries) {
      const rootMatch = /^window\.([^.]+)/.exec(entry.breakpoint_symbol);
      if (!rootMatch?.[1]) {
        throw new InjectionError(`malformed breakpoint symbol: ${entry.breakpoint_symbol}`);
      }
      const rootName = rootMatch[1];
      if (!roots.has(rootName)) {
        roots.set(rootName, {});
      }
      const segments = entry.simulated_property_path
        .slice("window.".length)
        .split(".")
        .slice(1); // drop the root segment itself
      let node = roots.get(rootName) as AnyRecord;
      for (const seg of segments.slice(0, -1)) {
        const next = node[seg];
        if (typeof next === "object" && next !== null) {
          node = next as AnyRecord;
        } else {
          const fresh: AnyRecord = {};
          node[seg] = fresh;
          node = fresh;
        }
      }
      const leaf = segments[segments.length - 1];
      if (leaf === undefined) {
        throw new InjectionError(
          `simulated property must name a property under its root: ${entry.simulated_property_path}`,
        );
      }
      node[leaf] = entry.simulated_value;
    }
    for (const [rootName, raw] of roots) {
      this.mixinBehavior(rootName, raw);
    }
    return roots;
  }

  /** Add just enough provider behavior for connect flows. Table-provided
   * data always wins over behavior defaults. */
  private mixinBehavior(rootName: string, raw: AnyRecord): void {
    const behave = (name: string, value: unknown): void => {
      if (!(name in raw)) raw[name] = value;
    };
    if (rootName === "ethereum" || rootName === "BinanceChain") {
      const chainId = rootName === "BinanceChain" ? "0x38" : "0x1";
      behave("request", (args: { method?: string } | undefined) =>
        this.dispatchRequest(rootName, args?.method ?? "", chainId),
      );
      behave("enable", () => this.dispatchRequest(rootName, "eth_requestAccounts", chainId));
      behave("isConnected", () => true);
      behave("on", (event: string, fn: (...a: unknown[]) => void) => {
        const list = this.listeners.get(event) ?? [];
        list.push(fn);
        this.listeners.set(event, list);
      });
      behave("removeListener", (event: string, fn: (...a: unknown[]) => void) => {
        const list = this.listeners.get(event) ?? [];
        const i = list.indexOf(fn);
        if (i >= 0) list.splice(i, 1);
      });
      behave("selectedAddress", null);
    } else if (rootName === "solana") {
      behave("connect", () =>
        this.requestPermission("Phantom").then(() => ({ publicKey: this.profile.address })),
      );
      behave("disconnect", () => Promise.resolve());
    } else if (rootName === "cardano") {
      const nami = raw["nami"];
      if (typeof nami === "object" && nami !== null) {
        const n = nami as AnyRecord;
        if (!("enable" in n)) {
          n["enable"] = () => this.requestPermission("Nami").then(() => ({}));
        }
        if (!("apiVersion" in n)) n["apiVersion"] = "0.1.0";
      }
    }
  }

  private dispatchRequest(rootName: string, method: string, chainId: string): Promise<unknown> {
    switch (method) {
      case "eth_requestAccounts":
      case "wallet_requestPermissions":
        if (this.accounts.length > 0) {
          return Promise.resolve([...this.accounts]);
        }
        return this.requestPermission(rootName === "BinanceChain" ? "Binance" : "MetaMask").then(
          () => [...this.accounts],
        );
      case "eth_accounts":
        return Promise.resolve([...this.accounts]);
      case "eth_chainId":
        return Promise.resolve(chainId);
      case "net_version":
        return Promise.resolve(String(parseInt(chainId, 16)));
      default:
        return Promise.reject(
          Object.assign(new Error(`the simulated wallet does not support ${method}`), {
            code: -32601,
          }),
        );
    }
  }

  /** Render the permission popup and resolve once its confirm control is
   * clicked. */
  private requestPermission(wallet: string): Promise<void> {
    const doc = this.pageWindow?.document;
    if (!doc) {
      return Promise.reject(new HarnessError("no page document for permission popup"));
    }
    return new Promise<void>((resolve, reject) => {
      const dialog = doc.createElement("div");
      dialog.setAttribute("role", "dialog");
      dialog.setAttribute("aria-label", "Wallet permission request");
      dialog.setAttribute("data-simulated-wallet-popup", wallet);
      const message = doc.createElement("p");
      message.textContent = `${wallet} requests permission to view your accounts on ${doc.location?.host ?? "this site"}.`;
      const cancel = doc.createElement("button");
      cancel.textContent = "Cancel";
      const confirm = doc.createElement("button");
      confirm.textContent = "Connect";
      dialog.append(message, cancel, confirm);

      const entry: PendingPermission = {
        wallet,
        dialog,
        resolve: () => {
          this.settlePermission(entry, dialog);
          this.approvalsSeen += 1;
          this.accounts = [this.profile.address];
          this.exposeSelectedAddress();
          this.emit("accountsChanged", [...this.accounts]);
          resolve();
        },
        reject: (err: unknown) => {
          this.settlePermission(entry, dialog);
          reject(err);
        },
      };
      confirm.addEventListener("click", () => entry.resolve());
      cancel.addEventListener("click", () =>
        entry.reject(Object.assign(new Error("user rejected the request"), { code: 4001 })),
      );
      (doc.body ?? doc.documentElement).appendChild(dialog);
      this.pending.push(entry);
    });
  }

  private settlePermission(entry: PendingPermission, dialog: Element): void {
    const i = this.pending.indexOf(entry);
    if (i >= 0) this.pending.splice(i, 1);
    dialog.remove();
  }

  private exposeSelectedAddress(): void {
    // Post-approval state the page can read through the recorded proxy.
    if (this.rawEthereum) {
      this.rawEthereum["selectedAddress"] = this.accounts[0] ?? null;
    }
  }

  private rawEthereum: AnyRecord | null = null;

  private emit(event: string, ...args: unknown[]): void {
    for (const fn of this.listeners.get(event) ?? []) {
      try {
        fn(...args);
      } catch (err) {
        this.recorder.diagnostic(`page listener for ${event} threw: ${String(err)}`);
      }
    }
  }

  // -- recording proxy -------------------------------------------------------

  private wrap(raw: AnyRecord, path: string): unknown {
    if (path === "window.ethereum") {
      this.rawEthereum = raw;
    }
    const simulator = this;
    return new Proxy(raw, {
      get(target, prop, receiver) {
        if (typeof prop === "symbol") {
          return Reflect.get(target, prop, receiver);
        }
        const symbol = `${path}.${prop}`;
        simulator.recorder.recordApiAccess(symbol);
        const value = Reflect.get(target, prop);
        if (typeof value === "function") {
          // Bind to the raw target so provider-internal state reads do not
          // masquerade as page accesses.
          return value.bind(target);
        }
        if (typeof value === "object" && value !== null) {
          return simulator.childProxy(target, String(prop), value as AnyRecord, symbol);
        }
        return value;
      },
    });
  }

  private childProxy(parent: object, prop: string, value: AnyRecord, path: string): unknown {
    let perParent = this.proxyCache.get(parent);
    if (!perParent) {
      perParent = new Map();
      this.proxyCache.set(parent, perParent);
    }
    let proxy = perParent.get(prop);
    if (!proxy) {
      proxy = this.wrap(value, path);
      perParent.set(prop, proxy);
    }
    return proxy;
  }
}
