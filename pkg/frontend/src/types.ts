/**
 * Shared domain types for the capture harness.
 *
 * Field names on the config types are snake_case because these types are
 * also the JSON wire format (`CollectorConfig` / `AutomatorConfig` files
 * passed to the CLI), and the trace record types mirror the JSONL trace
 * format consumed by the offline analyzer one-to-one.
 */

/** One simulated wallet property: which wallet it identifies, which root
 * object the recorder watches, and the property path/value the simulator
 * plants before any site script runs. Matches the analyzer's wallet-API
 * table JSON so a single table file can drive both sides. */
export interface WalletApiEntry {
  wallet_name: string;
  breakpoint_symbol: string;
  simulated_property_path: string;
  simulated_value: unknown;
}

/** Wallet identity the simulator presents to pages. Loaded from a fixed
 * profile file so every visit uses the same importable wallet. */
export interface WalletProfile {
  profile_id: string;
  passphrase: string;
  password: string;
  address: string;
}

/** Budget for random interaction with extension pages. */
export interface ExtensionInteractionConfig {
  /** Maximum number of random clicks per visit. */
  max_clicks: number;
  /** Hard time budget for the click loop, in seconds. */
  max_duration_s: number;
}

/** Capture-wide settings. All fields are optional in config JSON; absent
 * fields take the documented defaults. */
export interface CollectorConfig {
  /** Per-visit capture budget override, seconds. When absent, websites and
   * extensions get 60 s and DApps 30 s. */
  max_duration_s?: number | null;
  extension_interaction: ExtensionInteractionConfig;
  /** Capture only the landing page (no follow-up navigations). The jsdom
   * host supports only this mode. */
  landing_page_only: boolean;
  wallet_api_table: WalletApiEntry[];
  output_dir: string;
}

/** Connect-automator settings (also a JSON wire format). */
export interface AutomatorConfig {
  /** Labels that identify a connect/sign-in control. Matched exactly
   * (case-sensitive) against whitespace-normalized element labels. */
  connect_keywords: string[];
  /** Labels that identify the wallet choice inside a wallet-select modal. */
  wallet_keywords: string[];
  /** Blind-click fallback: (dx, dy) pixel offsets from the window center,
   * tried in order when no keyword matched anything clickable. */
  blind_click_offsets: Array<[number, number]>;
  /** Tick visible consent checkboxes before hunting for buttons. */
  handle_checkboxes: boolean;
}

export type TargetKind = "website" | "dapp" | "extension";

export const CONNECT_STATUSES = [
  "connected",
  "not_a_dapp",
  "button_not_found",
  "button_is_image",
  "consent_required",
  "login_required",
  "wallet_unsupported",
  "network_selection_required",
  "captcha",
  "site_down",
] as const;

export type ConnectStatus = (typeof CONNECT_STATUSES)[number];

/** Exactly one of these is produced per DApp visit. */
export interface ConnectOutcome {
  status: ConnectStatus;
  detail: string;
}

// ---------------------------------------------------------------------------
// Trace records (JSONL v1, structurally identical to the analyzer's model)
// ---------------------------------------------------------------------------

export type AccessMode = "direct" | "enumeration";
export type RequestKind = "http_get" | "http_post" | "ws_out";
export type CookieSource = "header" | "script";

export interface ApiCallRecord {
  script_url: string;
  symbol: string;
  access_mode: AccessMode;
  stack: string[];
  timestamp: number;
  extra?: Record<string, unknown>;
}

export interface NetworkRecord {
  kind: RequestKind;
  url: string;
  post_body?: string;
  ws_payload?: string;
  response_set_cookies: string[];
  timestamp: number;
  initiator_url: string;
  extra?: Record<string, unknown>;
}

export interface CookieRecord {
  name: string;
  value: string;
  domain: string;
  source: CookieSource;
  timestamp: number;
  extra?: Record<string, unknown>;
}

export interface ScriptRecord {
  script_url: string;
  body_hash: string;
  body?: string;
  extra?: Record<string, unknown>;
}

export interface TargetDescriptor {
  kind: TargetKind;
  /** Page URL for websites/DApps; the extension id for extensions. */
  url: string;
  rank?: number;
  category?: string;
}

export interface CaptureMeta {
  capture_started_at: string;
  max_duration_s: number;
  pages_visited: string[];
  wallet_profile_id: string;
}

export interface TraceBundle {
  visit_id: string;
  target: TargetDescriptor;
  capture_meta: CaptureMeta;
  api_calls: ApiCallRecord[];
  requests: NetworkRecord[];
  cookies: CookieRecord[];
  scripts: ScriptRecord[];
  extra?: Record<string, unknown>;
}

/** Raised for malformed configs and for bundles that would not pass the
 * analyzer's validation (the writer refuses to emit them). */
export class HarnessError extends Error {}

export class ConfigError extends HarnessError {}
