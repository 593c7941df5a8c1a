/**
 * Config loading and validation. Config files are JSON documents with the
 * same field names as the TypeScript types; absent fields take defaults.
 */

import { readFileSync } from "node:fs";

import { defaultAutomatorConfig, defaultCollectorConfig } from "./defaults.js";
import {
  ConfigError,
  type AutomatorConfig,
  type CollectorConfig,
  type TargetKind,
  type WalletApiEntry,
  type WalletProfile,
} from "./types.js";
import { MODE_MAX_DURATION_S } from "./defaults.js";

function isObject(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

function readJson(path: string): unknown {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new ConfigError(`cannot read config file ${path}: ${String(err)}`);
  }
  try {
    return JSON.parse(text);
  } catch (err) {
    throw new ConfigError(`malformed JSON in ${path}: ${String(err)}`);
  }
}

export function validateCollectorConfig(cfg: CollectorConfig): CollectorConfig {
  if (cfg.max_duration_s != null) {
    if (!Number.isFinite(cfg.max_duration_s) || cfg.max_duration_s <= 0) {
      throw new ConfigError("max_duration_s must be > 0 when set");
    }
  }
  const ext = cfg.extension_interaction;
  if (!isObject(ext)) {
    throw new ConfigError("extension_interaction must be an object");
  }
  if (!Number.isInteger(ext.max_clicks) || ext.max_clicks < 0) {
    throw new ConfigError("extension_interaction.max_clicks must be >= 0");
  }
  if (!Number.isFinite(ext.max_duration_s) || ext.max_duration_s <= 0) {
    throw new ConfigError("extension_interaction.max_duration_s must be > 0");
  }
  if (!Array.isArray(cfg.wallet_api_table) || cfg.wallet_api_table.length === 0) {
    throw new ConfigError("wallet_api_table must be a non-empty list");
  }
  for (const entry of cfg.wallet_api_table) {
    validateWalletEntry(entry);
  }
  if (typeof cfg.output_dir !== "string" || !cfg.output_dir) {
    throw new ConfigError("output_dir must be a non-empty string");
  }
  if (typeof cfg.landing_page_only !== "boolean") {
    throw new ConfigError("landing_page_only must be a boolean");
  }
  return cfg;
}

function validateWalletEntry(entry: WalletApiEntry): void {
  if (!isObject(entry)) {
    throw new ConfigError("wallet table entries must be objects");
  }
  for (const key of ["wallet_name", "breakpoint_symbol", "simulated_property_path"] as const) {
    if (typeof entry[key] !== "string" || !entry[key]) {
      throw new ConfigError(`wallet table entry field ${key} must be a non-empty string`);
    }
  }
  if (!entry.breakpoint_symbol.startsWith("window.")) {
    throw new ConfigError(
      `breakpoint must live under window.: ${entry.breakpoint_symbol}`,
    );
  }
  if (!entry.simulated_property_path.startsWith(entry.breakpoint_symbol)) {
    throw new ConfigError(
      `simulated property ${entry.simulated_property_path} must extend its breakpoint ${entry.breakpoint_symbol}`,
    );
  }
}

export function validateAutomatorConfig(cfg: AutomatorConfig): AutomatorConfig {
  if (!Array.isArray(cfg.connect_keywords) || cfg.connect_keywords.length === 0) {
    throw new ConfigError("connect_keywords must be a non-empty list");
  }
  if (!Array.isArray(cfg.wallet_keywords) || cfg.wallet_keywords.length === 0) {
    throw new ConfigError("wallet_keywords must be a non-empty list");
  }
  for (const kw of [...cfg.connect_keywords, ...cfg.wallet_keywords]) {
    if (typeof kw !== "string" || !kw.trim()) {
      throw new ConfigError("keywords must be non-blank strings");
    }
  }
  if (!Array.isArray(cfg.blind_click_offsets)) {
    throw new ConfigError("blind_click_offsets must be a list of [dx, dy] pairs");
  }
  for (const pair of cfg.blind_click_offsets) {
    if (
      !Array.isArray(pair) ||
      pair.length !== 2 ||
      !pair.every((n) => Number.isFinite(n))
    ) {
      throw new ConfigError("blind_click_offsets entries must be [dx, dy] number pairs");
    }
  }
  if (typeof cfg.handle_checkboxes !== "boolean") {
    throw new ConfigError("handle_checkboxes must be a boolean");
  }
  return cfg;
}

/** Merge a partial JSON document over the defaults and validate. */
export function collectorConfigFromDoc(doc: unknown): CollectorConfig {
  if (!isObject(doc)) {
    throw new ConfigError("collector config must be a JSON object");
  }
  const base = defaultCollectorConfig();
  const merged: CollectorConfig = {
    ...base,
    ...doc,
    extension_interaction: {
      ...base.extension_interaction,
      ...(isObject(doc["extension_interaction"]) ? doc["extension_interaction"] : {}),
    },
  } as CollectorConfig;
  return validateCollectorConfig(merged);
}

export function automatorConfigFromDoc(doc: unknown): AutomatorConfig {
  if (!isObject(doc)) {
    throw new ConfigError("automator config must be a JSON object");
  }
  const merged = { ...defaultAutomatorConfig(), ...doc } as AutomatorConfig;
  return validateAutomatorConfig(merged);
}

export function loadCollectorConfig(path: string): CollectorConfig {
  return collectorConfigFromDoc(readJson(path));
}

export function loadAutomatorConfig(path: string): AutomatorConfig {
  return automatorConfigFromDoc(readJson(path));
}

export function loadWalletProfile(path: string): WalletProfile {
  const doc = readJson(path);
  if (!isObject(doc)) {
    throw new ConfigError("wallet profile must be a JSON object");
  }
  for (const key of ["profile_id", "passphrase", "password", "address"] as const) {
    if (typeof doc[key] !== "string" || !doc[key]) {
      throw new ConfigError(`wallet profile field ${key} must be a non-empty string`);
    }
  }
  return doc as unknown as WalletProfile;
}

/** Effective capture budget for a visit. */
export function effectiveMaxDurationS(cfg: CollectorConfig, kind: TargetKind): number {
  return cfg.max_duration_s ?? MODE_MAX_DURATION_S[kind];
}
