/**
 * Built-in defaults: the simulated wallet-property table, the automator's
 * label lists, and the stock collector/automator configs.
 */

import type {
  AutomatorConfig,
  CollectorConfig,
  WalletApiEntry,
  WalletProfile,
} from "./types.js";

/** Properties the simulator plants before any site script runs. One row per
 * simulated wallet; four distinct root objects. Keep in sync with the
 * analyzer's default table (same five rows, same values). */
export const DEFAULT_WALLET_API_TABLE: WalletApiEntry[] = [
  {
    wallet_name: "MetaMask",
    breakpoint_symbol: "window.ethereum",
    simulated_property_path: "window.ethereum.isMetaMask",
    simulated_value: true,
  },
  {
    wallet_name: "Coinbase",
    breakpoint_symbol: "window.ethereum",
    simulated_property_path: "window.ethereum.isCoinbaseWallet",
    simulated_value: true,
  },
  {
    wallet_name: "Binance",
    breakpoint_symbol: "window.BinanceChain",
    simulated_property_path: "window.BinanceChain.chainId",
    simulated_value: "0x38",
  },
  {
    wallet_name: "Phantom",
    breakpoint_symbol: "window.solana",
    simulated_property_path: "window.solana.isPhantom",
    simulated_value: true,
  },
  {
    wallet_name: "Nami",
    breakpoint_symbol: "window.cardano",
    simulated_property_path: "window.cardano.nami.name",
    simulated_value: "Nami Wallet",
  },
];

/** Labels the automator treats as a connect/sign-in control. The list is
 * deliberately broad and enumerates case variants because matching is exact
 * and case-sensitive; overfiring is handled by the outcome taxonomy. */
export const DEFAULT_CONNECT_KEYWORDS: string[] = [
  "Connect to MetaMask",
  " Connect Wallet ",
  "Connect Wallet",
  "Connect wallet",
  "connect wallet",
  "Connect to a wallet",
  "Connect to wallet",
  "Connect your wallet",
  "Sign In",
  "Connect",
  "CONNECT WALLET",
  "CONNECT",
  "SIGN IN",
  "WALLET",
  "SIGN",
  "sign",
  "SIGNIN",
  "Sign Up",
  "Connect Your Wallet",
  "Wallet",
  "Connect a Wallet",
  "Connect a wallet",
  "Sign in",
  "sign in",
  "connect",
  "Log in via web3 wallet",
  "wallet",
  "account",
  "Account",
];

/** Labels that pick the simulated browser wallet inside a wallet-select
 * modal. */
export const DEFAULT_WALLET_KEYWORDS: string[] = [
  "MetaMask",
  "MetaMask ",
  "metamask",
  "Connect Metamask",
  "Connect MetaMask",
  "Metamask",
  "Connect to MetaMask",
  "browser wallet",
  "Browser Wallet",
  "Browser wallet",
  "Metamask & Web3",
];

/** Blind-click fallback schedule: pixel offsets from the window center,
 * 100 px to the bottom right then 50 px to the top left. The schedule is
 * plain config data; extend it per deployment as needed. */
export const DEFAULT_BLIND_CLICK_OFFSETS: Array<[number, number]> = [
  [100, 100],
  [-50, -50],
];

/** Capture budget by target kind, seconds. */
export const MODE_MAX_DURATION_S = {
  website: 60,
  dapp: 30,
  extension: 60,
} as const;

export const DEFAULT_EXTENSION_MAX_CLICKS = 10;
export const DEFAULT_EXTENSION_MAX_DURATION_S = 60;

/** Fixed wallet identity the simulator presents. Kept as data (not code) so
 * deployments can import their own wallet profile file. */
export const DEFAULT_WALLET_PROFILE: WalletProfile = {
  profile_id: "sim-wallet-01",
  passphrase:
    "gravity canyon velvet oppose sibling sunny mule sketch ladder vault orbit tissue",
  password: "collector-fixture-password",
  address: "0x7e4ABd63A7C8314Cc28D388303472353D884f292",
};

export function defaultCollectorConfig(): CollectorConfig {
  return {
    max_duration_s: null,
    extension_interaction: {
      max_clicks: DEFAULT_EXTENSION_MAX_CLICKS,
      max_duration_s: DEFAULT_EXTENSION_MAX_DURATION_S,
    },
    landing_page_only: true,
    wallet_api_table: DEFAULT_WALLET_API_TABLE.map((e) => ({ ...e })),
    output_dir: "traces",
  };
}

export function defaultAutomatorConfig(): AutomatorConfig {
  return {
    connect_keywords: [...DEFAULT_CONNECT_KEYWORDS],
    wallet_keywords: [...DEFAULT_WALLET_KEYWORDS],
    blind_click_offsets: DEFAULT_BLIND_CLICK_OFFSETS.map(
      ([dx, dy]) => [dx, dy] as [number, number],
    ),
    handle_checkboxes: true,
  };
}
