/**
 * Wallet-trace collector harness: drives instrumented page visits and emits
 * trace bundles (JSONL, one visit per file) for the offline analyzer.
 */

export {
  approvePermissionPopups,
  classifyFailure,
  clickElement,
  connectDapp,
  describeElement,
  findByKeywords,
  normalizeLabel,
  type DappVisitContext,
} from "./automator.js";
export {
  CollectorSession,
  visitIdFor,
  type CollectorSessionOptions,
  type VisitMode,
  type VisitResult,
  type VisitSpec,
} from "./collector.js";
export {
  automatorConfigFromDoc,
  collectorConfigFromDoc,
  effectiveMaxDurationS,
  loadAutomatorConfig,
  loadCollectorConfig,
  loadWalletProfile,
  validateAutomatorConfig,
  validateCollectorConfig,
} from "./config.js";
export {
  DEFAULT_BLIND_CLICK_OFFSETS,
  DEFAULT_CONNECT_KEYWORDS,
  DEFAULT_WALLET_API_TABLE,
  DEFAULT_WALLET_KEYWORDS,
  DEFAULT_WALLET_PROFILE,
  defaultAutomatorConfig,
  defaultCollectorConfig,
  MODE_MAX_DURATION_S,
} from "./defaults.js";
export { interactExtension, type ExtensionInteractionContext } from "./extension.js";
export {
  FixtureServer,
  httpFetch,
  HttpFetchError,
  openPage,
  type FixtureServerOptions,
  type LoadFailure,
  type OpenedPage,
  type OpenOptions,
  type OpenResult,
} from "./host.js";
export {
  installTrafficInterceptor,
  type InterceptorHandle,
  type ResponseStubs,
  type StubResponse,
} from "./interceptor.js";
export { main, parseTargetsFile } from "./cli.js";
export {
  installEnumerationSentinel,
  parseSetCookie,
  VisitRecorder,
} from "./recorder.js";
export { fnv1a32, SeededRng, visitRng } from "./rng.js";
export { InjectionError, WalletSimulator } from "./simulator.js";
export { checkBundle, computeBodyHash, isAbsoluteUrl, writeTraceBundle } from "./traceWriter.js";
export * from "./types.js";
