"""Offline analysis of wallet-API probing and wallet-secret exfiltration
in recorded browser trace bundles.

The package consumes trace bundles (JSONL, one visit per file) produced by
an instrumented-browser collector and answers two questions offline:

* which scripts probe for crypto-wallet APIs (``window.ethereum`` & co.),
  explicitly or by window-property enumeration, and which of them also
  perform browser fingerprinting;
* where wallet secrets (addresses, the wallet password, visited hostnames)
  leave the browser — across GET/POST/WebSocket/cookie channels, plain or
  wrapped in up to three layers of encodings and digests.

Reports are deterministic: same corpus + config ⇒ byte-identical output.
"""

__version__ = "0.1.0"

from .fingerprint import (
    ClassifierConfig,
    FingerprintPattern,
    FingerprintVerdict,
    classify_script,
    corpus_fingerprint_stats,
    default_classifier_config,
    glob_match,
)
from .filterlists import (
    FilterList,
    FilterRule,
    evaluate_blocklists,
    load_filter_list,
    parse_adblock_list,
    parse_domain_json,
    url_blocked,
)
from .leaks import (
    LeakFinding,
    Secret,
    SecretProfile,
    TermIndex,
    build_term_index,
    load_secret_profile,
    scan_bundle,
    scan_payload,
    tokenize,
)
from .origins import (
    PublicSuffixTable,
    is_third_party,
    load_public_suffix_list,
    parse_public_suffix_list,
    registrable_domain,
    registrable_domain_of_host,
    resolve_candidate_url,
)
from .report import (
    CorpusError,
    ManifestFinding,
    ScriptCluster,
    analyze_corpus,
    analyze_manifest,
    cluster_scripts,
    flag_path_pattern,
    render_leak_csv,
    render_report_json,
    run_pipeline,
)
from .trace import (
    TraceBundle,
    TraceError,
    TraceParseError,
    TraceValidationError,
    compute_body_hash,
    load_trace_bundle,
    parse_trace_bundle,
    validate_bundle,
    write_trace_bundle,
)
from .transforms import TransformSet, apply_chain, apply_transform, canonical_variants
from .walletapis import (
    WalletApiAccess,
    WalletApiTable,
    combination_histogram,
    default_wallet_api_table,
    detect_wallet_calls,
    site_identity,
    summarize_scripts,
)

__all__ = [name for name in dir() if not name.startswith("_")]
