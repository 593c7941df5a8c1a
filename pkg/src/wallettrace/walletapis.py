"""Wallet-provider API access detection and aggregation.

A small table maps wallet names to the provider objects they inject
(breakpoint roots such as ``window.ethereum``) and the properties a capture
harness simulates. The analyzer marks every call-trace record whose symbol
is one of the four roots, or prefixed by one, as a wallet-API access —
explicit when the access was a direct property read, implicit when it was
observed during window-property enumeration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .origins import PublicSuffixTable, registrable_domain
from .trace import TraceBundle


@dataclass(frozen=True)
class WalletEntry:
    wallet_name: str
    breakpoint_symbol: str
    simulated_property_path: str
    simulated_value: object


@dataclass(frozen=True)
class WalletApiTable:
    entries: tuple[WalletEntry, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("wallet table needs at least one entry")
        for e in self.entries:
            if not e.breakpoint_symbol.startswith("window."):
                raise ValueError(f"breakpoint must live under window.: {e.breakpoint_symbol!r}")
            if not e.simulated_property_path.startswith(e.breakpoint_symbol):
                raise ValueError(
                    f"simulated property {e.simulated_property_path!r} must extend its breakpoint"
                )

    @property
    def roots(self) -> tuple[str, ...]:
        """Distinct breakpoint symbols in first-appearance order."""
        seen: dict[str, None] = {}
        for e in self.entries:
            seen.setdefault(e.breakpoint_symbol, None)
        return tuple(seen)


def default_wallet_api_table() -> WalletApiTable:
    return WalletApiTable(
        entries=(
            WalletEntry("MetaMask", "window.ethereum", "window.ethereum.isMetaMask", True),
            WalletEntry("Coinbase", "window.ethereum", "window.ethereum.isCoinbaseWallet", True),
            WalletEntry("Binance", "window.BinanceChain", "window.BinanceChain.chainId", "0x38"),
            WalletEntry("Phantom", "window.solana", "window.solana.isPhantom", True),
            WalletEntry("Nami", "window.cardano", "window.cardano.nami.name", "Nami Wallet"),
        )
    )


def load_wallet_api_table(path) -> WalletApiTable:
    """Load an override table: a JSON list of entries, each either a
    4-element array in field order or an object keyed by field name."""
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    if not isinstance(doc, list):
        raise ValueError("wallet table file must contain a JSON list")
    entries = []
    for item in doc:
        if isinstance(item, list) and len(item) == 4:
            entries.append(WalletEntry(*item))
        elif isinstance(item, dict):
            entries.append(
                WalletEntry(
                    wallet_name=item["wallet_name"],
                    breakpoint_symbol=item["breakpoint_symbol"],
                    simulated_property_path=item["simulated_property_path"],
                    simulated_value=item["simulated_value"],
                )
            )
        else:
            raise ValueError(f"unrecognized wallet table entry: {item!r}")
    return WalletApiTable(entries=tuple(entries))


@dataclass(frozen=True)
class WalletApiAccess:
    script_url: str
    site_url: str
    root_symbol: str
    full_symbol: str
    mode: str  # "explicit" | "implicit"
    timestamp: float = 0


@dataclass
class ScriptWalletSummary:
    script_url: str
    roots_explicit: list[str] = field(default_factory=list)
    roots_implicit: list[str] = field(default_factory=list)
    sites: set[str] = field(default_factory=set)

    @property
    def classification(self) -> str:
        """'explicit' dominates: any direct access makes the script explicit."""
        return "explicit" if self.roots_explicit else "implicit"


def site_identity(bundle: TraceBundle, psl: PublicSuffixTable) -> str:
    """The site's eTLD+1 for website/dapp targets, the extension id verbatim
    for extension targets."""
    if bundle.target.kind == "extension":
        return bundle.target.url
    return registrable_domain(bundle.target.url, psl)


def detect_wallet_calls(bundle: TraceBundle, table: WalletApiTable) -> list[WalletApiAccess]:
    """One access per ApiCallRecord whose symbol is, or extends, a
    breakpoint root; everything else is ignored."""
    roots = table.roots
    out: list[WalletApiAccess] = []
    for rec in bundle.api_calls:
        for root in roots:
            if rec.symbol == root or rec.symbol.startswith(root + "."):
                out.append(
                    WalletApiAccess(
                        script_url=rec.script_url,
                        site_url=bundle.target.url,
                        root_symbol=root,
                        full_symbol=rec.symbol,
                        mode="explicit" if rec.access_mode == "direct" else "implicit",
                        timestamp=rec.timestamp,
                    )
                )
                break  # roots don't prefix one another: at most one matches
    return out


def summarize_script(
    accesses: list[WalletApiAccess],
    psl: PublicSuffixTable | None = None,
    site_ids: dict[str, str] | None = None,
) -> ScriptWalletSummary:
    """Summarize one script's accesses (all sharing script_url), keeping
    roots in first-access order, deduplicated, explicit and implicit apart.

    Sites are recorded as eTLD+1 when a suffix table is given; ``site_ids``
    can pre-map site_url → identity (used for extension targets).
    """
    if not accesses:
        raise ValueError("summarize_script needs at least one access")
    urls = {a.script_url for a in accesses}
    if len(urls) > 1:
        raise ValueError(f"accesses span multiple scripts: {sorted(urls)}")
    summary = ScriptWalletSummary(script_url=accesses[0].script_url)
    for a in accesses:
        target = summary.roots_explicit if a.mode == "explicit" else summary.roots_implicit
        if a.root_symbol not in target:
            target.append(a.root_symbol)
        if site_ids is not None and a.site_url in site_ids:
            summary.sites.add(site_ids[a.site_url])
        elif psl is not None:
            summary.sites.add(registrable_domain(a.site_url, psl))
        else:
            summary.sites.add(a.site_url)
    return summary


def summarize_scripts(
    accesses: list[WalletApiAccess],
    psl: PublicSuffixTable | None = None,
    site_ids: dict[str, str] | None = None,
) -> dict[str, ScriptWalletSummary]:
    """Group accesses by script_url (preserving first-appearance order of
    scripts and the given access order within each) and summarize each."""
    grouped: dict[str, list[WalletApiAccess]] = {}
    for a in accesses:
        grouped.setdefault(a.script_url, []).append(a)
    return {url: summarize_script(group, psl, site_ids) for url, group in grouped.items()}


def combination_histogram(summaries) -> dict[tuple[str, ...], int]:
    """Count scripts per ordered explicit-root combination.

    Keys preserve first-access order, so ("window.ethereum",
    "window.BinanceChain") and the reverse are distinct combinations.
    Scripts without explicit accesses don't contribute; counts sum to the
    number of explicit scripts.
    """
    if isinstance(summaries, dict):
        summaries = summaries.values()
    hist: dict[tuple[str, ...], int] = {}
    for s in summaries:
        if s.roots_explicit:
            key = tuple(s.roots_explicit)
            hist[key] = hist.get(key, 0) + 1
    return hist
