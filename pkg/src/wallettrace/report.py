"""Corpus-level aggregation: orchestrates parsing, wallet-API analysis,
fingerprint classification, leak scanning, script clustering, and optional
blocklist-efficacy evaluation over a directory of trace bundles, then
renders deterministic JSON/CSV reports.

Determinism contract: identical corpus + configuration produce byte-identical
output regardless of worker count or run count. Bundles are processed in
sorted-path order, every list in the report is sorted by a documented key,
JSON is emitted with sorted keys, and no wall-clock data enters the report.

The category rollup's fraction is sites_with_third_party_wallet_calls /
sites_in_category (both counts are included verbatim so the base is never
ambiguous).
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from urllib.parse import urlsplit

from .filterlists import BlocklistReport, evaluate_blocklists
from .fingerprint import (
    ClassifierConfig,
    classify_script,
    corpus_fingerprint_stats,
    default_classifier_config,
)
from .leaks import SecretProfile, TermIndex, build_term_index, scan_bundle
from .origins import PublicSuffixTable, is_third_party, registrable_domain
from .trace import ScriptRecord, TraceBundle, TraceError, is_absolute_url, load_trace_bundle
from .transforms import TransformSet
from .walletapis import (
    WalletApiTable,
    combination_histogram,
    default_wallet_api_table,
    detect_wallet_calls,
    site_identity,
    summarize_scripts,
)

SENSITIVE_PERMISSIONS = frozenset({"history", "tabs", "activeTab"})
EVERYWHERE_PATTERNS = frozenset({"http://*/*", "https://*/*", "<all_urls>", "*://*/*"})
UNKNOWN_CATEGORY = "unknown"
UNCATEGORIZED = "uncategorized"


class CorpusError(ValueError):
    pass


# ---------------------------------------------------------------- mappings


def load_tp_categories(path=None) -> dict[str, str]:
    """domain,category CSV mapping third parties to their role (JSON-RPC
    Provider / Tracking & Analytics / ...). The packaged default covers the
    well-known providers; unknown domains report as "unknown"."""
    if path is None:
        text = resources.files("wallettrace").joinpath("data/tp_categories.csv").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    return _parse_two_column_csv(text)


def load_site_categories(path) -> dict[str, str]:
    """site,category CSV for the per-category rollup."""
    with open(path, encoding="utf-8") as f:
        return _parse_two_column_csv(f.read())


def _parse_two_column_csv(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for row in csv.reader(io.StringIO(text)):
        if not row or row[0].lstrip().startswith("#"):
            continue
        if len(row) < 2:
            raise CorpusError(f"mapping rows need two columns, got {row!r}")
        out[row[0].strip().lower()] = row[1].strip()
    return out


def load_exclusions(path) -> frozenset[str]:
    """One domain per line; '#' comments."""
    out = set()
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                out.add(line.lower())
    return frozenset(out)


# ------------------------------------------------------- corpus-level ops


@dataclass(frozen=True)
class ScriptCluster:
    body_hash: str
    members: tuple[str, ...]  # distinct script URLs, sorted
    site_count: int  # distinct registrable domains hosting members


def cluster_scripts(scripts: list[ScriptRecord], psl: PublicSuffixTable) -> list[ScriptCluster]:
    """Group scripts sharing identical code (same body hash); singleton
    hashes are omitted. Sorted by descending site count, then hash."""
    by_hash: dict[str, set[str]] = {}
    for rec in scripts:
        by_hash.setdefault(rec.body_hash, set()).add(rec.script_url)
    clusters = []
    for body_hash, urls in by_hash.items():
        if len(urls) < 2:
            continue
        domains = {
            registrable_domain(u, psl) if is_absolute_url(u) else u for u in urls
        }
        clusters.append(ScriptCluster(body_hash, tuple(sorted(urls)), len(domains)))
    clusters.sort(key=lambda c: (-c.site_count, c.body_hash))
    return clusters


def flag_path_pattern(scripts: list[ScriptRecord], needle: str) -> list[str]:
    """Script URLs whose URL *path component* contains the needle (query
    strings don't count)."""
    if not needle:
        raise ValueError("needle must be non-empty")
    out: dict[str, None] = {}
    for rec in scripts:
        if is_absolute_url(rec.script_url) and needle in urlsplit(rec.script_url).path:
            out.setdefault(rec.script_url)
    return sorted(out)


@dataclass(frozen=True)
class ManifestFinding:
    extension_id: str
    injects_everywhere: bool
    sensitive_permissions: tuple[str, ...]  # subset of {history, tabs, activeTab}
    content_script_matches: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "extension_id": self.extension_id,
            "injects_everywhere": self.injects_everywhere,
            "sensitive_permissions": list(self.sensitive_permissions),
            "content_script_matches": list(self.content_script_matches),
        }


def analyze_manifest(manifest, extension_id: str = "unknown") -> ManifestFinding:
    """Extension-manifest capability analysis.

    ``manifest`` is a JSON text/bytes or an already-parsed document.
    injects_everywhere is true iff any content-script match pattern grants
    all sites; sensitive permissions are scanned in both ``permissions``
    and ``optional_permissions``. Malformed JSON raises
    ``json.JSONDecodeError`` (which names the offending offset).
    """
    if isinstance(manifest, (str, bytes)):
        manifest = json.loads(manifest)
    if not isinstance(manifest, dict):
        raise ValueError("manifest document must be a JSON object")

    matches: dict[str, None] = {}
    for block in manifest.get("content_scripts") or []:
        if isinstance(block, dict):
            for pattern in block.get("matches") or []:
                if isinstance(pattern, str):
                    matches.setdefault(pattern)

    granted: set[str] = set()
    for key in ("permissions", "optional_permissions"):
        for perm in manifest.get(key) or []:
            if isinstance(perm, str):
                granted.add(perm)

    return ManifestFinding(
        extension_id=extension_id,
        injects_everywhere=any(p in EVERYWHERE_PATTERNS for p in matches),
        sensitive_permissions=tuple(sorted(granted & SENSITIVE_PERMISSIONS)),
        content_script_matches=tuple(matches),
    )


# ----------------------------------------------------------- the pipeline

_LEAK_CHANNEL_KEYS = {
    "get_param": "get_param",
    "post_body": "post_body",
    "ws_payload": "ws_payload",
    "cookie_name": "cookie",
    "cookie_value": "cookie",
}


def _fraction_dict(f: Fraction) -> dict:
    return {"numerator": f.numerator, "denominator": f.denominator, "value": float(f)}


def _script_domain(script_url: str, psl: PublicSuffixTable) -> str:
    return registrable_domain(script_url, psl) if is_absolute_url(script_url) else script_url


def _is_third_party_script(script_url: str, bundle: TraceBundle, psl: PublicSuffixTable) -> bool:
    if not is_absolute_url(script_url):
        return False
    if bundle.target.kind == "extension":
        return True  # any remote script is foreign to an extension
    return is_third_party(script_url, bundle.target.url, psl).is_third_party


def analyze_corpus(
    paths,
    *,
    psl: PublicSuffixTable,
    profile: SecretProfile | None = None,
    transforms: TransformSet | None = None,
    wallet_table: WalletApiTable | None = None,
    classifier: ClassifierConfig | None = None,
    site_categories: dict[str, str] | None = None,
    tp_categories: dict[str, str] | None = None,
    blocklists=(),
    exclusions: frozenset[str] = frozenset(),
    workers: int = 1,
) -> dict:
    """Analyze trace bundles at ``paths`` and build the corpus report dict.

    Bundles are fanned out to ``workers`` threads; aggregation happens
    single-threaded in sorted-path order, so the result is byte-identical
    for any worker count. Unreadable/invalid bundles become diagnostics,
    never abort the run.
    """
    paths = sorted(str(p) for p in paths)
    if not paths:
        raise CorpusError("empty corpus")
    transforms = transforms or TransformSet()
    wallet_table = wallet_table or default_wallet_api_table()
    classifier = classifier or default_classifier_config()
    if tp_categories is None:
        tp_categories = load_tp_categories()
    site_categories = site_categories or {}
    index: TermIndex | None = build_term_index(profile, transforms) if profile else None

    def analyze_one(path: str):
        try:
            bundle = load_trace_bundle(path)
        except (TraceError, OSError, UnicodeDecodeError) as e:
            return path, None, None, None, f"{type(e).__name__}: {e}"
        accesses = detect_wallet_calls(bundle, wallet_table)
        findings = scan_bundle(bundle, index, transforms, psl) if index else []
        return path, bundle, accesses, findings, None

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(analyze_one, paths))
    else:
        results = [analyze_one(p) for p in paths]

    skipped = []
    site_ids: dict[str, str] = {}  # target url -> site identity
    category_of_site: dict[str, str] = {}
    rank_of_site: dict[str, int | None] = {}
    all_accesses = []
    # (site, script_domain) -> row state
    cells: dict[tuple[str, str], dict] = {}
    tp_domain_scripts: dict[str, set[str]] = {}  # script domain -> script urls
    script_symbols: dict[str, dict[str, None]] = {}
    all_scripts: list[ScriptRecord] = []
    all_findings = []
    leak_per_site: dict[str, dict[str, int]] = {}
    leak_per_receiver: dict[str, dict] = {}

    analyzed = 0
    for path, bundle, accesses, findings, error in results:
        if error is not None:
            skipped.append({"path": path, "error": error})
            continue
        analyzed += 1
        site = site_identity(bundle, psl)
        site_ids[bundle.target.url] = site
        category = site_categories.get(
            site, bundle.target.category or UNCATEGORIZED
        )
        category_of_site.setdefault(site, category)
        rank = bundle.target.rank
        prior = rank_of_site.get(site)
        if prior is None or (rank is not None and rank < prior):
            rank_of_site[site] = rank
        all_scripts.extend(bundle.scripts)

        for rec in bundle.api_calls:
            script_symbols.setdefault(rec.script_url, {}).setdefault(rec.symbol)

        all_accesses.extend(accesses)
        for access in accesses:
            sdomain = _script_domain(access.script_url, psl)
            third_party = _is_third_party_script(access.script_url, bundle, psl)
            cell = cells.setdefault(
                (site, sdomain),
                {"roots": [], "explicit": False, "third_party": third_party},
            )
            if access.root_symbol not in cell["roots"]:
                cell["roots"].append(access.root_symbol)
            if access.mode == "explicit":
                cell["explicit"] = True
            if third_party:
                tp_domain_scripts.setdefault(sdomain, set()).add(access.script_url)

        for finding in findings:
            all_findings.append(finding)
            chan = _LEAK_CHANNEL_KEYS[finding.channel]
            per_site = leak_per_site.setdefault(
                site, {"get_param": 0, "post_body": 0, "ws_payload": 0, "cookie": 0}
            )
            per_site[chan] += 1
            recv = leak_per_receiver.setdefault(
                finding.receiver, {"count": 0, "secrets": set()}
            )
            recv["count"] += 1
            recv["secrets"].add(finding.secret_id)

    # ---- wallet tables
    summaries = summarize_scripts(all_accesses, psl=psl, site_ids=site_ids)
    histogram = combination_histogram(summaries)
    wallet_call_sites = [
        {
            "site": site,
            "script_domain": sdomain,
            "roots": list(cell["roots"]),
            "mode": "explicit" if cell["explicit"] else "implicit",
            "third_party": cell["third_party"],
            "rank": rank_of_site.get(site),
        }
        for (site, sdomain), cell in cells.items()
    ]
    wallet_call_sites.sort(
        key=lambda r: (r["rank"] is None, r["rank"], r["site"], r["script_domain"])
    )

    # ---- per-category rollup
    sites_in_category: dict[str, set[str]] = {}
    for s, cat in category_of_site.items():
        sites_in_category.setdefault(cat, set()).add(s)
    tp_sites_of_domain_by_cat: dict[str, dict[str, set[str]]] = {}
    tp_sites_by_cat: dict[str, set[str]] = {}
    for (site, sdomain), cell in cells.items():
        if not cell["third_party"]:
            continue
        cat = category_of_site[site]
        tp_sites_by_cat.setdefault(cat, set()).add(site)
        tp_sites_of_domain_by_cat.setdefault(cat, {}).setdefault(sdomain, set()).add(site)
    category_rollup = []
    for cat in sorted(sites_in_category):
        members = sites_in_category[cat]
        with_tp = tp_sites_by_cat.get(cat, set())
        frac = Fraction(len(with_tp), len(members)) if members else Fraction(0)
        if with_tp:
            top_site = min(
                with_tp,
                key=lambda s: (rank_of_site.get(s) is None, rank_of_site.get(s) or 0, s),
            )
        else:
            top_site = None
        domains = tp_sites_of_domain_by_cat.get(cat, {})
        top_third_party = (
            min(domains, key=lambda d: (-len(domains[d]), d)) if domains else None
        )
        category_rollup.append(
            {
                "category": cat,
                "sites": len(members),
                "sites_with_third_party_wallet_calls": len(with_tp),
                "third_party_call_fraction": _fraction_dict(frac),
                "top_site": top_site,
                "top_third_party": top_third_party,
            }
        )

    # ---- fingerprinting
    verdicts = [
        classify_script(url, list(symbols), classifier)
        for url, symbols in script_symbols.items()
    ]
    stats = corpus_fingerprint_stats(verdicts)
    flagged_urls = set(stats.flagged_scripts)

    # ---- per-third-party rollup
    tp_rollup_state: dict[str, dict] = {}
    for (site, sdomain), cell in cells.items():
        if not cell["third_party"]:
            continue
        row = tp_rollup_state.setdefault(
            sdomain, {"explicit": False, "sites": set(), "min_rank": None}
        )
        row["explicit"] = row["explicit"] or cell["explicit"]
        row["sites"].add(site)
        rank = rank_of_site.get(site)
        if rank is not None and (row["min_rank"] is None or rank < row["min_rank"]):
            row["min_rank"] = rank
    third_party_rollup = [
        {
            "script_domain": sdomain,
            "mode": "explicit" if row["explicit"] else "implicit",
            "site_count": len(row["sites"]),
            "min_rank": row["min_rank"],
            "fingerprinting": bool(tp_domain_scripts.get(sdomain, set()) & flagged_urls),
        }
        for sdomain, row in tp_rollup_state.items()
    ]
    third_party_rollup.sort(key=lambda r: (-r["site_count"], r["script_domain"]))

    # ---- leaks
    leak_findings = [f.to_dict() for f in all_findings]
    per_receiver = [
        {
            "receiver": receiver,
            "count": row["count"],
            "category": tp_categories.get(receiver, UNKNOWN_CATEGORY),
            "secrets": sorted(row["secrets"]),
        }
        for receiver, row in leak_per_receiver.items()
    ]
    per_receiver.sort(key=lambda r: (-r["count"], r["receiver"]))
    leak_rollup = {
        "per_site": {site: dict(chans) for site, chans in sorted(leak_per_site.items())},
        "per_receiver": per_receiver,
    }

    # ---- blocklist efficacy over third-party wallet-calling domains
    efficacy = None
    if blocklists:
        universe = sorted(set(tp_domain_scripts) - set(exclusions))
        blocked = evaluate_blocklists(universe, blocklists)
        efficacy = {
            "universe": list(blocked.universe),
            "universe_size": len(blocked.universe),
            "lists": {
                name: {
                    "blocked": sorted(blocked.per_list[name]),
                    **_fraction_dict(blocked.fraction(name)),
                }
                for name in sorted(blocked.per_list)
            },
            "combined": {
                "blocked": sorted(blocked.combined),
                **_fraction_dict(blocked.combined_fraction),
            },
        }

    clusters = [
        {"body_hash": c.body_hash, "members": list(c.members), "site_count": c.site_count}
        for c in cluster_scripts(all_scripts, psl)
    ]

    return {
        "meta": {
            "bundles": len(paths),
            "bundles_analyzed": analyzed,
            "sites": len(category_of_site),
        },
        "wallet_call_sites": wallet_call_sites,
        "combination_histogram": {
            ",".join(key): count for key, count in histogram.items()
        },
        "category_rollup": category_rollup,
        "third_party_rollup": third_party_rollup,
        "fingerprint_stats": {
            "flagged_count": stats.flagged_count,
            "mean_categories": stats.mean_categories,
            "max_categories": stats.max_categories,
            "flagged_scripts": list(stats.flagged_scripts),
        },
        "leak_findings": leak_findings,
        "leak_rollup": leak_rollup,
        "efficacy": efficacy,
        "clusters": clusters,
        "manifest_findings": [],
        "diagnostics": {"bundles_analyzed": analyzed, "bundles_skipped": skipped},
    }


def run_pipeline(corpus_dir, **kwargs) -> dict:
    """analyze_corpus over every ``*.jsonl`` file in a directory."""
    try:
        names = os.listdir(corpus_dir)
    except OSError as e:
        raise CorpusError(f"unreadable corpus directory: {e}") from None
    paths = [os.path.join(corpus_dir, n) for n in sorted(names) if n.endswith(".jsonl")]
    if not paths:
        raise CorpusError("empty corpus")
    return analyze_corpus(paths, **kwargs)


# ------------------------------------------------------------- rendering


def render_report_json(report: dict) -> bytes:
    return (json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode(
        "utf-8"
    )


_LEAK_CSV_COLUMNS = (
    "visit_id",
    "secret_id",
    "channel",
    "receiver",
    "chain",
    "record_index",
    "offset",
    "evidence",
)


def render_leak_csv(leak_findings: list[dict]) -> bytes:
    """RFC 4180 CSV (CRLF line endings, minimal quoting)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(_LEAK_CSV_COLUMNS)
    for row in leak_findings:
        writer.writerow(
            [
                row["visit_id"],
                row["secret_id"],
                row["channel"],
                row["receiver"],
                "|".join(row["chain"]),
                row["record_index"],
                row["offset"],
                row["evidence"],
            ]
        )
    return buf.getvalue().encode("utf-8")


def render_wallet_csv(wallet_call_sites: list[dict]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(["site", "script_domain", "roots", "mode", "third_party", "rank"])
    for row in wallet_call_sites:
        writer.writerow(
            [
                row["site"],
                row["script_domain"],
                "|".join(row["roots"]),
                row["mode"],
                str(row["third_party"]).lower(),
                "" if row["rank"] is None else row["rank"],
            ]
        )
    return buf.getvalue().encode("utf-8")
