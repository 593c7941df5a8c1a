"""Deterministic synthetic trace corpora.

Two generators shaped like real capture output:

* :func:`build_synthetic_corpus` — a small multi-site corpus exercising
  every analysis (explicit/implicit wallet probes with order-sensitive
  combinations, a fingerprinting script and a below-threshold twin, script
  clusters, and planted leaks across all channels/encodings), returning the
  ground truth established by construction;
* :func:`build_throughput_bundle` — one bulk bundle with many large
  payloads and a handful of planted encoded leaks, for performance tests.

Everything derives from a seeded RNG and fixed template data: same
arguments, byte-identical corpus.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass

from .trace import (
    ApiCallRecord,
    CaptureMeta,
    CookieRecord,
    NetworkRecord,
    ScriptRecord,
    TargetDescriptor,
    TraceBundle,
    compute_body_hash,
    write_trace_bundle,
)
from .transforms import apply_chain

DEFAULT_ADDRESS = "0x7e4ABd63A7C8314Cc28D388303472353D884f292"
DEFAULT_PASSWORD = "p@ss w0rd+!"

_VOCAB = (
    "ledger", "swap", "pool", "stake", "yield", "vault", "oracle", "bridge",
    "mint", "burn", "claim", "round", "epoch", "quote", "price", "depth",
    "batch", "nonce", "block", "chain", "token", "asset", "index", "route",
    "limit", "order", "trade", "spot", "perp", "margin", "tick", "candle",
)

_FP_SYMBOLS = (
    # 12 categories, three of them explicit (Battery, Plugins, Device).
    "window.ethereum",                       # Wallet
    "window.localStorage.getItem",           # Storage
    "window.screen.width",                   # ScreenSize
    "window.document.cookie",                # Cookies
    "window.Intl.DateTimeFormat",            # DateTime
    "window.navigator.getBattery",           # Battery (explicit)
    "window.innerHeight",                    # WindowSize
    "window.navigator.connection.type",      # Connection
    "window.devicePixelRatio",               # ScreenResolution
    "window.navigator.plugins",              # Plugins (explicit)
    "window.navigator.userAgent",            # Browser
    "window.navigator.hardwareConcurrency",  # Device (explicit)
)

_LIGHT_SYMBOLS = (
    # 9 categories with one explicit: stays under the 10-category bar.
    "window.localStorage.getItem",
    "window.screen.width",
    "window.document.cookie",
    "window.Intl.DateTimeFormat",
    "window.navigator.getBattery",
    "window.innerHeight",
    "window.navigator.connection.type",
    "window.navigator.userAgent",
    "window.navigator.language",
)

_BENIGN_SYMBOLS = (
    "window.location.href",
    "window.document.title",
    "window.history.length",
)

_PROBE_JS = "https://cdn.walletprobe.test/w/probe.js"
_COLLECT_JS = "https://metrics.chainstat.test/collect.js"
_DEX_JS = "https://static.dexhelper.test/js/dex.js"
_SOL_JS = "https://probe.solwatch.test/sol.js"
_FP_JS = "https://fp.trackzone.test/fp.js"
_LIGHT_JS = "https://fp.trackzone.test/light.js"

_TRIO_BODY = b"(function(){var w=window;w.__probe=1;})();"
_PAIR_BODY = b"!function(){try{window.__dup=true}catch(e){}}();"


@dataclass(frozen=True)
class PlantedLeak:
    visit_id: str
    secret_id: str
    channel: str
    receiver: str
    chain: tuple[str, ...]
    record_index: int


@dataclass(frozen=True)
class SyntheticTruth:
    histogram: dict[tuple[str, ...], int]
    flagged_scripts: tuple[str, ...]
    cluster_site_counts: tuple[int, ...]
    planted_leaks: tuple[PlantedLeak, ...]
    secrets: dict[str, str]


def default_profile_doc(hostname: str = "dapp-011.test") -> dict:
    return {
        "profile_id": "profile-001",
        "secrets": [
            {"id": "w1", "kind": "wallet_address", "value": DEFAULT_ADDRESS},
            {"id": "p1", "kind": "password", "value": DEFAULT_PASSWORD},
            {"id": "h1", "kind": "hostname", "value": hostname},
        ],
    }


def write_profile(path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def _meta(kind: str) -> CaptureMeta:
    return CaptureMeta(
        capture_started_at="2026-01-01T00:00:00Z",
        max_duration_s=60 if kind != "dapp" else 30,
        pages_visited=[],
        wallet_profile_id="profile-001",
    )


def build_synthetic_corpus(out_dir, n_bundles: int = 20, seed: int = 7) -> SyntheticTruth:
    """Write ``n_bundles`` bundle files into ``out_dir`` and return the
    ground truth created along the way. Sites are ``dapp-XXX.test``; the
    last bundle (when n ≥ 2) is an extension target."""
    os.makedirs(out_dir, exist_ok=True)
    rng = random.Random(seed)
    addr_lower = DEFAULT_ADDRESS.lower()

    script_roots: dict[str, list[str]] = {}  # explicit roots, first-access order
    flagged: list[str] = []
    planted: list[PlantedLeak] = []
    cluster_bodies: dict[str, set[str]] = {}

    def note_explicit(url: str, root: str) -> None:
        roots = script_roots.setdefault(url, [])
        if root not in roots:
            roots.append(root)

    for i in range(n_bundles):
        visit_id = f"visit-{i:03d}"
        is_extension = n_bundles >= 2 and i == n_bundles - 1
        host = f"dapp-{i:03d}.test"
        if is_extension:
            target = TargetDescriptor(kind="extension", url="abcdefghijklmnopabcdefghijklmnop")
        else:
            kind = "dapp" if i % 2 else "website"
            category = ("defi", "exchange", "nft", None)[i % 4]
            target = TargetDescriptor(
                kind=kind, url=f"https://{host}/", rank=i + 1, category=category
            )

        api_calls: list[ApiCallRecord] = []
        requests: list[NetworkRecord] = []
        cookies: list[CookieRecord] = []
        scripts: list[ScriptRecord] = []
        ts = 0.0

        def call(url: str, symbol: str, mode: str = "direct") -> None:
            nonlocal ts
            ts += float(rng.randint(1, 9))
            api_calls.append(
                ApiCallRecord(script_url=url, symbol=symbol, access_mode=mode, timestamp=ts)
            )

        def request(**kw) -> int:
            nonlocal ts
            ts += float(rng.randint(1, 9))
            requests.append(NetworkRecord(timestamp=ts, **kw))
            return len(requests) - 1

        # First-party activity plus a benign first-party script.
        app_js = f"https://{host}/js/app.js" if not is_extension else _PROBE_JS
        if not is_extension:
            for sym in _BENIGN_SYMBOLS:
                call(app_js, sym)
            body = f"console.log('boot {i}');".encode()
            scripts.append(ScriptRecord(app_js, compute_body_hash(body), body))
            request(kind="http_get", url=f"https://{host}/assets/app.css")

        # Wallet-probing third parties.
        if is_extension or i % 2 == 0:
            call(_PROBE_JS, "window.ethereum.isMetaMask")
            note_explicit(_PROBE_JS, "window.ethereum")
            request(kind="http_get", url=_PROBE_JS + "?v=3", initiator_url=app_js)
        if not is_extension and i % 4 == 1:
            call(_COLLECT_JS, "window.ethereum")
            call(_COLLECT_JS, "window.BinanceChain.chainId")
            note_explicit(_COLLECT_JS, "window.ethereum")
            note_explicit(_COLLECT_JS, "window.BinanceChain")
        if not is_extension and i % 4 == 3:
            call(_DEX_JS, "window.BinanceChain.chainId")
            call(_DEX_JS, "window.ethereum")
            note_explicit(_DEX_JS, "window.BinanceChain")
            note_explicit(_DEX_JS, "window.ethereum")
        if not is_extension and i in (2, 10):
            for root in ("window.ethereum", "window.BinanceChain", "window.solana", "window.cardano"):
                call(_SOL_JS, root, mode="enumeration")
        if not is_extension and i in (4, 8, 12):
            for sym in _FP_SYMBOLS:
                call(_FP_JS, sym)
            note_explicit(_FP_JS, "window.ethereum")
            if _FP_JS not in flagged:
                flagged.append(_FP_JS)
        if not is_extension and i in (6, 14):
            for sym in _LIGHT_SYMBOLS:
                call(_LIGHT_JS, sym)

        # Script-code clusters: one body on three domains, one on two.
        if not is_extension and i in (0, 1, 2):
            url = f"https://cdn.pix-{'abc'[i]}.test/t.js"
            scripts.append(ScriptRecord(url, compute_body_hash(_TRIO_BODY), _TRIO_BODY))
            cluster_bodies.setdefault(compute_body_hash(_TRIO_BODY), set()).add(url)
        if not is_extension and i in (3, 4):
            url = ("https://static.dupe-one.test/lib.js", "https://assets.dupe-two.test/lib.js")[i - 3]
            scripts.append(ScriptRecord(url, compute_body_hash(_PAIR_BODY), _PAIR_BODY))
            cluster_bodies.setdefault(compute_body_hash(_PAIR_BODY), set()).add(url)

        # Benign traffic and cookies.
        if not is_extension:
            words = " ".join(rng.choices(_VOCAB, k=24))
            request(
                kind="http_post",
                url=f"https://api.{host}/v1/events",
                post_body=words.encode(),
                initiator_url=app_js,
            )
            cookies.append(
                CookieRecord(
                    name="sess",
                    value="".join(rng.choices("abcdefghij0123456789", k=12)),
                    domain=host,
                    source="header",
                    timestamp=ts,
                )
            )

        # Planted leaks.
        def plant(secret_id: str, channel: str, receiver: str, chain: tuple[str, ...], idx: int) -> None:
            planted.append(PlantedLeak(visit_id, secret_id, channel, receiver, chain, idx))

        if not is_extension:
            if i == 0:
                token = apply_chain(("base64_std_padded",), addr_lower)
                idx = request(
                    kind="http_get",
                    url=f"https://collector.websift.test/t?uid={token}&page=home",
                    initiator_url=app_js,
                )
                plant("w1", "get_param", "websift.test", ("base64_std_padded",), idx)
            if i == 5:
                token = apply_chain(("sha256_hex",), addr_lower)
                body = json.dumps({"metrics": ["load", "paint"], "h": token}).encode()
                idx = request(
                    kind="http_post",
                    url="https://api.chainstat.test/v1/batch",
                    post_body=body,
                    initiator_url=_COLLECT_JS,
                )
                plant("w1", "post_body", "chainstat.test", ("sha256_hex",), idx)
            if i == 7:
                payload = f'42["sync",{{"account":"{DEFAULT_ADDRESS}"}}]'.encode()
                idx = request(
                    kind="ws_out",
                    url="wss://relay.dexhelper.test/socket",
                    ws_payload=payload,
                    initiator_url=_DEX_JS,
                )
                plant("w1", "ws_payload", "dexhelper.test", (), idx)
            if i == 9:
                token = apply_chain(("lzstring_base64",), addr_lower)
                cookies.append(
                    CookieRecord(name="_wtrk", value=token, domain="." + host, source="script", timestamp=ts)
                )
                plant("w1", "cookie_value", host, ("lzstring_base64",), len(cookies) - 1)
            if i == 11:
                idx = request(
                    kind="http_get",
                    url=f"https://collector.websift.test/t?h={host}&e=1",
                    initiator_url=app_js,
                )
                plant("h1", "get_param", "websift.test", (), idx)
            if i == 13:
                token = apply_chain(("percent_encoding",), DEFAULT_PASSWORD)
                idx = request(
                    kind="http_post",
                    url="https://api.websift.test/collect",
                    post_body=f"pw={token}&sid=7".encode(),
                    initiator_url=app_js,
                )
                plant("p1", "post_body", "websift.test", ("percent_encoding",), idx)
        else:
            request(kind="http_get", url=_PROBE_JS + "?ext=1")
            body3 = b"/* probe loader */export{};"
            scripts.append(ScriptRecord(_PROBE_JS, compute_body_hash(body3), body3))

        bundle = TraceBundle(
            visit_id=visit_id,
            target=target,
            capture_meta=_meta(target.kind),
            api_calls=api_calls,
            requests=requests,
            cookies=cookies,
            scripts=scripts,
        )
        with open(os.path.join(out_dir, f"{visit_id}.jsonl"), "wb") as f:
            f.write(write_trace_bundle(bundle))

    histogram: dict[tuple[str, ...], int] = {}
    for roots in script_roots.values():
        if roots:
            key = tuple(roots)
            histogram[key] = histogram.get(key, 0) + 1
    cluster_site_counts = tuple(
        sorted((len(urls) for urls in cluster_bodies.values() if len(urls) >= 2), reverse=True)
    )
    return SyntheticTruth(
        histogram=histogram,
        flagged_scripts=tuple(flagged),
        cluster_site_counts=cluster_site_counts,
        planted_leaks=tuple(planted),
        secrets={"w1": DEFAULT_ADDRESS, "p1": DEFAULT_PASSWORD, "h1": "dapp-011.test"},
    )


# Chains chosen so the recovered chain equals the planted one exactly.
# Two aliasing traps are avoided: percent-encoding is the identity on the
# address's alnum-only encodings (never an outer layer here), and a padded
# std-base64 token whose '=' padding the tokenizer strips collides with the
# urlsafe-unpadded candidate (std outer layers only over pad-free inners).
_THROUGHPUT_CHAINS: tuple[tuple[str, ...], ...] = (
    (),
    ("base64_std_padded",),
    ("sha256_hex",),
    ("base64_urlsafe_unpadded", "sha256_hex"),
    ("lzstring_base64",),
    ("murmur3_32_hex",),
    ("md5_hex",),
    ("base64_urlsafe_unpadded", "sha1_hex"),
    ("lzstring_base64", "murmur3_32_hex"),
    ("base64_std_padded", "lzstring_base64"),
)


def build_throughput_bundle(
    path,
    n_requests: int = 10_000,
    payload_bytes: int = 5_000,
    n_planted: int = 20,
    seed: int = 11,
    address: str = DEFAULT_ADDRESS,
) -> list[PlantedLeak]:
    """One bulk bundle of ``n_requests`` POSTs with ~``payload_bytes``
    word-soup bodies; ``n_planted`` of them carry one encoded secret each.
    Returns the planted ground truth."""
    rng = random.Random(seed)
    addr_lower = address.lower()
    words_per_payload = max(1, payload_bytes // 6)
    planted_at = sorted(rng.sample(range(n_requests), n_planted))
    planted_idx = {r: k for k, r in enumerate(planted_at)}

    requests: list[NetworkRecord] = []
    planted: list[PlantedLeak] = []
    visit_id = "bulk-000"
    for r in range(n_requests):
        words = rng.choices(_VOCAB, k=words_per_payload)
        if r in planted_idx:
            chain = _THROUGHPUT_CHAINS[planted_idx[r] % len(_THROUGHPUT_CHAINS)]
            token = apply_chain(chain, addr_lower)
            words[rng.randrange(len(words))] = token
            planted.append(PlantedLeak(visit_id, "w1", "post_body", "sink.test", chain, r))
        requests.append(
            NetworkRecord(
                kind="http_post",
                url="https://ingest.sink.test/v1/bulk",
                post_body=" ".join(words).encode(),
                timestamp=float(r + 1),
            )
        )

    bundle = TraceBundle(
        visit_id=visit_id,
        target=TargetDescriptor(kind="website", url="https://bulk.test/", rank=1),
        capture_meta=_meta("website"),
        requests=requests,
    )
    with open(path, "wb") as f:
        f.write(write_trace_bundle(bundle))
    return planted
