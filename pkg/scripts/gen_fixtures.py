#!/usr/bin/env python3
"""Regenerate the committed regression trace bundles under tests/fixtures/.

The two bundles reconstruct real-world leak shapes observed in the wild:

* ``fig9_ga_leak.jsonl`` — a DApp visit where an analytics beacon carries
  the connected wallet address (lowercased) in a GET query parameter.
* ``analytics_cookie_leak.jsonl`` — a DApp visit where an analytics SDK
  stores a percent-encoded JSON blob in a third-party cookie; the
  checksummed wallet address appears unescaped inside the encoded value.

Both files are deterministic; re-running this script must reproduce them
byte for byte (guarded by a test).
"""

from __future__ import annotations

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from wallettrace.trace import (
    ApiCallRecord,
    CaptureMeta,
    CookieRecord,
    NetworkRecord,
    ScriptRecord,
    TargetDescriptor,
    TraceBundle,
    compute_body_hash,
    parse_trace_bundle,
    validate_bundle,
    write_trace_bundle,
)

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "tests", "fixtures")

GA_COLLECT_URL = (
    "https://www.google-analytics.com/collect?v=1&_v=j99&a=1044933369&t=event&ni=0&_s=1"
    "&dl=https%3A%2F%2Fdegens.farm%2Fwallet&ul=en-us&de=UTF-8"
    "&dt=Degen%27%24%20Farm%3A%20Wallet&sd=30-bit&sr=1512x982&vp=1512x749&je=0"
    "&ec=WalletConnected&ea=0x7e4abd63a7c8314cc28d388303472353d884f292"
    "&el=labelForWalletConnect&ev=7.20999590401511e%2B47&_u=aADAAEABAAAAACAAI~"
    "&jid=&gjid=&cid=437541385.1675387202&tid=UA-201259489-1"
    "&_gid=196110690.1675387203&gtm=2wg2105PC69BZ&z=1330733511"
)

MIXPANEL_COOKIE_VALUE = (
    "%7B%22distinct_id%22%3A%20%220x7e4ABd63A7C8314Cc28D388303472353D884f292%22%2C"
    "%22%24device_id%22%3A%20%22185bc157265a0d-0daab5a6ab23c7-17525635-16a7f0-185bc157266f56%22%2C"
    "%22%24user_id%22%3A%20%220x7e4ABd63A7C8314Cc28D388303472353D884f292%22%2C"
    "%22%24initial_referrer%22%3A%20%22%24direct%22%2C"
    "%22%24initial_referring_domain%22%3A%20%22%24direct%22%2C"
    "%22wallet_address%22%3A%20%220x7e4ABd63A7C8314Cc28D388303472353D884f292%22%2C"
    "%22platform%22%3A%20%22Web%22%2C%22network%22%3A%20%22Ethereum%22%7D"
)


def ga_leak_bundle() -> TraceBundle:
    app_js = "https://degens.farm/js/app.min.js"
    ga_js = "https://www.google-analytics.com/analytics.js"
    return TraceBundle(
        visit_id="degens-farm-wallet-001",
        target=TargetDescriptor(kind="dapp", url="https://degens.farm/", rank=None, category="games"),
        capture_meta=CaptureMeta(
            capture_started_at="2023-02-03T01:20:02Z",
            max_duration_s=30,
            pages_visited=("https://degens.farm/", "https://degens.farm/wallet"),
            wallet_profile_id="profile-001",
        ),
        api_calls=(
            ApiCallRecord(
                script_url=app_js,
                symbol="window.ethereum.isMetaMask",
                access_mode="direct",
                stack=(app_js,),
                timestamp=812,
            ),
            ApiCallRecord(
                script_url=app_js,
                symbol="window.ethereum.request",
                access_mode="direct",
                stack=(app_js,),
                timestamp=1045,
            ),
        ),
        requests=(
            NetworkRecord(
                kind="http_get",
                url=GA_COLLECT_URL,
                post_body=None,
                ws_payload=None,
                response_set_cookies=(),
                timestamp=1330,
                initiator_url=ga_js,
            ),
        ),
        cookies=(
            CookieRecord(
                name="_ga",
                value="GA1.2.437541385.1675387202",
                domain=".degens.farm",
                source="script",
                timestamp=1210,
            ),
        ),
        scripts=(
            ScriptRecord(script_url=app_js, body_hash=compute_body_hash(b"/* degens wallet app */")),
            ScriptRecord(script_url=ga_js, body_hash=compute_body_hash(b"/* ga snippet */")),
        ),
    )


def cookie_leak_bundle() -> TraceBundle:
    main_js = "https://dmm.exchange/static/js/main.chunk.js"
    mixpanel_js = "https://cdn.mxpnl.com/libs/mixpanel-2-latest.min.js"
    return TraceBundle(
        visit_id="dmm-exchange-visit-001",
        target=TargetDescriptor(kind="dapp", url="https://dmm.exchange/", rank=None, category="defi"),
        capture_meta=CaptureMeta(
            capture_started_at="2023-02-03T09:41:00Z",
            max_duration_s=30,
            pages_visited=("https://dmm.exchange/",),
            wallet_profile_id="profile-001",
        ),
        api_calls=(
            ApiCallRecord(
                script_url=main_js,
                symbol="window.ethereum.isMetaMask",
                access_mode="direct",
                stack=(main_js,),
                timestamp=540,
            ),
            ApiCallRecord(
                script_url=main_js,
                symbol="window.ethereum.request",
                access_mode="direct",
                stack=(main_js,),
                timestamp=2100,
            ),
        ),
        requests=(
            NetworkRecord(
                kind="http_get",
                url="https://api.kyberswap.com/v1/prices?chain=ethereum",
                post_body=None,
                ws_payload=None,
                response_set_cookies=(),
                timestamp=1900,
                initiator_url=main_js,
            ),
        ),
        cookies=(
            CookieRecord(
                name="mp_ff1eea26c19dcf4a7c35ebbc8631e714_mixpanel",
                value=MIXPANEL_COOKIE_VALUE,
                domain=".kyberswap.com",
                source="script",
                timestamp=2650,
            ),
        ),
        scripts=(
            ScriptRecord(script_url=main_js, body_hash=compute_body_hash(b"/* dmm main chunk */")),
            ScriptRecord(script_url=mixpanel_js, body_hash=compute_body_hash(b"/* mixpanel sdk */")),
        ),
    )


def main() -> int:
    os.makedirs(FIXTURES, exist_ok=True)
    for filename, bundle in (
        ("fig9_ga_leak.jsonl", ga_leak_bundle()),
        ("analytics_cookie_leak.jsonl", cookie_leak_bundle()),
    ):
        raw = write_trace_bundle(bundle)
        validate_bundle(parse_trace_bundle(raw))
        path = os.path.join(FIXTURES, filename)
        with open(path, "wb") as f:
            f.write(raw)
        print(f"wrote {path} ({len(raw)} bytes)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
