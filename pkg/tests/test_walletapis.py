"""Wallet-provider access detection: the default provider table, root
matching, per-script summaries, and the order-sensitive combination
histogram."""

import pytest

from wallettrace.trace import ApiCallRecord, CaptureMeta, TargetDescriptor, TraceBundle
from wallettrace.walletapis import (
    WalletApiTable,
    WalletEntry,
    combination_histogram,
    default_wallet_api_table,
    detect_wallet_calls,
    load_wallet_api_table,
    site_identity,
    summarize_script,
    summarize_scripts,
)

from conftest import fixture_path


def bundle_with_calls(calls, target=None) -> TraceBundle:
    return TraceBundle(
        visit_id="v1",
        target=target or TargetDescriptor(kind="dapp", url="https://swap.dapp-site.test/"),
        capture_meta=CaptureMeta("2023-02-01T00:00:00Z", 30, ["https://swap.dapp-site.test/"], "profile-001"),
        api_calls=calls,
    )


def call(symbol, mode="direct", script="https://cdn.tracker.test/w.js", ts=0):
    return ApiCallRecord(script_url=script, symbol=symbol, access_mode=mode, timestamp=ts)


# ------------------------------------------------------------------- table


def test_default_table_contents():
    table = default_wallet_api_table()
    assert [e.wallet_name for e in table.entries] == [
        "MetaMask",
        "Coinbase",
        "Binance",
        "Phantom",
        "Nami",
    ]
    by_name = {e.wallet_name: e for e in table.entries}
    assert by_name["MetaMask"].breakpoint_symbol == "window.ethereum"
    assert by_name["MetaMask"].simulated_property_path == "window.ethereum.isMetaMask"
    assert by_name["MetaMask"].simulated_value is True
    assert by_name["Coinbase"].breakpoint_symbol == "window.ethereum"
    assert by_name["Coinbase"].simulated_property_path == "window.ethereum.isCoinbaseWallet"
    assert by_name["Coinbase"].simulated_value is True
    assert by_name["Binance"].breakpoint_symbol == "window.BinanceChain"
    assert by_name["Binance"].simulated_property_path == "window.BinanceChain.chainId"
    assert by_name["Binance"].simulated_value == "0x38"
    assert by_name["Phantom"].breakpoint_symbol == "window.solana"
    assert by_name["Phantom"].simulated_property_path == "window.solana.isPhantom"
    assert by_name["Phantom"].simulated_value is True
    assert by_name["Nami"].breakpoint_symbol == "window.cardano"
    assert by_name["Nami"].simulated_property_path == "window.cardano.nami.name"
    assert by_name["Nami"].simulated_value == "Nami Wallet"
    # five entries share four distinct injected roots
    assert table.roots == (
        "window.ethereum",
        "window.BinanceChain",
        "window.solana",
        "window.cardano",
    )


def test_table_validation():
    with pytest.raises(ValueError):
        WalletApiTable(entries=())
    with pytest.raises(ValueError):
        WalletApiTable(entries=(WalletEntry("X", "document.wallet", "document.wallet.x", 1),))
    with pytest.raises(ValueError):
        WalletApiTable(entries=(WalletEntry("X", "window.x", "window.y.z", 1),))


def test_load_wallet_api_table_accepts_arrays_and_objects():
    table = load_wallet_api_table(fixture_path("wallet_table_override.json"))
    assert table == default_wallet_api_table()


# --------------------------------------------------------------- detection


def test_detect_matches_roots_and_extensions_of_roots():
    calls = [
        call("window.ethereum"),
        call("window.ethereum.isMetaMask"),
        call("window.BinanceChain.chainId", mode="enumeration"),
        call("window.ethereumX"),  # not a dotted extension of the root
        call("window.navigator.userAgent"),
        call("window.cardano.nami.name"),
    ]
    accesses = detect_wallet_calls(bundle_with_calls(calls), default_wallet_api_table())
    assert [(a.root_symbol, a.full_symbol, a.mode) for a in accesses] == [
        ("window.ethereum", "window.ethereum", "explicit"),
        ("window.ethereum", "window.ethereum.isMetaMask", "explicit"),
        ("window.BinanceChain", "window.BinanceChain.chainId", "implicit"),
        ("window.cardano", "window.cardano.nami.name", "explicit"),
    ]
    assert all(a.site_url == "https://swap.dapp-site.test/" for a in accesses)


def test_site_identity_website_vs_extension(psl):
    b = bundle_with_calls([])
    assert site_identity(b, psl) == "dapp-site.test"
    ext = bundle_with_calls(
        [], target=TargetDescriptor(kind="extension", url="abcdefghijklmnopabcdefghijklmnop")
    )
    assert site_identity(ext, psl) == "abcdefghijklmnopabcdefghijklmnop"


# ----------------------------------------------------------------- summary


def test_summarize_script_orders_and_dedups_roots(psl):
    table = default_wallet_api_table()
    calls = [
        call("window.BinanceChain.chainId", ts=1),
        call("window.ethereum.isMetaMask", ts=2),
        call("window.BinanceChain.request", ts=3),
        call("window.solana.isPhantom", mode="enumeration", ts=4),
    ]
    accesses = detect_wallet_calls(bundle_with_calls(calls), table)
    summary = summarize_script(accesses, psl)
    assert summary.roots_explicit == ["window.BinanceChain", "window.ethereum"]
    assert summary.roots_implicit == ["window.solana"]
    assert summary.sites == {"dapp-site.test"}


def test_summarize_script_rejects_mixed_scripts(psl):
    a = detect_wallet_calls(bundle_with_calls([call("window.ethereum", script="https://a.test/1.js")]), default_wallet_api_table())
    b = detect_wallet_calls(bundle_with_calls([call("window.ethereum", script="https://b.test/2.js")]), default_wallet_api_table())
    with pytest.raises(ValueError):
        summarize_script(a + b)
    with pytest.raises(ValueError):
        summarize_script([])


def test_summarize_scripts_groups_by_script_url(psl):
    calls = [
        call("window.ethereum", script="https://a.test/1.js", ts=1),
        call("window.solana", script="https://b.test/2.js", ts=2),
        call("window.BinanceChain", script="https://a.test/1.js", ts=3),
    ]
    accesses = detect_wallet_calls(bundle_with_calls(calls), default_wallet_api_table())
    summaries = summarize_scripts(accesses, psl)
    assert list(summaries) == ["https://a.test/1.js", "https://b.test/2.js"]
    assert summaries["https://a.test/1.js"].roots_explicit == [
        "window.ethereum",
        "window.BinanceChain",
    ]


# --------------------------------------------------------------- histogram


def test_combination_histogram_is_order_sensitive(psl):
    table = default_wallet_api_table()

    def summary_for(script, symbols):
        calls = [call(sym, script=script, ts=i) for i, sym in enumerate(symbols)]
        accesses = detect_wallet_calls(bundle_with_calls(calls), table)
        return summarize_script(accesses, psl)

    summaries = [
        summary_for("https://a.test/1.js", ["window.ethereum", "window.BinanceChain"]),
        summary_for("https://b.test/2.js", ["window.BinanceChain", "window.ethereum"]),
        summary_for("https://c.test/3.js", ["window.ethereum", "window.BinanceChain.chainId"]),
        summary_for("https://d.test/4.js", ["window.ethereum.isMetaMask"]),
    ]
    hist = combination_histogram(summaries)
    assert hist == {
        ("window.ethereum", "window.BinanceChain"): 2,
        ("window.BinanceChain", "window.ethereum"): 1,
        ("window.ethereum",): 1,
    }
    # counts sum to the number of scripts with explicit accesses
    assert sum(hist.values()) == 4


def test_histogram_skips_enumeration_only_scripts(psl):
    calls = [call("window.ethereum", mode="enumeration")]
    accesses = detect_wallet_calls(bundle_with_calls(calls), default_wallet_api_table())
    summaries = summarize_scripts(accesses, psl)
    assert combination_histogram(summaries) == {}
