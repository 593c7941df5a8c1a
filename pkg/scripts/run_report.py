#!/usr/bin/env python3
"""Run the analysis pipeline over a trace corpus and print a short digest.

Library-level companion to ``wallettrace analyze``: loads the corpus, runs
the same pipeline, and prints the highlights (wallet-probing third parties,
fingerprinting stats, leak findings, blocklist efficacy) instead of the full
JSON report.  Useful after scripts/gen_corpus.py:

    python3 scripts/gen_corpus.py --out /tmp/demo
    python3 scripts/run_report.py --corpus /tmp/demo/corpus \
        --secrets /tmp/demo/secrets.json
"""

from __future__ import annotations

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from wallettrace.filterlists import load_filter_list
from wallettrace.leaks import load_secret_profile
from wallettrace.origins import load_public_suffix_list
from wallettrace.report import render_report_json, run_pipeline

BUNDLED_PSL = os.path.join(
    os.path.dirname(__file__), "..", "src", "wallettrace", "data", "psl_mini.dat"
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--corpus", required=True, help="directory of *.jsonl trace bundles")
    parser.add_argument("--secrets", help="secret profile JSON (omit to skip leak scanning)")
    parser.add_argument("--psl", default=BUNDLED_PSL, help="public suffix list file")
    parser.add_argument(
        "--blocklist",
        action="append",
        default=[],
        metavar="NAME=PATH",
        help="efficacy blocklist (repeatable)",
    )
    parser.add_argument("--workers", type=int, default=4)
    parser.add_argument("--json", help="also write the full report JSON here")
    args = parser.parse_args()

    blocklists = []
    for spec in args.blocklist:
        name, _, path = spec.partition("=")
        if not path:
            parser.error(f"--blocklist wants NAME=PATH, got {spec!r}")
        blocklists.append(load_filter_list(path, name=name))

    report = run_pipeline(
        args.corpus,
        psl=load_public_suffix_list(args.psl),
        profile=load_secret_profile(args.secrets) if args.secrets else None,
        blocklists=blocklists,
        workers=args.workers,
    )

    meta = report["meta"]
    skipped = report["diagnostics"]["bundles_skipped"]
    print(f"bundles: {meta['bundles_analyzed']}/{meta['bundles']} analyzed, {len(skipped)} skipped")
    for diag in skipped:
        print(f"  skipped {diag['path']}: {diag['error']}")
    print(f"sites: {meta['sites']}   wallet call sites: {len(report['wallet_call_sites'])}")

    print("\nthird parties probing wallet APIs:")
    for row in report["third_party_rollup"]:
        flag = "  [fingerprinting]" if row["fingerprinting"] else ""
        print(f"  {row['script_domain']:<28} sites={row['site_count']} mode={row['mode']}{flag}")

    fp = report["fingerprint_stats"]
    print(
        f"\nfingerprinting scripts: {fp['flagged_count']}"
        f" (mean categories {fp['mean_categories']}, max {fp['max_categories']})"
    )

    if report["leak_findings"]:
        print("\nleaks:")
        for row in report["leak_findings"]:
            chain = "+".join(row["chain"]) or "plain"
            print(
                f"  {row['visit_id']:<14} {row['secret_id']:<3} {row['channel']:<12}"
                f" -> {row['receiver']:<22} [{chain}]"
            )
    else:
        print("\nleaks: none found" if args.secrets else "\nleaks: skipped (no --secrets)")

    if report["efficacy"]:
        eff = report["efficacy"]
        print("\nblocklist efficacy over", eff["universe_size"], "wallet-probing domains:")
        for name, frac in eff["lists"].items():
            print(f"  {name:<14} {frac['numerator']}/{frac['denominator']}")
        comb = eff["combined"]
        print(f"  combined       {comb['numerator']}/{comb['denominator']}")

    if args.json:
        with open(args.json, "wb") as f:
            f.write(render_report_json(report))
        print(f"\nfull report written to {args.json}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
