#!/usr/bin/env python3
"""Generate a synthetic trace corpus for exercising the full pipeline.

Thin CLI over :mod:`wallettrace.synthetic`.  Writes to --out:

* ``corpus/visit-NNN.jsonl`` — one capture bundle per visit, mixing benign
  traffic with wallet-probing scripts (explicit and enumeration accesses,
  order-sensitive root combinations), a fingerprinting tracker plus a
  below-threshold twin, script-code clusters, and planted secret leaks
  across GET/POST/WebSocket/cookie channels under several encoding chains;
* ``secrets.json`` — the planted wallet-secret profile;
* ``psl.dat``      — a copy of the bundled minimal public suffix list;
* with --bulk N, ``corpus/bulk-000.jsonl`` — one bundle of N large POSTs
  with a handful of encoded leaks, for throughput measurements.

Output is byte-deterministic for a given --seed.  Typical follow-up:

    wallettrace analyze --corpus OUT/corpus --secrets OUT/secrets.json \
        --psl OUT/psl.dat --format both --out OUT/report
"""

from __future__ import annotations

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from wallettrace.synthetic import (
    build_synthetic_corpus,
    build_throughput_bundle,
    default_profile_doc,
    write_profile,
)

PSL_SRC = os.path.join(
    os.path.dirname(__file__), "..", "src", "wallettrace", "data", "psl_mini.dat"
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--bundles", type=int, default=20)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument(
        "--bulk",
        type=int,
        default=0,
        metavar="N",
        help="also write one bulk bundle of N POST requests",
    )
    args = parser.parse_args()

    corpus_dir = os.path.join(args.out, "corpus")
    truth = build_synthetic_corpus(corpus_dir, n_bundles=args.bundles, seed=args.seed)
    write_profile(os.path.join(args.out, "secrets.json"), default_profile_doc())
    with open(PSL_SRC, "rb") as src, open(os.path.join(args.out, "psl.dat"), "wb") as dst:
        dst.write(src.read())

    print(f"wrote {args.bundles} bundles to {corpus_dir}")
    print(f"  planted leaks: {len(truth.planted_leaks)}")
    for leak in truth.planted_leaks:
        chain = "+".join(leak.chain) or "plain"
        print(f"    {leak.visit_id} {leak.secret_id} {leak.channel} -> {leak.receiver} [{chain}]")
    print(f"  fingerprinting scripts: {list(truth.flagged_scripts)}")
    print(f"  wallet-root combinations: {[','.join(k) for k in truth.histogram]}")

    if args.bulk:
        planted = build_throughput_bundle(
            os.path.join(corpus_dir, "bulk-000.jsonl"), n_requests=args.bulk, seed=args.seed
        )
        print(f"  bulk bundle: {args.bulk} requests, {len(planted)} planted leaks")

    print("analyze with:")
    print(
        f"  wallettrace analyze --corpus {corpus_dir} --secrets {args.out}/secrets.json"
        f" --psl {args.out}/psl.dat --format both --out {args.out}/report"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
