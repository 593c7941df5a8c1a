"""Command-line interface.

Subcommands: ``analyze`` (corpus → report), ``validate`` (single trace
bundle), ``manifest`` (extension manifest capability check), and
``blocklist-check`` (single URL against filter lists).

Exit codes: 0 success; 1 usage error; 2 input problem (empty/unreadable
corpus, invalid trace, malformed config/manifest); 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .filterlists import FilterList, load_filter_list, parse_adblock_list, parse_domain_json
from .filterlists import url_blocked
from .fingerprint import ClassifierConfig, load_patterns
from .leaks import SecretProfileError, load_secret_profile
from .origins import OriginError, load_public_suffix_list
from .report import (
    CorpusError,
    analyze_manifest,
    load_exclusions,
    load_site_categories,
    load_tp_categories,
    render_leak_csv,
    render_report_json,
    render_wallet_csv,
    run_pipeline,
)
from .trace import TraceError, load_trace_bundle
from .walletapis import load_wallet_api_table

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3

_BLOCKLIST_FORMATS = ("adblock", "domain_json")


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad arguments; this tool reserves 2 for
    input problems, so usage errors are remapped to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    p = _Parser(prog="wallettrace", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="analyze a directory of trace bundles")
    a.add_argument("--corpus", required=True, help="directory of *.jsonl trace bundles")
    a.add_argument("--secrets", required=True, help="wallet secrets profile (JSON)")
    a.add_argument("--psl", required=True, help="public suffix list file")
    a.add_argument("--patterns", help="fingerprint pattern table override (TSV)")
    a.add_argument("--wallet-apis", help="wallet API table override (JSON)")
    a.add_argument(
        "--blocklist",
        action="append",
        default=[],
        metavar="NAME=PATH[,FORMAT]",
        help=f"filter list to evaluate; FORMAT one of {_BLOCKLIST_FORMATS} (default: auto)",
    )
    a.add_argument("--exclusions", help="domains to drop from the efficacy universe (one per line)")
    a.add_argument("--site-categories", help="site,category CSV for the category rollup")
    a.add_argument("--tp-categories", help="domain,category CSV overriding the packaged third-party roles")
    a.add_argument("--out", help="output directory (default: report JSON to stdout)")
    a.add_argument("--format", choices=("json", "csv", "both"), default="json")
    a.add_argument("--workers", type=int, default=1, help="parallel bundle workers")
    a.set_defaults(func=_cmd_analyze)

    v = sub.add_parser("validate", help="validate one trace bundle file")
    v.add_argument("--trace", required=True)
    v.set_defaults(func=_cmd_validate)

    m = sub.add_parser("manifest", help="analyze an extension manifest")
    m.add_argument("--file", required=True)
    m.add_argument("--id", default="unknown", help="extension id to report")
    m.set_defaults(func=_cmd_manifest)

    b = sub.add_parser("blocklist-check", help="check one URL against filter lists")
    b.add_argument("--url", required=True)
    b.add_argument(
        "--blocklist",
        action="append",
        required=True,
        metavar="PATH[,FORMAT]",
        help=f"filter list; FORMAT one of {_BLOCKLIST_FORMATS} (default: auto)",
    )
    b.set_defaults(func=_cmd_blocklist_check)
    return p


def _load_blocklist_arg(value: str, named: bool) -> FilterList:
    name = None
    if named:
        if "=" not in value:
            raise UsageError(f"--blocklist expects NAME=PATH[,FORMAT], got {value!r}")
        name, value = value.split("=", 1)
    path, _, fmt = value.partition(",")
    if fmt and fmt not in _BLOCKLIST_FORMATS:
        raise UsageError(f"unknown blocklist format {fmt!r}; expected one of {_BLOCKLIST_FORMATS}")
    if name is None:
        name = os.path.basename(path)
    if not fmt:
        return load_filter_list(path, name)
    with open(path, encoding="utf-8", errors="replace") as f:
        text = f.read()
    if fmt == "adblock":
        return parse_adblock_list(text, name)
    return parse_domain_json(text, name)


def _cmd_analyze(args) -> int:
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    if args.format == "both" and not args.out:
        raise UsageError("--format both requires --out")
    psl = load_public_suffix_list(args.psl)
    profile = load_secret_profile(args.secrets)
    classifier = (
        ClassifierConfig(patterns=load_patterns(args.patterns)) if args.patterns else None
    )
    wallet_table = load_wallet_api_table(args.wallet_apis) if args.wallet_apis else None
    blocklists = [_load_blocklist_arg(v, named=True) for v in args.blocklist]
    report = run_pipeline(
        args.corpus,
        psl=psl,
        profile=profile,
        wallet_table=wallet_table,
        classifier=classifier,
        site_categories=load_site_categories(args.site_categories) if args.site_categories else None,
        tp_categories=load_tp_categories(args.tp_categories) if args.tp_categories else None,
        blocklists=blocklists,
        exclusions=load_exclusions(args.exclusions) if args.exclusions else frozenset(),
        workers=args.workers,
    )

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        if args.format in ("json", "both"):
            with open(os.path.join(args.out, "report.json"), "wb") as f:
                f.write(render_report_json(report))
        if args.format in ("csv", "both"):
            with open(os.path.join(args.out, "leak_findings.csv"), "wb") as f:
                f.write(render_leak_csv(report["leak_findings"]))
            with open(os.path.join(args.out, "wallet_call_sites.csv"), "wb") as f:
                f.write(render_wallet_csv(report["wallet_call_sites"]))
    elif args.format == "json":
        sys.stdout.buffer.write(render_report_json(report))
    else:
        sys.stdout.buffer.write(render_leak_csv(report["leak_findings"]))
    return EXIT_OK


def _cmd_validate(args) -> int:
    try:
        bundle = load_trace_bundle(args.trace)
    except TraceError as e:
        print(f"invalid trace: {e}", file=sys.stderr)
        return EXIT_INPUT
    summary = {
        "valid": True,
        "visit_id": bundle.visit_id,
        "api_calls": len(bundle.api_calls),
        "requests": len(bundle.requests),
        "cookies": len(bundle.cookies),
        "scripts": len(bundle.scripts),
    }
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def _cmd_manifest(args) -> int:
    with open(args.file, encoding="utf-8") as f:
        text = f.read()
    try:
        finding = analyze_manifest(text, extension_id=args.id)
    except json.JSONDecodeError as e:
        print(f"invalid manifest JSON at offset {e.pos}: {e.msg}", file=sys.stderr)
        return EXIT_INPUT
    print(json.dumps(finding.to_dict(), sort_keys=True))
    return EXIT_OK


def _cmd_blocklist_check(args) -> int:
    lists = [_load_blocklist_arg(v, named=False) for v in args.blocklist]
    verdicts = {fl.name: url_blocked(fl, args.url) for fl in lists}
    print(
        json.dumps(
            {"url": args.url, "lists": verdicts, "blocked": any(verdicts.values())},
            sort_keys=True,
        )
    )
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"wallettrace: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (
        CorpusError,
        TraceError,
        SecretProfileError,
        OriginError,
        OSError,
        UnicodeDecodeError,
        json.JSONDecodeError,
        ValueError,
    ) as e:
        print(f"wallettrace: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as e:  # pragma: no cover - safety net
        print(f"wallettrace: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
