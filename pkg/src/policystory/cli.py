"""Command-line entry point: validate, build, stats, and anchor inspection.

Diagnostics go to standard error; artifacts (bundles, summaries, anchor
listings) go to standard output or the requested file, so the tool composes
in pipelines. Exit codes: 0 success, 1 validation/lint failure, 2 usage
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import compiler, schema
from .policy import PolicyDocument, PolicyError, parse_policy, resolve_quote
from .schema import Diagnostic, NarrativeConfig, PracticeGraph

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2
EXIT_IO = 3

_COLORS = {"error": "\033[31m", "warning": "\033[33m", "ok": "\033[32m"}


def _style(text: str, tone: str, stream) -> str:
    if os.environ.get("NO_COLOR") is not None or not stream.isatty():
        return text
    return f"{_COLORS[tone]}{text}\033[0m"


def _emit_diagnostics(diags: list[Diagnostic], fmt: str) -> None:
    for d in diags:
        if fmt == "json":
            print(json.dumps(d.to_record(), ensure_ascii=False), file=sys.stderr)
        else:
            line = f"{d.severity} {d.code} {d.path}: {d.message}"
            print(_style(line, d.severity, sys.stderr), file=sys.stderr)


def _read(path: str) -> bytes:
    return Path(path).read_bytes()


def _load_inputs(args) -> tuple[PolicyDocument | None, NarrativeConfig | None,
                                PracticeGraph | None, list[Diagnostic]]:
    """Read and parse the three input files, pooling parse diagnostics."""
    diags: list[Diagnostic] = []
    config, config_diags = schema.parse_config(_read(args.config))
    diags.extend(config_diags)
    graph, graph_diags = schema.parse_graph(_read(args.graph))
    diags.extend(graph_diags)
    owner_name = config.platform_name if config else Path(args.policy).stem
    try:
        doc = parse_policy(_read(args.policy), owner_name)
    except PolicyError as exc:
        diags.append(schema.diag("E001", "policy", str(exc)))
        doc = None
    return doc, config, graph, diags


def _full_report(doc, config, graph,
                 parse_diags: list[Diagnostic]) -> schema.ValidationReport:
    diags = list(parse_diags)
    if doc is not None and config is not None and graph is not None:
        diags.extend(schema.validate(config, graph, doc).diagnostics)
        diags.extend(schema.lint_certainty(graph))
    return schema.ValidationReport.build(diags)


def _failed(report: schema.ValidationReport, strict: bool) -> bool:
    return report.error_count > 0 or (strict and report.warning_count > 0)


def _cmd_validate(args) -> int:
    doc, config, graph, parse_diags = _load_inputs(args)
    report = _full_report(doc, config, graph, parse_diags)
    _emit_diagnostics(list(report.diagnostics), args.format)
    if args.format == "json":
        print(json.dumps({"ok": report.ok, "errors": report.error_count,
                          "warnings": report.warning_count}))
    else:
        tone = "ok" if not _failed(report, args.strict) else "error"
        summary = f"{report.error_count} errors, {report.warning_count} warnings"
        print(_style(summary, tone, sys.stdout))
    return EXIT_FINDINGS if _failed(report, args.strict) else EXIT_OK


def _cmd_build(args) -> int:
    doc, config, graph, parse_diags = _load_inputs(args)
    report = _full_report(doc, config, graph, parse_diags)
    _emit_diagnostics(list(report.diagnostics), args.format)
    if _failed(report, args.strict):
        return EXIT_FINDINGS
    assert doc is not None and config is not None and graph is not None
    try:
        bundle = compiler.build_bundle(config, graph, doc)
    except compiler.CompileError as exc:
        _emit_diagnostics([exc.diagnostic], args.format)
        return EXIT_FINDINGS
    data = compiler.serialize_bundle(bundle)
    if args.output:
        Path(args.output).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    return EXIT_OK


def _cmd_stats(args) -> int:
    doc, config, graph, parse_diags = _load_inputs(args)
    report = _full_report(doc, config, graph, parse_diags)
    _emit_diagnostics(list(report.diagnostics), args.format)
    if _failed(report, args.strict):
        return EXIT_FINDINGS
    assert doc is not None and config is not None and graph is not None
    try:
        bundle = compiler.build_bundle(config, graph, doc)
    except compiler.CompileError as exc:
        _emit_diagnostics([exc.diagnostic], args.format)
        return EXIT_FINDINGS
    summary = compiler.stats(bundle)
    if args.format == "json":
        print(json.dumps(summary, ensure_ascii=False))
    else:
        print(f"items per category: " + ", ".join(
            f"{k}={v}" for k, v in summary["items_per_category"].items()))
        print(f"items per row:      " + ", ".join(
            f"{k}={v}" for k, v in summary["items_per_row"].items()))
        print(f"certainty:          " + ", ".join(
            f"{k}={v}" for k, v in summary["practices_per_certainty"].items()))
        print(f"total quotes:       {summary['total_quotes']}")
        print(f"unresolved:         {summary['unresolved']}")
    return EXIT_OK


def _cmd_anchors(args) -> int:
    doc, config, graph, parse_diags = _load_inputs(args)
    if any(d.severity == "error" for d in parse_diags) or doc is None \
            or config is None or graph is None:
        _emit_diagnostics(parse_diags, args.format)
        return EXIT_FINDINGS
    quotes: list[str] = []
    for facet in config.facets:
        if facet.anchor_quote not in quotes:
            quotes.append(facet.anchor_quote)
    for edge in graph.edges:
        for quote in edge.quotes:
            if quote not in quotes:
                quotes.append(quote)
    unresolved = 0
    for quote in quotes:
        spans = resolve_quote(doc, quote)
        if not spans:
            unresolved += 1
        if args.format == "json":
            print(json.dumps({
                "quote": quote, "resolved": bool(spans),
                "spans": [{"section_id": s.section_id, "start": s.start,
                           "end": s.end,
                           "occurrence_index": s.occurrence_index}
                          for s in spans]}, ensure_ascii=False))
        else:
            if spans:
                where = "; ".join(f"{s.section_id}[{s.start},{s.end})"
                                  for s in spans)
                print(f"{len(spans)}x  \"{quote}\"  ->  {where}")
            else:
                print(_style(f"0x  \"{quote}\"  ->  UNRESOLVED", "error",
                             sys.stdout))
    return EXIT_FINDINGS if unresolved else EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("policy", help="policy text file (*.policy.txt)")
    parser.add_argument("config", help="narrative config file (*.config.json)")
    parser.add_argument("graph", help="practice graph file (*.graph.json)")
    parser.add_argument("--strict", action="store_true",
                        help="treat warnings as errors")
    parser.add_argument("--format", choices=("text", "json"), default="text",
                        help="output format (default: text)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="policystory",
        description="Compile annotated privacy policies into verifiable "
                    "scroll-driven narrative bundles.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="cross-check the three inputs")
    _add_common(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("build", help="compile a narrative bundle")
    _add_common(p)
    p.add_argument("-o", "--output", help="bundle output path "
                                          "(default: standard output)")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("stats", help="print summary counts for the bundle")
    _add_common(p)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("anchors", help="resolve and list every quote")
    _add_common(p)
    p.set_defaults(func=_cmd_anchors)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
