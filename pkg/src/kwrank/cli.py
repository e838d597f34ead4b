"""Command-line entry point: ``kwrank <subcommand> ...``.

Failures print one ``error: <Kind>: <message>`` line to stderr. Domain
errors exit 1; usage errors exit 2 (argparse's convention).
"""
from __future__ import annotations

import argparse
import logging
import sys

from .annotation_index import load_index
from .errors import KwrankError
from .frequency import as_fraction, count_frequencies, detect_ties, select_candidates
from .importance_rank import format_decimal, format_report, rank_all
from .knowledge_base import load_kb, mine_rules, read_transactions, save_kb, validate_acyclic
from .pipeline import load_config, run_pipeline
from .text_ingest import (MIN_TOKEN_LENGTH, TokenSource, load_source, load_stopwords, parse_document,
                          tokenize)


def _fraction(text):
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def cmd_run(args):
    overrides = {
        "url_list_path": args.url_list,
        "kb_path": args.kb,
        "index_path": args.index,
        "stopwords_path": args.stopwords,
        "threshold_fraction": args.threshold,
        "max_annotations": args.max_annotations,
        "fetch_timeout_seconds": args.timeout,
        "min_token_length": args.min_token_length,
        "summary_path": args.summary,
        "enabled_token_sources": TokenSource.parse(args.sources) if args.sources else None,
        "rank_all_candidates": True if args.rank_all_candidates else None,
    }
    config = load_config(args.config, overrides)
    summary = run_pipeline(config)
    sys.stdout.write(summary.render())
    return 0


def cmd_rank(args):
    kb = load_kb(load_source(args.kb))
    report = rank_all(kb, args.words)
    sys.stdout.write(format_report(report))
    return 0


def cmd_candidates(args):
    stopwords = load_stopwords(args.stopwords)
    doc = parse_document(args.file, load_source(args.file), stopwords, args.min_token_length)
    sources = TokenSource.parse(args.sources) if args.sources else None
    table = count_frequencies(doc.tokens, sources) if sources else count_frequencies(doc.tokens)
    candidates = select_candidates(table, args.threshold)
    ties = {w: g.count for g in detect_ties(candidates) for w in g.keywords}
    for kw, n in candidates.members:
        line = f"{kw}\t{n}\ttie" if kw in ties else f"{kw}\t{n}"
        print(line)
    return 0


def cmd_mine(args):
    transactions = read_transactions(load_source(args.transactions).decode("utf-8"))
    kb = mine_rules(transactions, args.min_support, args.min_confidence)
    text = save_kb(kb)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_query(args):
    idx = load_index(load_source(args.index))
    words = tokenize(args.keyword, min_length=1)
    keyword = words[0] if words else ""
    for img in idx.query(args.keyword):
        a = img.get(keyword)
        sys.stdout.write(f"{img.image_id}\t{img.owner_doc}\t{a.count}\t{format_decimal(a.rank)}\n")
    return 0


def cmd_validate_kb(args):
    kb = load_kb(load_source(args.file))
    cycles = set()
    for w in sorted(kb.vocabulary):
        report = validate_acyclic(kb, w)
        if report is not None:
            cycles.add(report.cycle)
    print(f"rules: {len(kb.rules)}")
    print(f"n_total: {kb.n_total}")
    if cycles:
        for c in sorted(cycles):
            print("cycle: " + " <- ".join(c))
        sys.stderr.write(f"error: CyclicKnowledgeBase: {len(cycles)} cycle(s) reachable\n")
        return 1
    print("acyclic: ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kwrank", description="Frequency + correlation keyword ranking for image annotation.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run the full pipeline from a config file")
    r.add_argument("--config", help="key=value config file (default: $KWRANK_CONFIG)")
    r.add_argument("--url-list")
    r.add_argument("--kb")
    r.add_argument("--index")
    r.add_argument("--stopwords")
    r.add_argument("--threshold", type=_fraction)
    r.add_argument("--max-annotations", type=int)
    r.add_argument("--timeout", type=float)
    r.add_argument("--min-token-length", type=int)
    r.add_argument("--sources", help="comma list of token sources, or 'all'")
    r.add_argument("--summary", help="write the machine-readable JSON summary here")
    r.add_argument("--rank-all-candidates", action="store_true")
    r.set_defaults(func=cmd_run)

    r = sub.add_parser("rank", help="print correlation ranks for words")
    r.add_argument("--kb", required=True)
    r.add_argument("words", nargs="+")
    r.set_defaults(func=cmd_rank)

    r = sub.add_parser("candidates", help="parse one document and print its candidate keywords")
    r.add_argument("--threshold", type=_fraction, default=as_fraction("0.4"))
    r.add_argument("--stopwords")
    r.add_argument("--min-token-length", type=int, default=MIN_TOKEN_LENGTH)
    r.add_argument("--sources")
    r.add_argument("file")
    r.set_defaults(func=cmd_candidates)

    r = sub.add_parser("mine", help="mine pairwise rules from a transactions file")
    r.add_argument("--min-support", type=_fraction, required=True)
    r.add_argument("--min-confidence", type=_fraction, required=True)
    r.add_argument("-o", "--output")
    r.add_argument("transactions")
    r.set_defaults(func=cmd_mine)

    r = sub.add_parser("query", help="look up images annotated with a keyword")
    r.add_argument("--index", required=True)
    r.add_argument("keyword")
    r.set_defaults(func=cmd_query)

    r = sub.add_parser("validate-kb", help="check a knowledge base file for format errors and cycles")
    r.add_argument("file")
    r.set_defaults(func=cmd_validate_kb)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except KwrankError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1
    except ValueError as exc:
        sys.stderr.write(f"error: ValueError: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1
