"""``idiom-forge`` command line: extract, train, query, eval."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .align import DEFAULT_FILTER, load_model, read_clicks, save_model, train_em, UnigramStats
from .evaluate import format_table, load_cases, run_eval, write_report
from .extract import CorpusReport, build_index, load_index, read_corpus, save_index
from .rank import DEFAULT_TOP_K
from .registry import load_registry
from .synth import DEFAULT_DEPTH, synthesize

log = logging.getLogger("idiom_forge")


def _stop_words(arg: Optional[str]) -> frozenset[str]:
    if arg is None:
        return DEFAULT_FILTER
    return frozenset(w.strip().lower() for w in arg.split(",") if w.strip())


def cmd_extract(args) -> int:
    reg = load_registry(args.registry)
    files = read_corpus(args.corpus)
    if not files:
        raise FileNotFoundError(f"no *.mini files under {args.corpus}")
    report = CorpusReport()
    index, names = build_index(files, reg, report)
    save_index(index, names, args.out)
    total = sum(g.count for g in index.groups.values())
    log.info("extract: %d files, %d methods, %d skipped, %d SCSs in %d groups -> %s",
             report.files, report.methods, len(report.failures), total, len(index), args.out)
    return 0


def cmd_train(args) -> int:
    reg = load_registry(args.registry)
    stop = _stop_words(args.stop_words)
    pairs, queries = read_clicks(args.clicks, args.docs, reg, stop)
    log.info("train: %d click lines, %d query/API-list pairs", len(queries), len(pairs))
    history: list[float] = []
    table = train_em(pairs, args.iters, add_k=args.add_k, history=history)
    log.info("train: %d EM rounds, log-likelihood %.6f -> %.6f",
             len(history) - 1, history[0], history[-1])
    stats = UnigramStats.from_queries(queries)
    meta = {"iterations": len(history) - 1, "add_k": args.add_k, "stop_words": sorted(stop)}
    save_model(args.out, table, stats, meta)
    log.info("train: wrote %s", args.out)
    return 0


def _load_artifacts(args):
    table, stats = load_model(args.model)
    reg = load_registry(args.registry)
    index, names = load_index(args.index)
    if index.dims != len(reg):
        raise ValueError(f"index has {index.dims} API dims but registry has {len(reg)}; "
                         "rebuild the index with this registry")
    return table, stats, reg, index, names


def cmd_query(args) -> int:
    table, stats, reg, index, names = _load_artifacts(args)
    snippets = synthesize(args.text, table, stats, index, names, reg, m=args.top, depth=args.depth,
                          top_k=args.top_k, stop=_stop_words(args.stop_words),
                          idiomatic_conditions=args.idiomatic_conditions)
    if not snippets:
        print(f"no snippets for {args.text!r}")
    for rank, sn in enumerate(snippets, 1):
        if rank > 1:
            print()
        print(f"#{rank}  score={sn.score:.4f}  freq={sn.frequency}  {sn.key}")
        print(sn.text)
    if args.json_out:
        doc = {"query": args.text, "results": [
            {"rank": i, "score": round(sn.score, 12), "canonical": sn.key, "frequency": sn.frequency,
             "root_type": sn.root_type, "snippet": sn.text}
            for i, sn in enumerate(snippets, 1)]}
        Path(args.json_out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_eval(args) -> int:
    table, stats, reg, index, names = _load_artifacts(args)
    cases = load_cases(args.cases, reg)
    stop = _stop_words(args.stop_words)

    def answer(query: str):
        return synthesize(query, table, stats, index, names, reg, m=10, depth=args.depth,
                          top_k=args.top_k, stop=stop)

    rows = run_eval(cases, answer)
    sys.stdout.write(format_table(rows, timing=not args.no_timing))
    if args.report_dir:
        for p in write_report(rows, args.report_dir, timing=not args.no_timing):
            log.info("eval: wrote %s", p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="idiom-forge", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-q", "--quiet", action="store_true", help="only report errors on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("extract", help="mine SCS groups and variable names from a corpus")
    e.add_argument("--corpus", required=True, type=Path, help="directory of *.mini files")
    e.add_argument("--registry", required=True, type=Path, help="API registry (JSON)")
    e.add_argument("--out", required=True, type=Path, help="output directory for the index")
    e.set_defaults(func=cmd_extract)

    t = sub.add_parser("train", help="learn P(api | word) from clickthrough data")
    t.add_argument("--clicks", required=True, type=Path, help="query<TAB>doc_id lines")
    t.add_argument("--docs", required=True, type=Path, help="directory holding doc_id.md files")
    t.add_argument("--registry", required=True, type=Path)
    t.add_argument("--iters", type=int, default=50, help="maximum EM rounds (default 50)")
    t.add_argument("--add-k", type=float, default=0.0, help="additive smoothing in the M-step")
    t.add_argument("--stop-words", help="comma-separated words dropped from queries (default: minilang)")
    t.add_argument("--out", required=True, type=Path, help="model file to write")
    t.set_defaults(func=cmd_train)

    for name, func, helptext in (("query", cmd_query, "synthesize snippets for a query"),
                                 ("eval", cmd_eval, "score a case file")):
        q = sub.add_parser(name, help=helptext)
        q.add_argument("--model", required=True, type=Path)
        q.add_argument("--index", required=True, type=Path, help="directory written by extract")
        q.add_argument("--registry", required=True, type=Path)
        q.add_argument("--depth", type=int, default=DEFAULT_DEPTH, help="receiver construction depth")
        q.add_argument("--top-k", type=int, default=DEFAULT_TOP_K, help="APIs kept in the query vector")
        q.add_argument("--stop-words", help="comma-separated words dropped from queries")
        q.set_defaults(func=func)
        if name == "query":
            q.add_argument("--text", required=True)
            q.add_argument("--top", type=int, default=10, help="number of snippets (default 10)")
            q.add_argument("--json-out", type=Path, help="also write results as JSON")
            q.add_argument("--idiomatic-conditions", action="store_true",
                           help="test bool members directly instead of against default(bool)")
        else:
            q.add_argument("--cases", required=True, type=Path, help="JSON case file")
            q.add_argument("--report-dir", type=Path, help="write eval.tsv and eval.png here")
            q.add_argument("--no-timing", action="store_true", help="blank the timing columns")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr, force=True)
    try:
        return args.func(args)
    except FileNotFoundError as e:
        msg = e.strerror and f"{e.strerror}: {e.filename}" or str(e)
        print(f"idiom-forge {args.command}: {msg}", file=sys.stderr)
    except (ValueError, OSError, KeyError) as e:
        print(f"idiom-forge {args.command}: {e}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
