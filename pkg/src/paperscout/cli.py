"""Command-line entry points for indexing, extraction, retrieval and eval.

One subcommand per pipeline stage plus the end-to-end benchmark.  All
defaults come from the config file / environment (PAPERSCOUT_* vars);
flags override both.  With local backends the written report is
byte-identical across runs - wall-clock timings are printed and can be
saved to a sidecar file, but never enter the stable report.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .config import BACKENDS, EXTRACTORS, RunConfig, load_config
from .evaluation import dump_rankings, load_gold, run_benchmark
from .index import build_index, load_corpus, load_index, save_index
from .phrases import dedup_phrases
from .pipeline import extract_phrases, run_pipeline
from .rerank import WordVectorTable
from .textprep import CleanDocument, RawDocument, preprocess

_MARKUP_SUFFIXES = (".html", ".htm", ".xhtml")


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _load_news(path: str) -> CleanDocument:
    news_path = Path(path)
    raw = RawDocument(
        source_id=news_path.stem,
        body=news_path.read_text("utf-8"),
        uri=str(news_path),
        is_markup=news_path.suffix.casefold() in _MARKUP_SUFFIXES,
    )
    return preprocess(raw)


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    overrides: dict[str, str] = {}
    if getattr(args, "extractor", None):
        overrides["run.extractor"] = args.extractor
    if getattr(args, "backend", None):
        overrides["run.backend"] = args.backend
    if getattr(args, "endpoint_extract", None):
        overrides["endpoints.extract"] = args.endpoint_extract
    if getattr(args, "endpoint_embed", None):
        overrides["endpoints.embed"] = args.endpoint_embed
    if getattr(args, "wordvec", None):
        overrides["paths.wordvec"] = args.wordvec
    return load_config(args.config, env=os.environ, overrides=overrides)


def _wordvec_table(config: RunConfig) -> WordVectorTable | None:
    if config.backend in ("wordvec", "wordvec_weighted"):
        if not config.wordvec_path:
            raise ValueError(f"backend {config.backend!r} needs paths.wordvec or --wordvec")
        return WordVectorTable.load(config.wordvec_path)
    return None


def cmd_index(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    corpus_path = args.corpus or config.corpus_path
    out_path = args.out or config.index_path
    if not corpus_path or not out_path:
        return _fail("index needs --corpus and --out (or paths.corpus/paths.index)")
    try:
        corpus = load_corpus(corpus_path)
        index = build_index(corpus, config.k1, config.b)
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    save_index(index, out_path)
    print(f"{index.n_docs} documents indexed")
    print(f"vocabulary size: {index.vocab_size}")
    print(f"average document length: {index.avgdl:.2f}")
    return 0


def cmd_extract(args: argparse.Namespace) -> int:
    try:
        config = _resolve_config(args)
        doc = _load_news(args.news)
        phrases = dedup_phrases(extract_phrases(doc, config))
    except Exception as exc:
        return _fail(str(exc))
    if not phrases:
        print("no phrases extracted")
        return 0
    for phrase in phrases[: args.top]:
        print(f"{phrase.score:.4f}\t{phrase.text}")
    return 0


def cmd_retrieve(args: argparse.Namespace) -> int:
    try:
        config = _resolve_config(args)
        index = load_index(args.index or config.index_path)
        table = _wordvec_table(config)
        doc = _load_news(args.news)
        result = run_pipeline(doc, index, config, table)
    except Exception as exc:
        return _fail(str(exc))
    if result.notice:
        print(f"notice: {result.notice}")
    k = args.k if args.k else len(result.ranked.items)
    for paper_id, similarity in result.ranked.items[:k]:
        print(f"{paper_id}\t{similarity:.6f}")
    print(
        f"phrases: {result.n_phrases}  queries: {result.n_queries}  "
        f"candidates: {result.n_candidates}",
        file=sys.stderr,
    )
    print(
        f"timings: t_prr={result.t_prr_s:.3f}s t_all={result.t_all_s:.3f}s",
        file=sys.stderr,
    )
    if args.out:
        payload = {
            "news_id": result.ranked.news_id,
            "items": [[pid, sim] for pid, sim in result.ranked.items],
        }
        Path(args.out).write_text(
            json.dumps(payload, sort_keys=True, indent=2) + "\n", "utf-8"
        )
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    try:
        config = _resolve_config(args)
        gold = load_gold(args.gold)
        if args.index or config.index_path:
            index = load_index(args.index or config.index_path)
            corpus = index.papers
        else:
            corpus = load_corpus(args.corpus or config.corpus_path)
            index = build_index(corpus, config.k1, config.b)
        report = run_benchmark(config, corpus, gold, index=index)
    except Exception as exc:
        return _fail(str(exc))

    aggregate = report.aggregate
    print(f"queries: {aggregate['n_queries']}")
    print(f"MRR: {aggregate['mrr']:.4f}")
    print(f"mean NDCG: {aggregate['mean_ndcg']:.4f}")
    for k, value in aggregate["p_at"].items():
        print(f"P@{k}: {value:.4f}")
    print(
        f"timings: t_prr={report.timings['t_prr_seconds']:.3f}s "
        f"t_all={report.timings['t_all_seconds']:.3f}s (mean per query)"
    )
    for news_id, query in sorted(report.per_query.items()):
        if query.diagnostic:
            print(f"note [{news_id}]: {query.diagnostic}", file=sys.stderr)

    if args.report_out:
        Path(args.report_out).write_text(report.to_json(include_timings=False), "utf-8")
    if args.timings_out:
        payload = {
            "timings": report.timings,
            "per_query": {
                news_id: {"t_prr_s": q.t_prr_s, "t_all_s": q.t_all_s}
                for news_id, q in sorted(report.per_query.items())
            },
        }
        Path(args.timings_out).write_text(
            json.dumps(payload, sort_keys=True, indent=2) + "\n", "utf-8"
        )
    if args.dump_rankings:
        dump_rankings(report, args.dump_rankings)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paperscout",
        description="Find scientific papers that back a science news article.",
    )
    parser.add_argument("--config", help="INI config file", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="build and persist the BM25 index")
    p_index.add_argument("--corpus", help="corpus JSONL path")
    p_index.add_argument("--out", help="index output path")
    p_index.set_defaults(func=cmd_index)

    p_extract = sub.add_parser("extract", help="extract query phrases from a news file")
    p_extract.add_argument("--news", required=True, help="news text or markup file")
    p_extract.add_argument("--extractor", choices=EXTRACTORS)
    p_extract.add_argument("--endpoint-extract", help="remote extractor base URL")
    p_extract.add_argument("--top", type=int, default=30, help="phrases to print")
    p_extract.set_defaults(func=cmd_extract)

    p_retrieve = sub.add_parser("retrieve", help="rank papers for one news article")
    p_retrieve.add_argument("--news", required=True)
    p_retrieve.add_argument("--index", help="persisted index path")
    p_retrieve.add_argument("--extractor", choices=EXTRACTORS)
    p_retrieve.add_argument("--backend", choices=BACKENDS)
    p_retrieve.add_argument("--k", type=int, default=0, help="rows to print (0 = all)")
    p_retrieve.add_argument("--out", help="write the ranked list as JSON")
    p_retrieve.add_argument("--wordvec", help="word-vector table path")
    p_retrieve.add_argument("--endpoint-extract")
    p_retrieve.add_argument("--endpoint-embed")
    p_retrieve.set_defaults(func=cmd_retrieve)

    p_eval = sub.add_parser("eval", help="run the benchmark over gold pairs")
    p_eval.add_argument("--gold", required=True, help="gold pairs JSONL")
    p_eval.add_argument("--corpus", help="corpus JSONL path")
    p_eval.add_argument("--index", help="persisted index path")
    p_eval.add_argument("--extractor", choices=EXTRACTORS)
    p_eval.add_argument("--backend", choices=BACKENDS)
    p_eval.add_argument("--wordvec")
    p_eval.add_argument("--endpoint-extract")
    p_eval.add_argument("--endpoint-embed")
    p_eval.add_argument("--report-out", help="stable report JSON (no timings)")
    p_eval.add_argument("--timings-out", help="sidecar JSON with wall-clock timings")
    p_eval.add_argument("--dump-rankings", help="directory for per-query ranked lists")
    p_eval.set_defaults(func=cmd_eval)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
