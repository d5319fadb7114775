"""Benchmark scoring: MRR, binary NDCG, P@K, and stage timings.

All metric kernels are pure functions of a ranked list and a gold set;
repeated evaluation of the same inputs is bit-identical.  Wall-clock
timings are the only non-deterministic part of a report and are kept
out of its stable serialization.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

from .config import RunConfig
from .index import InvertedIndex, PaperRecord, build_index
from .pipeline import run_pipeline
from .rerank import RankedList, WordVectorTable
from .textprep import CleanDocument, RawDocument, preprocess

DEFAULT_KS = (1, 5, 10, 20, 50)

_MARKUP_SUFFIXES = (".html", ".htm", ".xhtml")


@dataclass(frozen=True)
class GoldPair:
    news_id: str
    gold_paper_ids: frozenset[str]
    news_path: str = ""

    def __post_init__(self) -> None:
        if not self.gold_paper_ids:
            raise ValueError(f"gold pair {self.news_id!r} has no gold papers")


def load_gold(path: str | Path) -> list[GoldPair]:
    """Read gold pairs from JSONL: {news_id, news_path, gold_paper_ids}."""
    pairs: list[GoldPair] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                pairs.append(
                    GoldPair(
                        news_id=record["news_id"],
                        gold_paper_ids=frozenset(record["gold_paper_ids"]),
                        news_path=record.get("news_path", ""),
                    )
                )
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
    return pairs


# --------------------------------------------------------------------------
# metric kernels
# --------------------------------------------------------------------------


def rank_of_best_gold(ranked: RankedList, gold_ids: frozenset[str]) -> int | None:
    """1-based rank of the highest-ranked gold paper, None if absent."""
    for position, (paper_id, _sim) in enumerate(ranked.items, start=1):
        if paper_id in gold_ids:
            return position
    return None


def mrr(
    ranked_lists: Mapping[str, RankedList],
    gold: list[GoldPair],
    count_misses: bool = True,
) -> float:
    """Mean reciprocal rank of the best-ranked gold paper per query.

    A query whose golds are all absent contributes 0 by default; with
    ``count_misses=False`` such queries are excluded from the mean.
    """
    total = 0.0
    queries = 0
    for pair in gold:
        if pair.news_id not in ranked_lists:
            raise ValueError(f"no ranked list for gold pair {pair.news_id!r}")
        rank = rank_of_best_gold(ranked_lists[pair.news_id], pair.gold_paper_ids)
        if rank is not None:
            total += 1.0 / rank
            queries += 1
        elif count_misses:
            queries += 1
    return total / queries if queries else 0.0


def precision_at_k(ranked: RankedList, gold: GoldPair, k: int) -> float:
    """|top-k intersect gold| / k; short lists keep the denominator k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    hits = sum(1 for paper_id, _ in ranked.items[:k] if paper_id in gold.gold_paper_ids)
    return hits / k


def ndcg_binary(ranked: RankedList, gold: GoldPair, k: int | None = None) -> float:
    """Binary-relevance NDCG with the 1/log2(i+1) discount.

    The ideal ordering places min(|gold|, k) relevant items on top;
    ``k`` defaults to the list length.
    """
    if k is None:
        k = len(ranked.items)
    dcg = sum(
        1.0 / math.log2(position + 1)
        for position, (paper_id, _) in enumerate(ranked.items[:k], start=1)
        if paper_id in gold.gold_paper_ids
    )
    ideal = min(len(gold.gold_paper_ids), k)
    idcg = sum(1.0 / math.log2(position + 1) for position in range(1, ideal + 1))
    return dcg / idcg if idcg > 0 else 0.0


# --------------------------------------------------------------------------
# benchmark runner
# --------------------------------------------------------------------------


@dataclass
class QueryEval:
    rank_of_best_gold: int | None
    p_at: dict[int, float]
    ndcg: float
    n_candidates: int = 0
    t_prr_s: float = 0.0
    t_all_s: float = 0.0
    title_fallback: bool = False
    diagnostic: str | None = None

    def to_dict(self, include_timings: bool = True) -> dict:
        out: dict = {
            "rank_of_best_gold": self.rank_of_best_gold,
            "p_at": {str(k): v for k, v in sorted(self.p_at.items())},
            "ndcg": self.ndcg,
            "n_candidates": self.n_candidates,
            "title_fallback": self.title_fallback,
            "diagnostic": self.diagnostic,
        }
        if include_timings:
            out["t_prr_s"] = self.t_prr_s
            out["t_all_s"] = self.t_all_s
        return out


@dataclass
class EvalReport:
    per_query: dict[str, QueryEval]
    aggregate: dict
    timings: dict  # mean t_prr_seconds / t_all_seconds over queries
    config: dict = field(default_factory=dict)
    rankings: dict[str, RankedList] = field(default_factory=dict, repr=False)

    def to_dict(self, include_timings: bool = True) -> dict:
        out = {
            "config": self.config,
            "aggregate": self.aggregate,
            "per_query": {
                news_id: q.to_dict(include_timings)
                for news_id, q in sorted(self.per_query.items())
            },
        }
        if include_timings:
            out["timings"] = self.timings
        return out

    def to_json(self, include_timings: bool = True) -> str:
        return json.dumps(self.to_dict(include_timings), sort_keys=True, indent=2) + "\n"


def _normalize_title(title: str) -> str:
    cleaned = "".join(ch for ch in title.casefold() if ch.isalnum() or ch.isspace())
    return " ".join(cleaned.split())


def resolve_gold_ids(
    pair: GoldPair, corpus: list[PaperRecord]
) -> tuple[frozenset[str], bool]:
    """Map gold references onto corpus paper ids.

    Ids are matched directly; a gold entry naming no known id falls
    back to a normalized-title match (flagged).  Unresolvable entries
    are kept verbatim so a recall failure stays visible instead of
    being dropped.
    """
    known = {paper.paper_id for paper in corpus}
    by_title = {_normalize_title(paper.title): paper.paper_id for paper in corpus}
    resolved: set[str] = set()
    used_fallback = False
    for gold_id in pair.gold_paper_ids:
        if gold_id in known:
            resolved.add(gold_id)
            continue
        mapped = by_title.get(_normalize_title(gold_id))
        if mapped is not None:
            resolved.add(mapped)
            used_fallback = True
        else:
            resolved.add(gold_id)
    return frozenset(resolved), used_fallback


def load_news_document(news_id: str, news_path: str) -> CleanDocument:
    path = Path(news_path)
    body = path.read_text("utf-8")
    raw = RawDocument(
        source_id=news_id,
        body=body,
        uri=str(path),
        is_markup=path.suffix.casefold() in _MARKUP_SUFFIXES,
    )
    return preprocess(raw)


def run_benchmark(
    config: RunConfig,
    corpus: list[PaperRecord],
    gold: list[GoldPair],
    index: InvertedIndex | None = None,
    news_docs: Mapping[str, CleanDocument] | None = None,
    news_loader: Callable[[str, str], CleanDocument] = load_news_document,
) -> EvalReport:
    """Run the full pipeline for every gold pair and score the results.

    A pipeline failure on one article is recorded in that query's
    diagnostic with zero metrics; the run continues.  ``news_docs`` may
    supply already-prepared documents (takes precedence over loading
    from ``news_path``).
    """
    if not gold:
        raise ValueError("empty benchmark: no gold pairs")
    if index is None:
        index = build_index(corpus, config.k1, config.b)
    wordvec_table = None
    if config.backend in ("wordvec", "wordvec_weighted"):
        if not config.wordvec_path:
            raise ValueError(f"backend {config.backend!r} needs paths.wordvec configured")
        wordvec_table = WordVectorTable.load(config.wordvec_path)

    ks = tuple(config.ks) if config.ks else DEFAULT_KS

    def evaluate_pair(pair: GoldPair) -> tuple[QueryEval, RankedList]:
        gold_ids, used_fallback = resolve_gold_ids(pair, corpus)
        scored_pair = GoldPair(
            news_id=pair.news_id, gold_paper_ids=gold_ids, news_path=pair.news_path
        )
        try:
            if news_docs is not None and pair.news_id in news_docs:
                doc = news_docs[pair.news_id]
            else:
                doc = news_loader(pair.news_id, pair.news_path)
            result = run_pipeline(doc, index, config, wordvec_table)
            ranked = result.ranked
            return (
                QueryEval(
                    rank_of_best_gold=rank_of_best_gold(ranked, gold_ids),
                    p_at={k: precision_at_k(ranked, scored_pair, k) for k in ks},
                    ndcg=ndcg_binary(ranked, scored_pair),
                    n_candidates=result.n_candidates,
                    t_prr_s=result.t_prr_s,
                    t_all_s=result.t_all_s,
                    title_fallback=used_fallback,
                    diagnostic=result.notice,
                ),
                ranked,
            )
        except Exception as exc:  # keep the run alive, record the failure
            return (
                QueryEval(
                    rank_of_best_gold=None,
                    p_at={k: 0.0 for k in ks},
                    ndcg=0.0,
                    title_fallback=used_fallback,
                    diagnostic=f"{type(exc).__name__}: {exc}",
                ),
                RankedList(news_id=pair.news_id, items=()),
            )

    # Per-query work is independent; the index and tables are immutable.
    # parallelism=1 (the default) keeps wall-clock timings comparable.
    if config.parallelism > 1:
        with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
            outcomes = list(pool.map(evaluate_pair, gold))
    else:
        outcomes = [evaluate_pair(pair) for pair in gold]

    per_query: dict[str, QueryEval] = {}
    rankings: dict[str, RankedList] = {}
    for pair, (query_eval, ranked) in zip(gold, outcomes):
        per_query[pair.news_id] = query_eval
        rankings[pair.news_id] = ranked

    resolved_pairs = [
        GoldPair(news_id=p.news_id, gold_paper_ids=resolve_gold_ids(p, corpus)[0])
        for p in gold
    ]
    n = len(gold)
    aggregate = {
        "mrr": mrr(rankings, resolved_pairs, count_misses=config.count_misses),
        "mean_ndcg": sum(q.ndcg for q in per_query.values()) / n,
        "p_at": {
            str(k): sum(q.p_at[k] for q in per_query.values()) / n for k in ks
        },
        "n_queries": n,
    }
    timings = {
        "t_prr_seconds": sum(q.t_prr_s for q in per_query.values()) / n,
        "t_all_seconds": sum(q.t_all_s for q in per_query.values()) / n,
    }
    return EvalReport(
        per_query=per_query,
        aggregate=aggregate,
        timings=timings,
        config=config.to_dict(),
        rankings=rankings,
    )


def dump_rankings(report: EvalReport, directory: str | Path) -> list[Path]:
    """Write one JSON file per query with the ranked (paper_id, score) list."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for news_id, ranked in sorted(report.rankings.items()):
        path = directory / f"{news_id}.json"
        payload = {
            "news_id": news_id,
            "items": [[paper_id, sim] for paper_id, sim in ranked.items],
        }
        path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", "utf-8")
        written.append(path)
    return written
