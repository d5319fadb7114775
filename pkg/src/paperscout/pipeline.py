"""End-to-end wiring: phrases -> queries -> candidates -> re-ranking.

The re-ranking stage is timed separately from the whole run because it
is the part whose cost varies most across representation backends.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .index import CandidateSet, InvertedIndex, PaperRecord, generate_queries, index_terms, retrieve_candidates
from .phrases import Phrase, extract_np_chunks, extract_remote, extract_textrank
from .remote import ServiceEndpoint
from .rerank import (
    RankedList,
    RetrievalCorpus,
    WordVectorTable,
    avg_wordvec,
    build_retrieval_corpus,
    document_terms,
    remote_embed,
    rerank,
    term_idf,
    tfidf_vector,
)
from .textprep import CleanDocument, sentence_text


@dataclass
class PipelineResult:
    ranked: RankedList
    n_phrases: int
    n_queries: int
    n_candidates: int
    t_prr_s: float
    t_all_s: float
    notice: str | None = None


def extract_phrases(doc: CleanDocument, config: RunConfig) -> list[Phrase]:
    if config.extractor == "textrank":
        return extract_textrank(doc, config.textrank)
    if config.extractor == "chunks":
        return extract_np_chunks(doc)
    if config.extractor == "remote":
        if not config.extract_endpoint:
            raise ValueError("extractor 'remote' needs endpoints.extract configured")
        endpoint = ServiceEndpoint(config.extract_endpoint, config.endpoint_timeout_s)
        return extract_remote(doc, endpoint)
    raise ValueError(f"unknown extractor {config.extractor!r}")


def _tfidf_weights(terms: list[str], corpus: RetrievalCorpus) -> dict[str, float]:
    counts = Counter(t for t in terms if t in corpus.vocab)
    return {term: tf * term_idf(corpus, term) for term, tf in counts.items()}


def _embed_batched(
    texts: list[str], endpoint: ServiceEndpoint, model: str, batch: int
) -> list[np.ndarray]:
    vectors: list[np.ndarray] = []
    for start in range(0, len(texts), batch):
        vectors.extend(remote_embed(texts[start : start + batch], endpoint, model))
    return vectors


def rank_candidates(
    news: CleanDocument,
    candidates: list[PaperRecord],
    config: RunConfig,
    wordvec_table: WordVectorTable | None = None,
) -> RankedList:
    """Represent the news and every candidate, then rank by cosine."""
    backend = config.backend
    if backend == "tfidf":
        corpus = build_retrieval_corpus(news, candidates)
        news_vec = tfidf_vector(corpus.news_terms(), corpus)
        vecs = {
            paper.paper_id: tfidf_vector(corpus.candidate_terms(i), corpus)
            for i, paper in enumerate(candidates)
        }
        return rerank(news_vec, vecs, news_id=news.source_id)

    if backend in ("wordvec", "wordvec_weighted"):
        if wordvec_table is None:
            raise ValueError(f"backend {backend!r} needs a word-vector table (paths.wordvec)")
        if backend == "wordvec":
            news_vec = avg_wordvec(document_terms(news), wordvec_table)
            vecs = {
                paper.paper_id: avg_wordvec(index_terms(paper), wordvec_table)
                for paper in candidates
            }
        else:
            corpus = build_retrieval_corpus(news, candidates)
            news_vec = avg_wordvec(
                corpus.news_terms(),
                wordvec_table,
                weights=_tfidf_weights(corpus.news_terms(), corpus),
            )
            vecs = {}
            for i, paper in enumerate(candidates):
                terms = corpus.candidate_terms(i)
                vecs[paper.paper_id] = avg_wordvec(
                    terms, wordvec_table, weights=_tfidf_weights(terms, corpus)
                )
        return rerank(news_vec, vecs, news_id=news.source_id)

    if backend == "remote":
        if not config.embed_endpoint:
            raise ValueError("backend 'remote' needs endpoints.embed configured")
        endpoint = ServiceEndpoint(config.embed_endpoint, config.endpoint_timeout_s)
        sentences = [sentence_text(news, i) for i in range(len(news.sentences))]
        if not sentences:
            raise ValueError(f"news {news.source_id!r} has no sentences to embed")
        # Sentence-wise embedding sidesteps input-length limits; the news
        # vector is the mean over its sentence vectors.
        sentence_vecs = _embed_batched(
            sentences, endpoint, config.embed_model, config.embed_batch
        )
        news_vec = np.mean(sentence_vecs, axis=0)
        texts = [f"{paper.title}. {paper.abstract}" for paper in candidates]
        candidate_vecs = _embed_batched(
            texts, endpoint, config.embed_model, config.embed_batch
        )
        vecs = {
            paper.paper_id: vec for paper, vec in zip(candidates, candidate_vecs)
        }
        return rerank(news_vec, vecs, news_id=news.source_id)

    raise ValueError(f"unknown backend {backend!r}")


def run_pipeline(
    news: CleanDocument,
    index: InvertedIndex,
    config: RunConfig,
    wordvec_table: WordVectorTable | None = None,
) -> PipelineResult:
    """Run extraction, retrieval and re-ranking for one news article."""
    t_start = time.perf_counter()
    phrases = extract_phrases(news, config)
    queries = generate_queries(phrases, config.caps)
    if not queries:
        return PipelineResult(
            ranked=RankedList(news_id=news.source_id, items=()),
            n_phrases=len(phrases),
            n_queries=0,
            n_candidates=0,
            t_prr_s=0.0,
            t_all_s=time.perf_counter() - t_start,
            notice="no queries generated",
        )
    pool: CandidateSet = retrieve_candidates(
        index, queries, config.caps.per_query_k, news_id=news.source_id
    )
    if not pool.candidates:
        return PipelineResult(
            ranked=RankedList(news_id=news.source_id, items=()),
            n_phrases=len(phrases),
            n_queries=len(queries),
            n_candidates=0,
            t_prr_s=0.0,
            t_all_s=time.perf_counter() - t_start,
            notice="no candidates retrieved",
        )
    t_rerank = time.perf_counter()
    ranked = rank_candidates(news, pool.candidates, config, wordvec_table)
    t_end = time.perf_counter()
    return PipelineResult(
        ranked=ranked,
        n_phrases=len(phrases),
        n_queries=len(queries),
        n_candidates=len(pool.candidates),
        t_prr_s=t_end - t_rerank,
        t_all_s=t_end - t_start,
    )
