"""Document representations and cosine re-ranking of candidate papers.

A retrieval corpus is the news article plus its candidate papers; all
TFIDF document frequencies are computed over exactly that set, so the
same paper can weigh differently for different news articles.  Dense
representations come from a word-vector table or from a remote
embedding service.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .index import PaperRecord, index_terms
from .remote import RemoteServiceError, ServiceEndpoint, post_json
from .textprep import CleanDocument, stopwords

log = logging.getLogger(__name__)


@dataclass
class RetrievalCorpus:
    """Vocabulary and document frequencies over one news + candidate set."""

    news: CleanDocument
    candidates: list[PaperRecord]
    vocab: dict[str, int]
    df: dict[str, int]
    n_docs: int
    _news_terms: list[str] = field(repr=False, default_factory=list)
    _candidate_terms: list[list[str]] = field(repr=False, default_factory=list)

    def news_terms(self) -> list[str]:
        return list(self._news_terms)

    def candidate_terms(self, position: int) -> list[str]:
        return list(self._candidate_terms[position])


@dataclass(frozen=True)
class SparseVector:
    """L2-normalized sparse vector over a retrieval-corpus vocabulary."""

    entries: tuple[tuple[int, float], ...]  # (term_index, weight), indices increasing
    dim: int


@dataclass(frozen=True)
class RankedList:
    news_id: str
    items: tuple[tuple[str, float], ...]  # (paper_id, similarity), non-increasing


Vector = Union[SparseVector, np.ndarray, Sequence[float]]


# --------------------------------------------------------------------------
# retrieval corpus and TFIDF
# --------------------------------------------------------------------------


def document_terms(doc: CleanDocument) -> list[str]:
    """Stopword-filtered normalized word tokens of a prepared document."""
    stop = stopwords()
    return [t.norm for t in doc.iter_tokens() if t.is_word and t.norm not in stop]


def build_retrieval_corpus(
    news: CleanDocument, candidates: list[PaperRecord]
) -> RetrievalCorpus:
    """Vocabulary and df over the news article plus candidate papers.

    Candidate text is title+abstract, analyzed exactly as for indexing.
    """
    if not candidates:
        raise ValueError("a retrieval corpus needs at least one candidate")
    news_terms = document_terms(news)
    candidate_terms = [index_terms(paper) for paper in candidates]

    df: dict[str, int] = {}
    for terms in [news_terms, *candidate_terms]:
        for term in set(terms):
            df[term] = df.get(term, 0) + 1
    vocab = {term: i for i, term in enumerate(sorted(df))}
    return RetrievalCorpus(
        news=news,
        candidates=list(candidates),
        vocab=vocab,
        df=df,
        n_docs=len(candidates) + 1,
        _news_terms=news_terms,
        _candidate_terms=candidate_terms,
    )


def term_idf(corpus: RetrievalCorpus, term: str) -> float:
    """Smoothed idf over the retrieval corpus: ln((n+1)/(df+1)) + 1."""
    return math.log((corpus.n_docs + 1.0) / (corpus.df.get(term, 0) + 1.0)) + 1.0


def tfidf_vector(doc_terms: Iterable[str], corpus: RetrievalCorpus) -> SparseVector:
    """L2-normalized TFIDF vector of a term multiset.

    Out-of-vocabulary terms are ignored; a document with no in-vocab
    terms yields the zero vector (flagged in the log, not an error).
    """
    counts = Counter(t for t in doc_terms if t in corpus.vocab)
    if not counts:
        log.warning("tfidf: document has no in-vocabulary terms; zero vector")
        return SparseVector(entries=(), dim=len(corpus.vocab))
    weighted = {
        corpus.vocab[term]: tf * term_idf(corpus, term) for term, tf in counts.items()
    }
    norm = math.sqrt(sum(w * w for w in weighted.values()))
    entries = tuple((i, w / norm) for i, w in sorted(weighted.items()))
    return SparseVector(entries=entries, dim=len(corpus.vocab))


# --------------------------------------------------------------------------
# word-vector table and averaging
# --------------------------------------------------------------------------


class WordVectorTable:
    """Word vectors loaded from a text table.

    Format: one line per word, the word then ``dim`` floats, all
    space-separated, with an optional first header line "count dim".
    """

    def __init__(self, vectors: Mapping[str, np.ndarray], dim: int):
        self.dim = dim
        self._vectors = dict(vectors)

    def __contains__(self, word: str) -> bool:
        return word in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def get(self, word: str) -> np.ndarray | None:
        return self._vectors.get(word)

    @classmethod
    def load(cls, path: str | Path) -> "WordVectorTable":
        vectors: dict[str, np.ndarray] = {}
        dim: int | None = None
        with open(path, encoding="utf-8") as handle:
            first = handle.readline().split()
            lines = handle
            if len(first) == 2 and all(p.lstrip("-").isdigit() for p in first):
                dim = int(first[1])
            elif first:
                word, values = first[0], np.array(first[1:], dtype=np.float64)
                vectors[word] = values
                dim = values.size
            for lineno, line in enumerate(lines, start=2):
                parts = line.split()
                if not parts:
                    continue
                word, values = parts[0], np.array(parts[1:], dtype=np.float64)
                if dim is None:
                    dim = values.size
                if values.size != dim:
                    raise ValueError(
                        f"{path}: line {lineno}: expected {dim} values, got {values.size}"
                    )
                vectors[word] = values
        if dim is None:
            raise ValueError(f"{path}: empty word-vector table")
        return cls(vectors, dim)


def avg_wordvec(
    doc_terms: Sequence[str],
    vectors: WordVectorTable,
    weights: Mapping[str, float] | None = None,
) -> np.ndarray:
    """Averaged word vector of a document.

    Unweighted: the mean over token occurrences.  Weighted: the
    weighted mean over distinct terms, sum(w*v)/sum(w) - weights are
    expected to carry the frequency information already (e.g. TFIDF).
    Out-of-table tokens are skipped; no usable token yields the zero
    vector (flagged in the log).
    """
    total = np.zeros(vectors.dim, dtype=np.float64)
    if weights is None:
        count = 0
        for term in doc_terms:
            vec = vectors.get(term)
            if vec is not None:
                total += vec
                count += 1
        if count == 0:
            log.warning("avg_wordvec: no in-table tokens; zero vector")
            return total
        return total / count
    weight_sum = 0.0
    for term in dict.fromkeys(doc_terms):
        vec = vectors.get(term)
        weight = weights.get(term, 0.0)
        if vec is None or weight == 0.0:
            continue
        total += weight * vec
        weight_sum += weight
    if weight_sum == 0.0:
        log.warning("avg_wordvec: no weighted in-table tokens; zero vector")
        return total
    return total / weight_sum


# --------------------------------------------------------------------------
# remote embeddings
# --------------------------------------------------------------------------


def remote_embed(
    texts: Sequence[str], endpoint: ServiceEndpoint, model_name: str
) -> list[np.ndarray]:
    """Embed texts via the remote service, order-preserving.

    Raises RemoteServiceError on transport failure, a vector count that
    does not match the input, ragged dimensions, or non-finite values.
    """
    if not texts:
        return []
    body = post_json(endpoint, "/embed", {"texts": list(texts), "model": model_name})
    try:
        dim = int(body["dim"])
        rows = body["vectors"]
    except (KeyError, TypeError, ValueError) as exc:
        raise RemoteServiceError(endpoint, f"malformed embed response: {exc}", exc) from exc
    if not isinstance(rows, list) or len(rows) != len(texts):
        raise RemoteServiceError(
            endpoint, f"expected {len(texts)} vectors, got {len(rows) if isinstance(rows, list) else type(rows).__name__}"
        )
    out: list[np.ndarray] = []
    for i, row in enumerate(rows):
        vec = np.asarray(row, dtype=np.float64)
        if vec.ndim != 1 or vec.size != dim:
            raise RemoteServiceError(
                endpoint, f"vector {i} has shape {vec.shape}, expected ({dim},)"
            )
        if not np.all(np.isfinite(vec)):
            raise RemoteServiceError(endpoint, f"vector {i} contains non-finite values")
        out.append(vec)
    return out


# --------------------------------------------------------------------------
# cosine and ranking
# --------------------------------------------------------------------------


def _sparse_cosine(a: SparseVector, b: SparseVector) -> float:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    dot = 0.0
    i = j = 0
    while i < len(a.entries) and j < len(b.entries):
        ia, wa = a.entries[i]
        ib, wb = b.entries[j]
        if ia == ib:
            dot += wa * wb
            i += 1
            j += 1
        elif ia < ib:
            i += 1
        else:
            j += 1
    norm_a = math.sqrt(sum(w * w for _, w in a.entries))
    norm_b = math.sqrt(sum(w * w for _, w in b.entries))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return dot / (norm_a * norm_b)


def cosine(a: Vector, b: Vector) -> float:
    """Cosine similarity; zero-norm vectors compare as 0 by definition."""
    if isinstance(a, SparseVector) or isinstance(b, SparseVector):
        if not (isinstance(a, SparseVector) and isinstance(b, SparseVector)):
            raise ValueError("cannot mix sparse and dense vectors")
        return _sparse_cosine(a, b)
    va = np.asarray(a, dtype=np.float64)
    vb = np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape:
        raise ValueError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    # Scale by max-abs first so very large components cannot overflow.
    peak_a = float(np.max(np.abs(va))) if va.size else 0.0
    peak_b = float(np.max(np.abs(vb))) if vb.size else 0.0
    if peak_a == 0.0 or peak_b == 0.0:
        return 0.0
    ua = va / peak_a
    ub = vb / peak_b
    return float(np.dot(ua, ub) / (np.linalg.norm(ua) * np.linalg.norm(ub)))


def rerank(
    news_vec: Vector, candidate_vecs: Mapping[str, Vector], news_id: str = ""
) -> RankedList:
    """Rank candidates by cosine to the news vector.

    Sorted non-increasing, ties broken by ascending paper id;
    similarities are clamped to [-1, 1] against float round-off.
    """
    items = [
        (paper_id, max(-1.0, min(1.0, cosine(news_vec, vec))))
        for paper_id, vec in candidate_vecs.items()
    ]
    items.sort(key=lambda pair: (-pair[1], pair[0]))
    return RankedList(news_id=news_id, items=tuple(items))
