"""BM25 inverted index, conjunctive query generation, and candidate retrieval.

The local index stands in for the digital-library search API the
pipeline queries in production; a thin client for such an API lives at
the bottom of the module.  The index is immutable once built and safe
to share across threads; individual searches are independent.
"""

from __future__ import annotations

import itertools
import json
import math
import threading
import time
import xml.etree.ElementTree as ET
from bisect import bisect_left
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .phrases import Phrase, dedup_phrases
from .remote import RemoteServiceError, ServiceEndpoint, get_text
from .textprep import content_terms

INDEX_MAGIC = "paperscout-index"
INDEX_VERSION = 1

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75


@dataclass(frozen=True)
class PaperRecord:
    paper_id: str
    title: str
    abstract: str = ""
    authors: tuple[str, ...] = ()


@dataclass(frozen=True)
class ConjunctiveQuery:
    """One to three phrases, all of which must match."""

    phrases: tuple[Phrase, ...]

    def __post_init__(self) -> None:
        if not 1 <= len(self.phrases) <= 3:
            raise ValueError(f"query must hold 1..3 phrases, got {len(self.phrases)}")
        texts = [p.text.casefold() for p in self.phrases]
        if len(set(texts)) != len(texts):
            raise ValueError(f"query phrases must be pairwise distinct: {texts}")


@dataclass(frozen=True)
class QueryCaps:
    max_phrases: int = 30
    max_arity: int = 3
    max_queries: int = 300
    per_query_k: int = 10


@dataclass
class InvertedIndex:
    postings: dict[str, list[tuple[int, int]]]
    doc_len: list[int]
    avgdl: float
    df: dict[str, int]
    n_docs: int
    k1: float
    b: float
    papers: list[PaperRecord] = field(default_factory=list)

    @property
    def vocab_size(self) -> int:
        return len(self.postings)


@dataclass
class CandidateSet:
    news_id: str
    candidates: list[PaperRecord]
    provenance: dict[str, list[int]]  # paper_id -> indices of matching queries


# --------------------------------------------------------------------------
# corpus loading
# --------------------------------------------------------------------------


def load_corpus(path: str | Path) -> list[PaperRecord]:
    """Read a JSONL corpus of {paper_id, title, abstract, authors} records.

    Malformed lines raise ValueError naming the line number.
    """
    papers: list[PaperRecord] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                papers.append(
                    PaperRecord(
                        paper_id=record["paper_id"],
                        title=record["title"],
                        abstract=record.get("abstract", ""),
                        authors=tuple(record.get("authors", ())),
                    )
                )
            except (KeyError, TypeError, json.JSONDecodeError) as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
    return papers


def save_corpus(papers: Iterable[PaperRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for paper in papers:
            handle.write(
                json.dumps(
                    {
                        "paper_id": paper.paper_id,
                        "title": paper.title,
                        "abstract": paper.abstract,
                        "authors": list(paper.authors),
                    },
                    sort_keys=True,
                )
                + "\n"
            )


# --------------------------------------------------------------------------
# index construction and scoring
# --------------------------------------------------------------------------


def index_terms(paper: PaperRecord) -> list[str]:
    """The analyzed token stream of one paper: title+abstract, case-folded,
    stopwords dropped."""
    return content_terms(paper.title + " " + paper.abstract)


def build_index(
    corpus: list[PaperRecord], k1: float = DEFAULT_K1, b: float = DEFAULT_B
) -> InvertedIndex:
    """Build the inverted index over a paper corpus.

    Deterministic: rebuilding over the same corpus yields identical
    postings. Duplicate paper ids and an empty corpus are errors.
    """
    if not corpus:
        raise ValueError("cannot index an empty corpus")
    if k1 <= 0:
        raise ValueError(f"k1 must be positive, got {k1}")
    if not 0 <= b <= 1:
        raise ValueError(f"b must lie in [0, 1], got {b}")
    seen: set[str] = set()
    for paper in corpus:
        if paper.paper_id in seen:
            raise ValueError(f"duplicate paper_id {paper.paper_id!r}")
        seen.add(paper.paper_id)

    postings: dict[str, list[tuple[int, int]]] = {}
    doc_len: list[int] = []
    for ordinal, paper in enumerate(corpus):
        terms = index_terms(paper)
        doc_len.append(len(terms))
        counts: dict[str, int] = {}
        for term in terms:
            counts[term] = counts.get(term, 0) + 1
        for term in sorted(counts):
            postings.setdefault(term, []).append((ordinal, counts[term]))

    df = {term: len(plist) for term, plist in postings.items()}
    avgdl = sum(doc_len) / len(doc_len)
    return InvertedIndex(
        postings=postings,
        doc_len=doc_len,
        avgdl=avgdl,
        df=df,
        n_docs=len(corpus),
        k1=k1,
        b=b,
        papers=list(corpus),
    )


def _term_frequency(index: InvertedIndex, term: str, doc_ordinal: int) -> int:
    plist = index.postings.get(term)
    if not plist:
        return 0
    pos = bisect_left(plist, (doc_ordinal, 0))
    if pos < len(plist) and plist[pos][0] == doc_ordinal:
        return plist[pos][1]
    return 0


def idf(index: InvertedIndex, term: str) -> float:
    """Smoothed inverse document frequency, never negative."""
    n = index.df.get(term, 0)
    return math.log(1.0 + (index.n_docs - n + 0.5) / (n + 0.5))


def bm25_score(index: InvertedIndex, terms: Iterable[str], doc_ordinal: int) -> float:
    """BM25 score of a document for a query-term multiset.

    Each occurrence in ``terms`` contributes
    idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl));
    terms absent from the document contribute exactly zero.
    """
    if not 0 <= doc_ordinal < index.n_docs:
        raise IndexError(f"doc ordinal {doc_ordinal} out of range")
    dl = index.doc_len[doc_ordinal]
    length_ratio = dl / index.avgdl if index.avgdl > 0 else 1.0
    norm = index.k1 * (1.0 - index.b + index.b * length_ratio)
    score = 0.0
    for term in terms:
        tf = _term_frequency(index, term, doc_ordinal)
        if tf == 0:
            continue
        score += idf(index, term) * (tf * (index.k1 + 1.0)) / (tf + norm)
    return score


# --------------------------------------------------------------------------
# query generation and search
# --------------------------------------------------------------------------


def generate_queries(phrases: list[Phrase], caps: QueryCaps = QueryCaps()) -> list[ConjunctiveQuery]:
    """All 1..max_arity combinations of the top phrases, rank-ordered.

    The top ``caps.max_phrases`` phrases by score are combined into all
    singletons, then pairs, then triples, each block in lexicographic
    order of phrase rank, truncated at ``caps.max_queries``.
    """
    if caps.max_arity > 3:
        raise ValueError("conjunctive queries support at most 3 phrases")
    top = dedup_phrases(phrases)[: caps.max_phrases]
    queries: list[ConjunctiveQuery] = []
    for arity in range(1, min(caps.max_arity, len(top)) + 1):
        for combo in itertools.combinations(top, arity):
            if len(queries) >= caps.max_queries:
                return queries
            queries.append(ConjunctiveQuery(phrases=combo))
    return queries


def query_terms(query: ConjunctiveQuery) -> list[str]:
    """The analyzed token multiset of a query (all phrases concatenated)."""
    terms: list[str] = []
    for phrase in query.phrases:
        terms.extend(content_terms(phrase.text))
    return terms


def search(index: InvertedIndex, query: ConjunctiveQuery, k: int = 10) -> list[tuple[int, float]]:
    """Top-k (doc_ordinal, score) for a conjunctive query.

    A document qualifies only if it contains every distinct token of
    every phrase; qualifying documents are ranked by BM25 over the
    query-token multiset, ties broken by ascending ordinal.  A query
    whose tokens all analyze away yields no results.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    terms = query_terms(query)
    required = sorted(set(terms))
    if not required:
        return []
    # Intersect postings, rarest term first.
    required.sort(key=lambda t: index.df.get(t, 0))
    if index.df.get(required[0], 0) == 0:
        return []
    docs = {ordinal for ordinal, _ in index.postings[required[0]]}
    for term in required[1:]:
        plist = index.postings.get(term)
        if not plist:
            return []
        docs &= {ordinal for ordinal, _ in plist}
        if not docs:
            return []
    scored = [(ordinal, bm25_score(index, terms, ordinal)) for ordinal in docs]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:k]


def _candidate_key(paper: PaperRecord) -> tuple[str, tuple[str, ...]]:
    title = "".join(ch for ch in paper.title.casefold() if ch.isalnum() or ch.isspace())
    title = " ".join(title.split())
    return title, tuple(sorted(a.casefold().strip() for a in paper.authors))


def retrieve_candidates(
    index: InvertedIndex,
    queries: list[ConjunctiveQuery],
    per_query_k: int = 10,
    news_id: str = "",
) -> CandidateSet:
    """Union of the top per-query results, deduplicated.

    Two results are duplicates when they agree on the case-folded,
    punctuation-stripped title and the sorted case-folded author list.
    Provenance records, per retained paper, the indices of the queries
    that returned it (or its duplicate).
    """
    candidates: list[PaperRecord] = []
    provenance: dict[str, list[int]] = {}
    retained: dict[tuple[str, tuple[str, ...]], str] = {}
    for q_index, query in enumerate(queries):
        for ordinal, _score in search(index, query, per_query_k):
            paper = index.papers[ordinal]
            key = _candidate_key(paper)
            kept_id = retained.get(key)
            if kept_id is None:
                retained[key] = paper.paper_id
                candidates.append(paper)
                provenance[paper.paper_id] = [q_index]
            elif provenance[kept_id][-1] != q_index:
                provenance[kept_id].append(q_index)
    return CandidateSet(news_id=news_id, candidates=candidates, provenance=provenance)


# --------------------------------------------------------------------------
# persistence
# --------------------------------------------------------------------------


def save_index(index: InvertedIndex, path: str | Path) -> None:
    """Write the index as line-oriented JSON with a version header."""
    with open(path, "w", encoding="utf-8") as handle:
        header = {
            "magic": INDEX_MAGIC,
            "version": INDEX_VERSION,
            "k1": index.k1,
            "b": index.b,
            "n_docs": index.n_docs,
        }
        handle.write(json.dumps(header, sort_keys=True) + "\n")
        for paper, length in zip(index.papers, index.doc_len):
            row = {
                "paper_id": paper.paper_id,
                "title": paper.title,
                "abstract": paper.abstract,
                "authors": list(paper.authors),
                "len": length,
            }
            handle.write(json.dumps(row, sort_keys=True) + "\n")
        for term in sorted(index.postings):
            row = {"t": term, "p": [[o, f] for o, f in index.postings[term]]}
            handle.write(json.dumps(row, sort_keys=True) + "\n")


def load_index(path: str | Path) -> InvertedIndex:
    """Load an index written by :func:`save_index` (lossless round-trip)."""
    with open(path, encoding="utf-8") as handle:
        try:
            header = json.loads(handle.readline())
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not an index file: {exc}") from exc
        if header.get("magic") != INDEX_MAGIC:
            raise ValueError(f"{path}: not an index file (bad magic)")
        if header.get("version") != INDEX_VERSION:
            raise ValueError(f"{path}: unsupported index version {header.get('version')!r}")
        n_docs = int(header["n_docs"])
        papers: list[PaperRecord] = []
        doc_len: list[int] = []
        for _ in range(n_docs):
            row = json.loads(handle.readline())
            papers.append(
                PaperRecord(
                    paper_id=row["paper_id"],
                    title=row["title"],
                    abstract=row["abstract"],
                    authors=tuple(row["authors"]),
                )
            )
            doc_len.append(int(row["len"]))
        postings: dict[str, list[tuple[int, int]]] = {}
        for line in handle:
            if not line.strip():
                continue
            row = json.loads(line)
            postings[row["t"]] = [(int(o), int(f)) for o, f in row["p"]]
    df = {term: len(plist) for term, plist in postings.items()}
    avgdl = sum(doc_len) / len(doc_len) if doc_len else 0.0
    return InvertedIndex(
        postings=postings,
        doc_len=doc_len,
        avgdl=avgdl,
        df=df,
        n_docs=n_docs,
        k1=float(header["k1"]),
        b=float(header["b"]),
        papers=papers,
    )


# --------------------------------------------------------------------------
# remote search API client
# --------------------------------------------------------------------------

_ATOM_NS = {"atom": "http://www.w3.org/2005/Atom"}

_throttle_lock = threading.Lock()
_last_request: dict[str, float] = {}


def build_search_params(query: ConjunctiveQuery, k: int) -> dict[str, str | int]:
    """Deterministic query parameters: phrases quoted and AND-joined."""
    joined = " AND ".join(f'all:"{p.text}"' for p in query.phrases)
    return {"search_query": joined, "start": 0, "max_results": k}


def _respect_rate_limit(endpoint: ServiceEndpoint) -> None:
    if endpoint.min_interval_s <= 0:
        return
    with _throttle_lock:
        last = _last_request.get(endpoint.url, 0.0)
        wait = endpoint.min_interval_s - (time.monotonic() - last)
        if wait > 0:
            time.sleep(wait)
        _last_request[endpoint.url] = time.monotonic()


def query_remote_api(
    endpoint: ServiceEndpoint, query: ConjunctiveQuery, k: int = 10
) -> list[PaperRecord]:
    """Search a remote Atom-feed paper API for a conjunctive query.

    Network failures and malformed feeds raise RemoteServiceError; the
    configured minimum inter-request delay is honored per endpoint.
    """
    _respect_rate_limit(endpoint)
    feed_text = get_text(endpoint, build_search_params(query, k))
    try:
        root = ET.fromstring(feed_text)
    except ET.ParseError as exc:
        raise RemoteServiceError(endpoint, f"feed is not well-formed XML: {exc}", exc) from exc
    papers: list[PaperRecord] = []
    for entry in root.findall("atom:entry", _ATOM_NS):
        paper_id = entry.findtext("atom:id", default="", namespaces=_ATOM_NS).strip()
        title = " ".join(
            entry.findtext("atom:title", default="", namespaces=_ATOM_NS).split()
        )
        abstract = " ".join(
            entry.findtext("atom:summary", default="", namespaces=_ATOM_NS).split()
        )
        authors = tuple(
            name.text.strip()
            for name in entry.findall("atom:author/atom:name", _ATOM_NS)
            if name.text
        )
        if not paper_id or not title:
            raise RemoteServiceError(endpoint, "feed entry lacks an id or title")
        papers.append(
            PaperRecord(paper_id=paper_id, title=title, abstract=abstract, authors=authors)
        )
    return papers[:k]
