"""Keyphrase extraction from prepared documents.

Three extractors produce scored candidate phrases: an unsupervised
graph ranker over word co-occurrences, a grammar chunker over POS
tags, and a client for a remote span-tagging service.  A small scorer
compares extracted phrases against gold annotations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .remote import RemoteServiceError, ServiceEndpoint, post_json
from .textprep import CleanDocument, Pos, byte_length

# Tags whose tokens may enter the co-occurrence graph or a noun chunk.
_NOMINAL = (Pos.NOUN, Pos.PROPER_NOUN)
_GRAPH_TAGS = (Pos.NOUN, Pos.PROPER_NOUN, Pos.ADJ)

MAX_CHUNK_TOKENS = 6


class Extractor(Enum):
    TEXTRANK = "textrank"
    NP_CHUNK = "chunks"
    REMOTE = "remote"


@dataclass(frozen=True)
class Phrase:
    """A candidate keyphrase with provenance.

    ``spans`` holds (sentence_index, token_start, token_end) ranges
    into the source document's sentences; ``tokens`` are the normalized
    member words and ``text`` is their space-joined form.
    """

    tokens: tuple[str, ...]
    text: str
    score: float
    extractor: Extractor
    spans: tuple[tuple[int, int, int], ...]


@dataclass(frozen=True)
class ExtractionGold:
    source_id: str
    gold_phrases: frozenset[str]


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class TextRankParams:
    window: int = 2
    damping: float = 0.85
    max_iter: int = 100
    tol: float = 1e-6
    keep_ratio: float = 1.0 / 3.0


# --------------------------------------------------------------------------
# graph ranking
# --------------------------------------------------------------------------


def build_cooccurrence_graph(
    doc: CleanDocument, window: int = 2
) -> tuple[list[str], dict[tuple[int, int], float]]:
    """Undirected co-occurrence graph over the filtered words of ``doc``.

    Nodes are the distinct norms of NOUN/PROPER_NOUN/ADJ tokens in
    first-occurrence order.  Two nodes are joined when their word
    positions within a sentence differ by less than ``window`` (word
    positions count word tokens only, so punctuation does not widen
    gaps); edge weights count co-occurrences.  window=2 is strict
    adjacency.
    """
    node_of: dict[str, int] = {}
    weights: dict[tuple[int, int], float] = {}
    for sentence in doc.sentences:
        words = [t for t in sentence if t.is_word]
        kept = [
            (pos, t.norm)
            for pos, t in enumerate(words)
            if t.pos in _GRAPH_TAGS
        ]
        for norm in (n for _, n in kept):
            if norm not in node_of:
                node_of[norm] = len(node_of)
        for i, (pos_i, norm_i) in enumerate(kept):
            for pos_j, norm_j in kept[i + 1 :]:
                if pos_j - pos_i >= window:
                    break
                if norm_i == norm_j:
                    continue
                a, b = node_of[norm_i], node_of[norm_j]
                key = (a, b) if a < b else (b, a)
                weights[key] = weights.get(key, 0.0) + 1.0
    return list(node_of), weights


def rank_graph_nodes(
    n_nodes: int,
    edges: dict[tuple[int, int], float],
    *,
    damping: float = 0.85,
    max_iter: int = 100,
    tol: float = 1e-6,
    init: list[float] | None = None,
) -> list[float]:
    """Damped power iteration with per-node normalization.

    Iterates s_i = (1-d) + d * sum_j w_ij / deg_j * s_j to ``tol`` and
    rescales the result to sum to ``n_nodes``, so a converged connected
    graph keeps its fixed point and isolated nodes still land at a
    comparable scale.  The ranking is invariant to any uniform positive
    scaling of ``init``.
    """
    if n_nodes == 0:
        return []
    neighbors: list[list[tuple[int, float]]] = [[] for _ in range(n_nodes)]
    degree = [0.0] * n_nodes
    for (a, b), w in edges.items():
        neighbors[a].append((b, w))
        neighbors[b].append((a, w))
        degree[a] += w
        degree[b] += w
    scores = list(init) if init is not None else [1.0] * n_nodes
    if len(scores) != n_nodes:
        raise ValueError("init vector length must equal the node count")
    for _ in range(max_iter):
        updated = [
            (1.0 - damping)
            + damping * sum(w / degree[j] * scores[j] for j, w in neighbors[i])
            for i in range(n_nodes)
        ]
        delta = max(abs(u - s) for u, s in zip(updated, scores))
        scores = updated
        if delta < tol:
            break
    total = sum(scores)
    if total > 0:
        scale = n_nodes / total
        scores = [s * scale for s in scores]
    return scores


def textrank_scores(
    doc: CleanDocument, params: TextRankParams = TextRankParams()
) -> dict[str, float]:
    """Normalized graph-rank score per filtered word of ``doc``."""
    nodes, edges = build_cooccurrence_graph(doc, params.window)
    scores = rank_graph_nodes(
        len(nodes),
        edges,
        damping=params.damping,
        max_iter=params.max_iter,
        tol=params.tol,
    )
    return dict(zip(nodes, scores))


def extract_textrank(
    doc: CleanDocument, params: TextRankParams = TextRankParams()
) -> list[Phrase]:
    """Graph-ranked keyphrases.

    Keeps the top ceil(keep_ratio * |nodes|) words by score, collapses
    runs of kept words that are adjacent in the text into multiword
    phrases, and scores each phrase as the sum of its member word
    scores.  Result is sorted by score descending.
    """
    nodes, edges = build_cooccurrence_graph(doc, params.window)
    if not nodes:
        return []
    scores = rank_graph_nodes(
        len(nodes),
        edges,
        damping=params.damping,
        max_iter=params.max_iter,
        tol=params.tol,
    )
    by_word = dict(zip(nodes, scores))
    n_keep = math.ceil(params.keep_ratio * len(nodes))
    order = {word: i for i, word in enumerate(nodes)}
    kept = set(sorted(nodes, key=lambda w: (-by_word[w], order[w]))[:n_keep])

    phrases: dict[str, Phrase] = {}
    for s_idx, sentence in enumerate(doc.sentences):
        run: list[int] = []
        for t_idx, token in enumerate(sentence):
            if token.is_word and token.norm in kept:
                run.append(t_idx)
            elif run:
                _collapse_run(phrases, doc, s_idx, run, by_word)
                run = []
        if run:
            _collapse_run(phrases, doc, s_idx, run, by_word)
    out = list(phrases.values())
    first_seen = {p.text: i for i, p in enumerate(out)}
    out.sort(key=lambda p: (-p.score, first_seen[p.text]))
    return out


def _collapse_run(
    phrases: dict[str, Phrase],
    doc: CleanDocument,
    s_idx: int,
    run: list[int],
    by_word: dict[str, float],
) -> None:
    tokens = tuple(doc.sentences[s_idx][i].norm for i in run)
    text = " ".join(tokens)
    span = (s_idx, run[0], run[-1] + 1)
    if text in phrases:
        existing = phrases[text]
        phrases[text] = replace(existing, spans=existing.spans + (span,))
    else:
        phrases[text] = Phrase(
            tokens=tokens,
            text=text,
            score=sum(by_word[t] for t in tokens),
            extractor=Extractor.TEXTRANK,
            spans=(span,),
        )


# --------------------------------------------------------------------------
# grammar chunking
# --------------------------------------------------------------------------


def extract_np_chunks(doc: CleanDocument) -> list[Phrase]:
    """Maximal ADJ* (NOUN|PROPER_NOUN)+ chunks of 1..6 tokens.

    Score is the token count.  Duplicate texts keep the first phrase
    with the span lists merged.
    """
    phrases: dict[str, Phrase] = {}
    for s_idx, sentence in enumerate(doc.sentences):
        n = len(sentence)
        i = 0
        while i < n:
            j = i
            while j < n and sentence[j].pos is Pos.ADJ:
                j += 1
            k = j
            while k < n and sentence[k].pos in _NOMINAL:
                k += 1
            if k == j:  # no nominal head: restart after the scanned run
                i = j + 1 if j == i else j
                continue
            if k - i <= MAX_CHUNK_TOKENS:
                tokens = tuple(t.norm for t in sentence[i:k])
                text = " ".join(tokens)
                span = (s_idx, i, k)
                if text in phrases:
                    existing = phrases[text]
                    phrases[text] = replace(existing, spans=existing.spans + (span,))
                else:
                    phrases[text] = Phrase(
                        tokens=tokens,
                        text=text,
                        score=float(len(tokens)),
                        extractor=Extractor.NP_CHUNK,
                        spans=(span,),
                    )
            i = k
    return list(phrases.values())


# --------------------------------------------------------------------------
# remote span extraction
# --------------------------------------------------------------------------


def extract_remote(doc: CleanDocument, endpoint: ServiceEndpoint) -> list[Phrase]:
    """Fetch tagged spans for ``doc.text`` from a remote extractor.

    Sends {"text": ...} to POST /extract and maps the returned byte
    spans onto tokens; spans that cut through a token are snapped
    outward to whole tokens.  Transport failures and malformed payloads
    raise RemoteServiceError - a broken service is never reported as
    an empty extraction.
    """
    body = post_json(endpoint, "/extract", {"text": doc.text})
    spans = body.get("spans")
    if not isinstance(spans, list):
        raise RemoteServiceError(endpoint, "response is missing the 'spans' list")
    limit = byte_length(doc.text)
    phrases: list[Phrase] = []
    for entry in spans:
        try:
            start, end = int(entry["start"]), int(entry["end"])
            score = float(entry["score"])
        except (KeyError, TypeError, ValueError) as exc:
            raise RemoteServiceError(endpoint, f"malformed span {entry!r}", exc) from exc
        if not math.isfinite(score):
            raise RemoteServiceError(endpoint, f"non-finite span score in {entry!r}")
        if not (0 <= start < end <= limit):
            raise RemoteServiceError(
                endpoint, f"span ({start}, {end}) outside text of {limit} bytes"
            )
        covered = [
            (s_idx, t_idx)
            for s_idx, sentence in enumerate(doc.sentences)
            for t_idx, token in enumerate(sentence)
            if token.char_span[0] < end and token.char_span[1] > start
        ]
        if not covered:
            continue
        token_spans: list[tuple[int, int, int]] = []
        for s_idx in sorted({s for s, _ in covered}):
            indices = [t for s, t in covered if s == s_idx]
            token_spans.append((s_idx, min(indices), max(indices) + 1))
        tokens = tuple(
            doc.sentences[s_idx][t].norm
            for s_idx, lo, hi in token_spans
            for t in range(lo, hi)
        )
        phrases.append(
            Phrase(
                tokens=tokens,
                text=" ".join(tokens),
                score=score,
                extractor=Extractor.REMOTE,
                spans=tuple(token_spans),
            )
        )
    return phrases


# --------------------------------------------------------------------------
# dedup and scoring
# --------------------------------------------------------------------------


def dedup_phrases(phrases: list[Phrase]) -> list[Phrase]:
    """Case-folded exact-text dedup keeping the best score per text.

    Output is ordered by (score descending, first occurrence) and its
    texts are pairwise distinct after case folding.
    """
    best: dict[str, Phrase] = {}
    first_seen: dict[str, int] = {}
    for i, phrase in enumerate(phrases):
        key = phrase.text.casefold()
        if key not in best:
            best[key] = replace(phrase, text=key)
            first_seen[key] = i
        elif phrase.score > best[key].score:
            best[key] = replace(phrase, text=key)
    out = list(best.values())
    out.sort(key=lambda p: (-p.score, first_seen[p.text]))
    return out


def score_extraction(pred: list[Phrase], gold: ExtractionGold) -> PRF:
    """Exact-match precision/recall/F1 on normalized phrase strings."""
    if not gold.gold_phrases:
        raise ValueError(f"gold for {gold.source_id!r} is empty: recall undefined")
    predicted = {p.text.casefold() for p in pred}
    hits = len(predicted & gold.gold_phrases)
    precision = hits / len(predicted) if predicted else 0.0
    recall = hits / len(gold.gold_phrases)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return PRF(precision=precision, recall=recall, f1=f1)
