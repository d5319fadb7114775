"""Index construction, BM25 scoring, query generation, retrieval."""

from __future__ import annotations

import math
import random
import time

import pytest

from paperscout.index import (
    ConjunctiveQuery,
    PaperRecord,
    QueryCaps,
    bm25_score,
    build_index,
    build_search_params,
    generate_queries,
    index_terms,
    load_corpus,
    load_index,
    query_remote_api,
    query_terms,
    retrieve_candidates,
    save_index,
    search,
)
from paperscout.phrases import Extractor, Phrase
from paperscout.remote import RemoteServiceError, ServiceEndpoint


def paper(pid: str, title: str, abstract: str = "", authors=()) -> PaperRecord:
    return PaperRecord(paper_id=pid, title=title, abstract=abstract, authors=tuple(authors))


def phrase(text: str, score: float = 1.0) -> Phrase:
    return Phrase(
        tokens=tuple(text.casefold().split()),
        text=text,
        score=score,
        extractor=Extractor.NP_CHUNK,
        spans=((0, 0, len(text.split())),),
    )


from oracles import counting_oracle, linear_scan_oracle, rand_corpus, rand_word


# --------------------------------------------------------------------------
# build_index
# --------------------------------------------------------------------------


class TestBuildIndex:
    def test_direct_count_example(self):
        index = build_index([paper("p1", "a b b")])
        # "a" is a stopword; the document reduces to "b b".
        assert index.df == {"b": 1}
        assert index.postings == {"b": [(0, 2)]}
        assert index.avgdl == 2.0
        assert index.doc_len == [2]

    def test_empty_corpus_is_error(self):
        with pytest.raises(ValueError):
            build_index([])

    def test_duplicate_paper_id_is_error(self):
        with pytest.raises(ValueError, match="duplicate"):
            build_index([paper("p1", "x"), paper("p1", "y")])

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            build_index([paper("p1", "x")], k1=0.0)
        with pytest.raises(ValueError):
            build_index([paper("p1", "x")], b=1.5)

    def test_counts_match_oracle_on_random_corpus(self):
        corpus = rand_corpus(random.Random(42), 100)
        index = build_index(corpus)
        doc_tokens, df, tf = counting_oracle(corpus)
        assert index.df == df
        assert index.doc_len == [len(toks) for toks in doc_tokens]
        for term, plist in index.postings.items():
            assert plist == sorted(plist)
            assert plist == [
                (i, tf[i][term]) for i in range(len(corpus)) if term in tf[i]
            ]

    def test_rebuild_is_identical(self):
        corpus = rand_corpus(random.Random(9), 30)
        first = build_index(corpus)
        second = build_index(corpus)
        assert first.postings == second.postings
        assert first.doc_len == second.doc_len
        assert first.avgdl == second.avgdl


# --------------------------------------------------------------------------
# bm25_score
# --------------------------------------------------------------------------


class TestBm25Score:
    def test_absent_term_contributes_zero(self):
        index = build_index([paper("p1", "neutron star"), paper("p2", "quark soup")])
        base = bm25_score(index, ["neutron"], 0)
        assert bm25_score(index, ["neutron", "missing"], 0) == base
        assert bm25_score(index, ["missing"], 1) == 0.0

    def test_b_zero_removes_length_dependence(self):
        short = paper("s", "neutron star")
        long = paper("l", "neutron star " + " ".join(["filler"] * 30))
        index = build_index([short, long], b=0.0)
        assert bm25_score(index, ["neutron"], 0) == pytest.approx(
            bm25_score(index, ["neutron"], 1), abs=1e-12
        )

    def test_formula_oracle_on_toy_corpus(self):
        corpus = [
            paper("p1", "neutron star", "neutron star merger emits waves"),
            paper("p2", "quark soup", "dense quark matter inside neutron cores"),
            paper("p3", "star survey", "star catalog of nearby star systems"),
            paper("p4", "gravity notes", "classical field equations reviewed"),
            paper("p5", "neutron star star", "binary star systems with neutron flux"),
        ]
        index = build_index(corpus)
        terms = ["neutron", "star"]
        for ordinal in range(len(corpus)):
            expected = 0.0
            doc_tokens, df, tf = counting_oracle(corpus)
            lengths = [len(t) for t in doc_tokens]
            avgdl = sum(lengths) / len(lengths)
            for t in terms:
                freq = tf[ordinal].get(t, 0)
                if freq == 0:
                    continue
                idf = math.log(1 + (5 - df[t] + 0.5) / (df[t] + 0.5))
                denom = freq + 1.2 * (1 - 0.75 + 0.75 * lengths[ordinal] / avgdl)
                expected += idf * freq * (1.2 + 1) / denom
            assert bm25_score(index, terms, ordinal) == pytest.approx(expected, abs=1e-9)

    def test_score_nonnegative_and_monotone_in_tf(self):
        for reps in range(1, 6):
            docs = [paper("x", "alpha " * reps + "beta gamma"), paper("y", "beta")]
            index = build_index(docs)
            assert bm25_score(index, ["alpha"], 0) >= 0.0
        scores = []
        for reps in range(1, 6):
            docs = [
                paper("x", " ".join(["alpha"] * reps) + " " + " ".join(["pad"] * (10 - reps))),
                paper("y", "beta"),
            ]
            index = build_index(docs)
            scores.append(bm25_score(index, ["alpha"], 0))
        assert scores == sorted(scores)

    def test_invalid_ordinal(self):
        index = build_index([paper("p1", "x y")])
        with pytest.raises(IndexError):
            bm25_score(index, ["x"], 5)

    def test_multiset_counts_duplicates(self):
        index = build_index([paper("p1", "alpha beta"), paper("p2", "beta")])
        single = bm25_score(index, ["alpha"], 0)
        double = bm25_score(index, ["alpha", "alpha"], 0)
        assert double == pytest.approx(2 * single)


# --------------------------------------------------------------------------
# query generation
# --------------------------------------------------------------------------


class TestGenerateQueries:
    def test_singletons_then_pairs(self):
        phrases = [phrase("a a", 3), phrase("b b", 2), phrase("c c", 1)]
        queries = generate_queries(phrases, QueryCaps(max_arity=2, max_queries=100))
        texts = [tuple(p.text for p in q.phrases) for q in queries]
        assert texts == [
            ("a a",), ("b b",), ("c c",),
            ("a a", "b b"), ("a a", "c c"), ("b b", "c c"),
        ]

    def test_single_phrase(self):
        queries = generate_queries([phrase("only", 1)])
        assert len(queries) == 1
        assert queries[0].phrases[0].text == "only"

    def test_cap_rule(self):
        phrases = [phrase(f"p{i} q{i}", 10 - i) for i in range(10)]
        queries = generate_queries(phrases, QueryCaps(max_phrases=10, max_queries=15))
        assert len(queries) == 15
        texts = [tuple(p.text for p in q.phrases) for q in queries]
        assert texts[:10] == [(f"p{i} q{i}",) for i in range(10)]
        assert texts[10:] == [
            ("p0 q0", "p1 q1"), ("p0 q0", "p2 q2"), ("p0 q0", "p3 q3"),
            ("p0 q0", "p4 q4"), ("p0 q0", "p5 q5"),
        ]

    def test_empty_input(self):
        assert generate_queries([]) == []

    def test_arity_cap_enforced(self):
        with pytest.raises(ValueError):
            generate_queries([phrase("a", 1)], QueryCaps(max_arity=4))

    def test_duplicate_phrases_collapse_before_combining(self):
        phrases = [phrase("Same", 2), phrase("same", 1), phrase("other", 1)]
        queries = generate_queries(phrases, QueryCaps(max_arity=2))
        texts = [tuple(p.text for p in q.phrases) for q in queries]
        assert ("same", "other") in texts
        assert len(texts) == 3

    def test_query_invariants(self):
        with pytest.raises(ValueError):
            ConjunctiveQuery(phrases=())
        with pytest.raises(ValueError):
            ConjunctiveQuery(phrases=tuple(phrase(t) for t in "abcd"))
        with pytest.raises(ValueError):
            ConjunctiveQuery(phrases=(phrase("x"), phrase("x")))


# --------------------------------------------------------------------------
# search
# --------------------------------------------------------------------------


class TestSearch:
    def test_no_match(self):
        index = build_index([paper("p1", "alpha beta")])
        assert search(index, ConjunctiveQuery((phrase("missing"),)), 10) == []

    def test_single_match_ranks_first(self):
        index = build_index([paper("p1", "alpha beta"), paper("p2", "gamma delta")])
        results = search(index, ConjunctiveQuery((phrase("gamma"),)), 10)
        assert [ordinal for ordinal, _ in results] == [1]

    def test_and_containment(self):
        index = build_index(
            [paper("p1", "alpha beta"), paper("p2", "alpha"), paper("p3", "beta")]
        )
        results = search(index, ConjunctiveQuery((phrase("alpha beta"),)), 10)
        assert [ordinal for ordinal, _ in results] == [0]

    def test_stopword_only_query_matches_nothing(self):
        index = build_index([paper("p1", "alpha beta")])
        assert search(index, ConjunctiveQuery((phrase("the of and"),)), 10) == []

    def test_matches_linear_scan_oracle(self):
        rng = random.Random(77)
        corpus = rand_corpus(rng, 50)
        index = build_index(corpus)
        for trial in range(10):
            words = [rand_word(rng) for _ in range(2)]
            query = ConjunctiveQuery(
                (phrase(" ".join(words[:1])), phrase(" ".join(words[1:])))
            )
            got = search(index, query, 20)
            expected = linear_scan_oracle(corpus, query_terms(query), 1.2, 0.75, 20)
            assert [o for o, _ in got] == [o for o, _ in expected]
            for (_, a), (_, b) in zip(got, expected):
                assert a == pytest.approx(b, abs=1e-9)

    def test_results_sorted_and_contain_all_tokens(self):
        rng = random.Random(5)
        corpus = rand_corpus(rng, 60)
        index = build_index(corpus)
        for trial in range(20):
            q = ConjunctiveQuery((phrase(rand_word(rng)), phrase(rand_word(rng))))
            results = search(index, q, 10)
            scores = [s for _, s in results]
            assert scores == sorted(scores, reverse=True)
            needed = set(query_terms(q))
            for ordinal, _ in results:
                have = set(index_terms(corpus[ordinal]))
                assert needed <= have

    def test_k_limits_results(self):
        corpus = [paper(f"p{i}", "common word") for i in range(9)]
        index = build_index(corpus)
        assert len(search(index, ConjunctiveQuery((phrase("common"),)), 4)) == 4
        with pytest.raises(ValueError):
            search(index, ConjunctiveQuery((phrase("common"),)), 0)


# --------------------------------------------------------------------------
# candidate pooling
# --------------------------------------------------------------------------


class TestRetrieveCandidates:
    def test_same_paper_two_queries_merges_provenance(self):
        index = build_index([paper("p1", "alpha beta gamma")])
        queries = [
            ConjunctiveQuery((phrase("alpha"),)),
            ConjunctiveQuery((phrase("beta"),)),
        ]
        pool = retrieve_candidates(index, queries, per_query_k=10, news_id="n1")
        assert [p.paper_id for p in pool.candidates] == ["p1"]
        assert pool.provenance == {"p1": [0, 1]}
        assert pool.news_id == "n1"

    def test_disjoint_results_union(self):
        corpus = [paper(f"a{i}", f"alpha w{i}") for i in range(3)]
        corpus += [paper(f"b{i}", f"beta v{i}") for i in range(4)]
        index = build_index(corpus)
        queries = [
            ConjunctiveQuery((phrase("alpha"),)),
            ConjunctiveQuery((phrase("beta"),)),
        ]
        pool = retrieve_candidates(index, queries)
        assert len(pool.candidates) == 7

    def test_duplicate_title_and_authors_collapse(self):
        corpus = [
            paper("p1", "The Neutron Result!", "alpha", authors=["A. B", "c d"]),
            paper("p2", "the neutron result", "alpha", authors=["C D", "a. b"]),
            paper("p3", "the neutron result", "alpha", authors=["Someone Else"]),
        ]
        index = build_index(corpus)
        pool = retrieve_candidates(index, [ConjunctiveQuery((phrase("alpha"),))])
        ids = [p.paper_id for p in pool.candidates]
        assert ids == ["p1", "p3"]  # p2 duplicates p1; p3 has other authors
        assert pool.provenance["p1"] == [0]

    def test_pool_bounded_by_caps(self):
        rng = random.Random(3)
        corpus = rand_corpus(rng, 80)
        index = build_index(corpus)
        queries = [
            ConjunctiveQuery((phrase(rand_word(rng)),)) for _ in range(12)
        ]
        per_query_k = 5
        pool = retrieve_candidates(index, queries, per_query_k=per_query_k)
        assert len(pool.candidates) <= len(queries) * per_query_k


# --------------------------------------------------------------------------
# persistence
# --------------------------------------------------------------------------


class TestPersistence:
    def test_roundtrip_lossless(self, tmp_path):
        corpus = rand_corpus(random.Random(1), 25)
        index = build_index(corpus, k1=1.4, b=0.6)
        path = tmp_path / "corpus.idx"
        save_index(index, path)
        loaded = load_index(path)
        assert loaded == index

    def test_version_header_checked(self, tmp_path):
        path = tmp_path / "bogus.idx"
        path.write_text('{"magic": "something-else", "version": 1}\n')
        with pytest.raises(ValueError, match="magic"):
            load_index(path)
        path.write_text("not json at all\n")
        with pytest.raises(ValueError):
            load_index(path)

    def test_corpus_loader_reports_line(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text('{"paper_id": "p1", "title": "t"}\n{"title": "missing id"}\n')
        with pytest.raises(ValueError, match="line 2"):
            load_corpus(path)


# --------------------------------------------------------------------------
# remote search API
# --------------------------------------------------------------------------

FEED = """<?xml version="1.0" encoding="UTF-8"?>
<feed xmlns="http://www.w3.org/2005/Atom">
  <entry>
    <id>http://example.org/abs/1234.5678</id>
    <title>Dark matter halos
      in simulations</title>
    <summary>We study halos.</summary>
    <author><name>A. Author</name></author>
    <author><name>B. Author</name></author>
  </entry>
  <entry>
    <id>http://example.org/abs/2345.6789</id>
    <title>Another paper</title>
    <summary>More text.</summary>
    <author><name>C. Author</name></author>
  </entry>
</feed>
"""


class TestQueryRemoteApi:
    def query(self) -> ConjunctiveQuery:
        return ConjunctiveQuery((phrase("dark matter"), phrase("halo")))

    def test_deterministic_params(self):
        params = build_search_params(self.query(), 10)
        assert params == {
            "search_query": 'all:"dark matter" AND all:"halo"',
            "start": 0,
            "max_results": 10,
        }

    def test_stub_feed_parsed(self, stub_service):
        stub_service.on_get("/", lambda params: (200, FEED))
        papers = query_remote_api(stub_service.endpoint(), self.query(), 10)
        assert len(papers) == 2
        assert papers[0].title == "Dark matter halos in simulations"
        assert papers[0].authors == ("A. Author", "B. Author")
        method, path, params = stub_service.requests[0]
        assert params["search_query"] == 'all:"dark matter" AND all:"halo"'
        assert params["max_results"] == "10"

    def test_malformed_feed_is_typed_error(self, stub_service):
        stub_service.on_get("/", lambda params: (200, "<feed><entry></feed>"))
        with pytest.raises(RemoteServiceError):
            query_remote_api(stub_service.endpoint(), self.query(), 10)

    def test_http_error_is_typed(self, stub_service):
        stub_service.on_get("/", lambda params: (503, "overloaded"))
        with pytest.raises(RemoteServiceError):
            query_remote_api(stub_service.endpoint(), self.query(), 10)

    def test_rate_limit_delay(self, stub_service):
        stub_service.on_get("/", lambda params: (200, FEED))
        endpoint = ServiceEndpoint(url=stub_service.url, timeout_s=5.0, min_interval_s=0.25)
        start = time.monotonic()
        query_remote_api(endpoint, self.query(), 1)
        query_remote_api(endpoint, self.query(), 1)
        assert time.monotonic() - start >= 0.2
