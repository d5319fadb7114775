"""First retrieval stage: conjunctive BM25 queries over a paper corpus.

Run: python demos/03_search_candidates.py
"""

from paperscout import (
    PaperRecord,
    QueryCaps,
    RawDocument,
    build_index,
    extract_textrank,
    generate_queries,
    preprocess,
    retrieve_candidates,
    search,
)

CORPUS = [
    PaperRecord(
        paper_id="arxiv:1001",
        title="Ion sieving through graphene oxide membranes",
        abstract="We demonstrate salt ion rejection by stacked graphene oxide "
        "membranes with tunable pore size for water desalination.",
        authors=("R. Nair", "K. Gopinadhan"),
    ),
    PaperRecord(
        paper_id="arxiv:1002",
        title="Thermal transport in suspended graphene",
        abstract="Phonon transport measurements of suspended graphene sheets.",
        authors=("L. Chen",),
    ),
    PaperRecord(
        paper_id="arxiv:1003",
        title="Reverse osmosis plant efficiency",
        abstract="Survey of desalination plant energy budgets and membrane fouling.",
        authors=("M. Park", "J. Diaz"),
    ),
    PaperRecord(
        paper_id="arxiv:1004",
        title="Deep learning for protein folding",
        abstract="Neural networks predict protein structure from sequence.",
        authors=("A. Person",),
    ),
]

NEWS = """
Graphene membranes could make seawater drinkable. A graphene oxide
membrane filters salt ions from water while water molecules pass the
tiny pores quickly. Cheap graphene filters could transform desalination.
"""

index = build_index(CORPUS)
print(f"indexed {index.n_docs} papers, vocabulary {index.vocab_size}, avgdl {index.avgdl:.1f}")

news = preprocess(RawDocument(source_id="news", body=NEWS))
phrases = extract_textrank(news)
queries = generate_queries(phrases, QueryCaps(max_phrases=6, max_queries=25))
print(f"{len(phrases)} phrases -> {len(queries)} conjunctive queries")

# A single query: every token of every phrase must appear in a match.
# Conjunctions are strict, so some queries legitimately match nothing.
print("\n== per-query hits ==")
for query in queries[:6]:
    hits = search(index, query, 3)
    print("query:", " AND ".join(p.text for p in query.phrases))
    for ordinal, score in hits:
        print(f"  {score:6.3f}  {index.papers[ordinal].title}")

# The candidate pool is the deduplicated union over all queries.
pool = retrieve_candidates(index, queries, per_query_k=10, news_id="news")
print(f"\ncandidate pool: {len(pool.candidates)} papers")
for paper in pool.candidates:
    hits = pool.provenance[paper.paper_id]
    print(f"  {paper.paper_id}  matched by {len(hits)} queries")
