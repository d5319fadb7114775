"""Second stage: cosine re-ranking under different document representations.

Run: python demos/04_rerank_backends.py
"""

import numpy as np

from paperscout import (
    PaperRecord,
    RawDocument,
    avg_wordvec,
    build_retrieval_corpus,
    cosine,
    preprocess,
    rerank,
    tfidf_vector,
)
from paperscout.rerank import WordVectorTable
from paperscout.index import index_terms

NEWS = RawDocument(
    source_id="news",
    body="Graphene membranes filter salt ions from seawater. The membrane "
    "pores pass water molecules but reject salt.",
)
CANDIDATES = [
    PaperRecord("p-sieve", "Ion sieving in graphene membranes",
                "Salt ions rejected by graphene oxide membranes in water."),
    PaperRecord("p-thermal", "Thermal conductivity of graphene",
                "Heat transport in graphene sheets measured at room temperature."),
    PaperRecord("p-protein", "Protein folding kinetics",
                "Folding pathways of globular proteins observed in vitro."),
]

news = preprocess(NEWS)

# TFIDF over the retrieval corpus (this news + these candidates): the
# document frequencies are local to the pair set, not global.
corpus = build_retrieval_corpus(news, CANDIDATES)
news_vec = tfidf_vector(corpus.news_terms(), corpus)
candidate_vecs = {
    paper.paper_id: tfidf_vector(corpus.candidate_terms(i), corpus)
    for i, paper in enumerate(CANDIDATES)
}
print("== TFIDF ranking ==")
for paper_id, sim in rerank(news_vec, candidate_vecs, news_id="news").items:
    print(f"  {sim:6.3f}  {paper_id}")

# Averaged word vectors: here a tiny hand-made table; real runs load a
# "word v1 v2 ... vN" text file via WordVectorTable.load(path).
TABLE = WordVectorTable(
    {
        "graphene": np.array([1.0, 0.0, 0.2]),
        "membranes": np.array([0.8, 0.1, 0.0]),
        "membrane": np.array([0.8, 0.1, 0.0]),
        "salt": np.array([0.6, -0.2, 0.4]),
        "ions": np.array([0.5, -0.1, 0.5]),
        "water": np.array([0.4, 0.0, 0.9]),
        "heat": np.array([-0.7, 0.9, 0.0]),
        "transport": np.array([-0.5, 0.8, 0.1]),
        "protein": np.array([0.0, -0.9, -0.8]),
        "folding": np.array([0.1, -0.8, -0.9]),
    },
    dim=3,
)
news_dense = avg_wordvec([t for t in corpus.news_terms()], TABLE)
dense_vecs = {
    paper.paper_id: avg_wordvec(index_terms(paper), TABLE) for paper in CANDIDATES
}
print("\n== averaged word-vector ranking ==")
for paper_id, sim in rerank(news_dense, dense_vecs, news_id="news").items:
    print(f"  {sim:6.3f}  {paper_id}")

print("\ncosine of the news with itself:", cosine(news_dense, news_dense))
