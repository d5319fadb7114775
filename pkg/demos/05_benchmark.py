"""End-to-end benchmark on synthetic planted pairs.

Builds instances whose gold paper shares injected multiword phrases
with the news while distractors share at most one, runs the full
pipeline, and scores MRR / NDCG / P@K with stage timings.

Run: python demos/05_benchmark.py
"""

import random

from paperscout import GoldPair, PaperRecord, RawDocument, RunConfig, preprocess, run_benchmark

rng = random.Random(7)
WORDS = [
    "".join(rng.choice("bcdfglmnprstvz") + rng.choice("aeiou") for _ in range(3))
    for _ in range(160)
]


def sentence(words, inject=""):
    picked = [rng.choice(words) for _ in range(rng.randint(4, 8))]
    if inject:
        picked.insert(rng.randrange(len(picked) + 1), inject)
    return "The " + " ".join(picked) + "."


def planted_pair(pair_id: str):
    """One news article + its gold paper + 150 distractors."""
    concepts = [f"{rng.choice(WORDS)} {rng.choice(WORDS)}" for _ in range(3)]
    news_text = " ".join(
        sentence(WORDS, inject=rng.choice(concepts)) for _ in range(9)
    )
    news = preprocess(RawDocument(source_id=pair_id, body=news_text))
    gold = PaperRecord(
        paper_id=f"{pair_id}-gold",
        title=f"A study of {concepts[0]}",
        abstract=" ".join(sentence(WORDS, inject=c) for c in concepts * 2),
    )
    distractors = [
        PaperRecord(
            paper_id=f"{pair_id}-d{i}",
            title=sentence(WORDS).rstrip("."),
            abstract=" ".join(sentence(WORDS) for _ in range(4)),
        )
        for i in range(150)
    ]
    return news, [gold] + distractors


news_docs = {}
corpus = []
gold_pairs = []
for i in range(5):
    news, papers = planted_pair(f"news{i}")
    news_docs[news.source_id] = news
    corpus.extend(papers)
    gold_pairs.append(
        GoldPair(news_id=news.source_id, gold_paper_ids=frozenset({papers[0].paper_id}))
    )

report = run_benchmark(RunConfig(), corpus, gold_pairs, news_docs=news_docs)

print("== aggregate ==")
print(f"MRR       {report.aggregate['mrr']:.3f}")
print(f"mean NDCG {report.aggregate['mean_ndcg']:.3f}")
for k, value in report.aggregate["p_at"].items():
    print(f"P@{k:<3}     {value:.3f}")
print("\n== timings (mean per query) ==")
print(f"re-ranking stage: {report.timings['t_prr_seconds'] * 1000:.1f} ms")
print(f"whole pipeline:   {report.timings['t_all_seconds'] * 1000:.1f} ms")
print("\n== per query ==")
for news_id, query in sorted(report.per_query.items()):
    print(f"{news_id}: best gold at rank {query.rank_of_best_gold} "
          f"of {query.n_candidates} candidates")
