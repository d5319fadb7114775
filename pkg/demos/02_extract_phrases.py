"""Compare the two local keyphrase extractors on one article.

Run: python demos/02_extract_phrases.py
"""

from paperscout import (
    RawDocument,
    TextRankParams,
    dedup_phrases,
    extract_np_chunks,
    extract_textrank,
    preprocess,
)

ARTICLE = """
Graphene membranes could make seawater drinkable. Researchers built a
graphene oxide membrane that filters salt ions from water. The tiny
pores of the membrane reject dissolved salt ions while water molecules
pass through quickly. Earlier graphene filters swelled when wet, but
the new membrane keeps its pore size stable. Cheap graphene filters
could bring clean water to regions without large desalination plants.
"""

doc = preprocess(RawDocument(source_id="graphene-news", body=ARTICLE))

# Graph ranking: words that co-occur often pull each other up, adjacent
# top-ranked words merge into multiword phrases.
print("== graph-ranked phrases ==")
for phrase in extract_textrank(doc, TextRankParams())[:8]:
    print(f"  {phrase.score:6.3f}  {phrase.text}")

# Grammar chunking: maximal ADJ* NOUN+ runs, scored by length.
print("\n== noun-phrase chunks ==")
for phrase in extract_np_chunks(doc)[:8]:
    print(f"  {phrase.score:6.3f}  {phrase.text}")

# Merging extractor outputs: case-folded dedup keeps the best score.
merged = dedup_phrases(extract_textrank(doc) + extract_np_chunks(doc))
print(f"\nmerged pool: {len(merged)} distinct phrases")
