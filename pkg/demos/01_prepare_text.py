"""Walk through text preparation: strip markup, clean, segment, tag.

Run: python demos/01_prepare_text.py
"""

from paperscout import RawDocument, clean_text, preprocess, segment_sentences, strip_markup

PAGE = """
<html><head><title>news</title><style>p {color: red}</style></head>
<body>
  <div id="nav">Home | Science | About</div>
  <p>Astronomers spotted a neutron star merger [12] on Tuesday.
     The burst released 10^46 joules of energy &amp; shook detectors.</p>
  <p>Dr. Alvarez called it "a textbook kilonova". More data arrives soon!</p>
  <script>trackPageView();</script>
</body></html>
"""

raw = RawDocument(source_id="demo-news", body=PAGE, is_markup=True)

# 1. Markup goes away; paragraph boundaries become newlines.
visible = strip_markup(raw)
print("== visible text ==")
print(visible)

# 2. Cleaning removes bracketed citations, digits and special characters,
#    then collapses whitespace. It is idempotent.
cleaned = clean_text(visible)
print("\n== cleaned ==")
print(cleaned)
assert clean_text(cleaned) == cleaned

# 3. Sentences split on . ? ! followed by a capital, with abbreviation
#    exceptions ("Dr." above does not split).
print("\n== sentences ==")
for sentence in segment_sentences(cleaned):
    print("-", sentence)

# 4. The whole pipeline in one call: every token carries a coarse POS tag
#    and byte offsets into the cleaned text.
doc = preprocess(raw)
print("\n== tagged tokens of sentence 0 ==")
for token in doc.sentences[0]:
    print(f"  {token.surface:<12} {token.pos.name:<12} span={token.char_span}")
