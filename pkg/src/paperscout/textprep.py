"""Text preparation for news articles and paper abstracts.

Turns raw pages into clean text, splits the text into sentences, and
tags every token with a coarse part of speech.  Everything here is a
pure function: the same input always yields the same output, and no
shared state is mutated, so documents can be processed in parallel.

Offsets stored on tokens are byte offsets into the UTF-8 encoding of
the cleaned document text (not character indices).  For pure-ASCII
text the two coincide.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from html.parser import HTMLParser
from importlib import resources
from pathlib import Path
from typing import Callable, Iterator


class Pos(Enum):
    NOUN = "NOUN"
    PROPER_NOUN = "PROPER_NOUN"
    ADJ = "ADJ"
    VERB = "VERB"
    OTHER = "OTHER"


@dataclass(frozen=True)
class RawDocument:
    """One fetched news page or plain-text article."""

    source_id: str
    body: str
    uri: str | None = None
    is_markup: bool = False


@dataclass(frozen=True)
class Token:
    surface: str
    norm: str
    pos: Pos
    char_span: tuple[int, int]  # byte offsets into the cleaned text

    @property
    def is_word(self) -> bool:
        return self.surface[0].isalpha() if self.surface else False


@dataclass(frozen=True)
class CleanDocument:
    source_id: str
    text: str
    sentences: tuple[tuple[Token, ...], ...]

    def iter_tokens(self) -> Iterator[Token]:
        for sentence in self.sentences:
            yield from sentence


# --------------------------------------------------------------------------
# markup stripping
# --------------------------------------------------------------------------

_SKIP_TAGS = frozenset({"script", "style", "head", "noscript", "template"})
_BLOCK_TAGS = frozenset(
    {
        "p", "div", "br", "li", "ul", "ol", "dl", "dt", "dd", "tr", "td",
        "table", "h1", "h2", "h3", "h4", "h5", "h6", "section", "article",
        "header", "footer", "aside", "nav", "figure", "figcaption",
        "blockquote", "pre", "hr",
    }
)


class _MarkupStripper(HTMLParser):
    """Best-effort tag removal; never raises on malformed input."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self._chunks: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in _SKIP_TAGS:
            self._skip_depth += 1
        elif tag in _BLOCK_TAGS:
            self._chunks.append("\n")

    def handle_endtag(self, tag):
        if tag in _SKIP_TAGS:
            if self._skip_depth:
                self._skip_depth -= 1
        elif tag in _BLOCK_TAGS:
            self._chunks.append("\n")

    def handle_data(self, data):
        if not self._skip_depth:
            self._chunks.append(data)

    def text(self) -> str:
        lines = (line.strip() for line in "".join(self._chunks).split("\n"))
        return "\n".join(line for line in lines if line)


def strip_markup(
    raw: RawDocument,
    body_extractor: Callable[[str], str] | None = None,
) -> str:
    """Return the visible text of a raw document.

    When ``raw.is_markup`` the tags, scripts and styles are dropped and
    paragraph boundaries become newlines; plain text passes through
    unchanged.  ``body_extractor`` is an optional site-specific hook that
    receives the raw markup and returns the markup fragment holding the
    article body (generic stripping is then applied to the fragment).
    """
    if not raw.body:
        raise ValueError(f"document {raw.source_id!r} has an empty body")
    if not raw.is_markup:
        return raw.body
    body = body_extractor(raw.body) if body_extractor is not None else raw.body
    stripper = _MarkupStripper()
    stripper.feed(body)
    stripper.close()
    return stripper.text()


# --------------------------------------------------------------------------
# text cleaning
# --------------------------------------------------------------------------

_REMOVED_CHARS = frozenset("@#$%^&*~")


def clean_text(text: str) -> str:
    """Normalise article text before segmentation.

    Bracketed segments "[...]" (nesting included) are removed outright,
    the characters @ # $ % ^ & * ~ and decimal digits are dropped, and
    whitespace is collapsed to single spaces.  Idempotent.
    """
    kept: list[str] = []
    depth = 0
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            if depth > 0:
                depth -= 1
        elif depth == 0 and ch not in _REMOVED_CHARS and not ch.isdecimal():
            kept.append(ch)
    return " ".join("".join(kept).split())


# --------------------------------------------------------------------------
# sentence segmentation
# --------------------------------------------------------------------------

_TERMINALS = frozenset(".?!")

# Fixed exception list: a period after one of these tokens never ends a
# sentence ("et al." is covered by its final token "al.").
ABBREVIATIONS = frozenset(
    {"dr.", "prof.", "fig.", "al.", "e.g.", "i.e.", "vs.", "no.", "u.s."}
)


def _preceding_token(text: str, index: int) -> str:
    start = index
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start : index + 1].casefold()


def _trim_span(text: str, start: int, end: int) -> tuple[int, int]:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    return start, end


def sentence_spans(text: str) -> list[tuple[int, int]]:
    """Character spans of the sentences in ``text``, in order."""
    spans: list[tuple[int, int]] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        if text[i] in _TERMINALS:
            j = i + 1
            while j < n and text[j].isspace():
                j += 1
            if j > i + 1 and j < n and text[j].isupper():
                if text[i] != "." or _preceding_token(text, i) not in ABBREVIATIONS:
                    spans.append((start, i + 1))
                    start = j
                    i = j
                    continue
        i += 1
    if start < n:
        spans.append((start, n))
    trimmed = (_trim_span(text, s, e) for s, e in spans)
    return [(s, e) for s, e in trimmed if e > s]


def segment_sentences(text: str) -> list[str]:
    """Split cleaned text into sentences.

    Splits after . ? ! when followed by whitespace and an uppercase
    letter, except after the fixed abbreviation list above.
    """
    return [text[s:e] for s, e in sentence_spans(text)]


# --------------------------------------------------------------------------
# tokenization and tagging
# --------------------------------------------------------------------------

_WORD_PATTERN = r"[^\W\d_]+(?:['’-][^\W\d_]+)*"
_TOKEN_RE = re.compile(_WORD_PATTERN + r"|\d+|[^\w\s]+")
_WORD_RE = re.compile(_WORD_PATTERN)

_SUFFIX_TAGS = (
    ("tion", Pos.NOUN),
    ("ment", Pos.NOUN),
    ("ness", Pos.NOUN),
    ("ous", Pos.ADJ),
    ("ive", Pos.ADJ),
    ("al", Pos.ADJ),
    ("ize", Pos.VERB),
    ("ify", Pos.VERB),
)


def _data_text(name: str) -> str:
    return (resources.files("paperscout") / "data" / name).read_text("utf-8")


@lru_cache(maxsize=1)
def _lexicon() -> dict[str, Pos]:
    table: dict[str, Pos] = {}
    for line in _data_text("pos_lexicon.txt").splitlines():
        if not line or line.startswith("#"):
            continue
        word, tag = line.split("\t")
        table[word] = Pos[tag]
    return table


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    """The fixed 150-word stopword list shared by indexing and re-ranking."""
    return frozenset(_data_text("stopwords.txt").split())


def _suffix_tag(norm: str) -> Pos:
    for suffix, tag in _SUFFIX_TAGS:
        if len(norm) > len(suffix) + 2 and norm.endswith(suffix):
            return tag
    # Unknown words default to NOUN: recall-biased for chunking.
    return Pos.NOUN


def _byte_offsets(text: str) -> list[int]:
    offsets = [0] * (len(text) + 1)
    total = 0
    for i, ch in enumerate(text):
        offsets[i] = total
        total += len(ch.encode("utf-8"))
    offsets[len(text)] = total
    return offsets


def byte_length(text: str) -> int:
    return len(text) if text.isascii() else len(text.encode("utf-8"))


def byte_slice(text: str, start: int, end: int) -> str:
    """Slice ``text`` by byte offsets into its UTF-8 encoding."""
    if text.isascii():
        return text[start:end]
    return text.encode("utf-8")[start:end].decode("utf-8", errors="ignore")


def tokenize_and_tag(sentence: str) -> list[Token]:
    """Tokenize one sentence and tag each token.

    Words are runs of letters (internal hyphens/apostrophes allowed);
    digit runs and punctuation runs are separate OTHER tokens.  Tagging
    is lexicon first, then a capitalised-mid-sentence proper-noun rule,
    then suffix rules, with NOUN as the fallback.  Spans are byte
    offsets into the sentence.
    """
    lexicon = _lexicon()
    offsets = None if sentence.isascii() else _byte_offsets(sentence)
    tokens: list[Token] = []
    saw_word = False
    for match in _TOKEN_RE.finditer(sentence):
        surface = match.group()
        norm = surface.casefold()
        if not surface[0].isalpha():
            pos = Pos.OTHER
        else:
            known = lexicon.get(norm)
            if surface[0].isupper() and saw_word:
                pos = Pos.PROPER_NOUN if known in (None, Pos.NOUN) else known
            elif known is not None:
                pos = known
            else:
                pos = _suffix_tag(norm)
            saw_word = True
        if offsets is None:
            span = (match.start(), match.end())
        else:
            span = (offsets[match.start()], offsets[match.end()])
        tokens.append(Token(surface=surface, norm=norm, pos=pos, char_span=span))
    return tokens


def word_tokens(text: str) -> list[str]:
    """Word tokens only (no digits, no punctuation), original case."""
    return _WORD_RE.findall(text)


def content_terms(text: str) -> list[str]:
    """Case-folded word tokens with stopwords removed."""
    stop = stopwords()
    return [t for t in (w.casefold() for w in word_tokens(text)) if t not in stop]


# --------------------------------------------------------------------------
# document pipeline
# --------------------------------------------------------------------------


def preprocess(
    raw: RawDocument,
    body_extractor: Callable[[str], str] | None = None,
) -> CleanDocument:
    """Full preparation of one document: strip, clean, segment, tag."""
    text = clean_text(strip_markup(raw, body_extractor))
    doc_offsets = None if text.isascii() else _byte_offsets(text)
    sentences: list[tuple[Token, ...]] = []
    for start, end in sentence_spans(text):
        shift = start if doc_offsets is None else doc_offsets[start]
        shifted = tuple(
            Token(
                surface=t.surface,
                norm=t.norm,
                pos=t.pos,
                char_span=(t.char_span[0] + shift, t.char_span[1] + shift),
            )
            for t in tokenize_and_tag(text[start:end])
        )
        if shifted:
            sentences.append(shifted)
    return CleanDocument(source_id=raw.source_id, text=text, sentences=tuple(sentences))


def sentence_text(doc: CleanDocument, index: int) -> str:
    """Reconstruct the text of sentence ``index`` from its token spans."""
    sentence = doc.sentences[index]
    return byte_slice(doc.text, sentence[0].char_span[0], sentence[-1].char_span[1])


def load_raw_documents(path: str | Path) -> list[RawDocument]:
    """Read a JSONL batch of raw documents.

    Each line carries {source_id, uri, body, is_markup}.  Raises
    ValueError naming the offending line on malformed input.
    """
    docs: list[RawDocument] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                doc = RawDocument(
                    source_id=record["source_id"],
                    body=record["body"],
                    uri=record.get("uri"),
                    is_markup=bool(record.get("is_markup", False)),
                )
            except (KeyError, TypeError, json.JSONDecodeError) as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
            if not doc.body:
                raise ValueError(f"{path}: line {lineno}: empty body")
            if doc.source_id in seen:
                raise ValueError(
                    f"{path}: line {lineno}: duplicate source_id {doc.source_id!r}"
                )
            seen.add(doc.source_id)
            docs.append(doc)
    return docs
