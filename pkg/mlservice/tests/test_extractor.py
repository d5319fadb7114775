"""Span-merging rules and extractor invariants."""

from __future__ import annotations

import pytest

from mlservice.extractor import SpanExtractor, merge_positive_tokens


class TestMergePositiveTokens:
    def test_adjacent_tokens_merge(self):
        text = "neural network"
        spans = merge_positive_tokens([(0, 6, 0.8), (7, 14, 0.6)], text)
        assert spans == [(0, 14, pytest.approx(0.7))]

    def test_whitespace_only_gap_merges(self):
        text = "alpha  beta"
        assert merge_positive_tokens([(0, 5, 1.0), (7, 11, 1.0)], text) == [
            (0, 11, 1.0)
        ]

    def test_punctuation_gap_separates(self):
        text = "alpha, beta"
        spans = merge_positive_tokens([(0, 5, 1.0), (7, 11, 0.5)], text)
        assert spans == [(0, 5, 1.0), (7, 11, 0.5)]

    def test_duplicate_tokens_from_overlapping_windows(self):
        text = "graphene sheet"
        spans = merge_positive_tokens(
            [(0, 8, 0.4), (0, 8, 0.9), (9, 14, 0.5)], text
        )
        assert spans == [(0, 14, pytest.approx(0.7))]

    def test_subword_pieces_merge(self):
        text = "graphene"
        spans = merge_positive_tokens([(0, 3, 0.9), (3, 8, 0.7)], text)
        assert spans == [(0, 8, pytest.approx(0.8))]

    def test_empty(self):
        assert merge_positive_tokens([], "whatever") == []

    def test_output_sorted_non_overlapping(self):
        text = "a b c d e f g h"
        tokens = [(12, 13, 0.5), (0, 1, 0.5), (4, 5, 0.5), (8, 9, 0.5)]
        spans = merge_positive_tokens(tokens, text)
        starts = [s for s, _, _ in spans]
        assert starts == sorted(starts)
        for (s1, e1, _), (s2, e2, _) in zip(spans, spans[1:]):
            assert e1 <= s2


@pytest.fixture(scope="module")
def extractor(checkpoints):
    return SpanExtractor(str(checkpoints["extract"]), window_tokens=128, window_overlap=16)


class TestSpanExtractor:

    def test_empty_text(self, extractor):
        assert extractor.predict("") == []
        assert extractor.predict("   ") == []

    def test_spans_sorted_disjoint_in_bounds(self, extractor):
        text = "Neutron star mergers emit gravitational waves across the galaxy."
        spans = extractor.predict(text)
        limit = len(text.encode("utf-8"))
        previous_end = 0
        for span in spans:
            assert 0 <= span["start"] < span["end"] <= limit
            assert span["start"] >= previous_end
            previous_end = span["end"]
            assert span["label"] == "DKE"
            assert 0.0 <= span["score"] <= 1.0

    def test_byte_offsets_for_unicode(self, extractor):
        text = "café résumé graphene naïveté"
        limit = len(text.encode("utf-8"))
        for span in extractor.predict(text):
            assert 0 <= span["start"] < span["end"] <= limit
            piece = text.encode("utf-8")[span["start"] : span["end"]].decode("utf-8")
            assert piece.strip() == piece  # snapping never leaves edge whitespace

    def test_windowed_long_text(self, extractor):
        text = "word " * 700
        spans = extractor.predict(text)
        limit = len(text.encode("utf-8"))
        previous_end = 0
        for span in spans:
            assert 0 <= span["start"] < span["end"] <= limit
            assert span["start"] >= previous_end
            previous_end = span["end"]

    def test_deterministic(self, extractor):
        text = "The graphene membrane rejects salt ions."
        assert extractor.predict(text) == extractor.predict(text)
