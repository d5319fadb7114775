"""Token-classification inference mapped to character/byte spans.

Long inputs are processed in overlapping token windows; positive
tokens are merged into spans when only whitespace separates them.
All offsets returned over the wire are byte offsets into the UTF-8
request text.
"""

from __future__ import annotations

import torch
from transformers import AutoModelForTokenClassification, AutoTokenizer

POSITIVE_LABEL = "DKE"  # all entity categories collapse into one class

_WINDOW_BATCH = 16


def _byte_offsets(text: str) -> list[int] | None:
    """Prefix table char index -> byte offset, or None for pure ASCII."""
    if text.isascii():
        return None
    offsets = [0] * (len(text) + 1)
    total = 0
    for i, ch in enumerate(text):
        offsets[i] = total
        total += len(ch.encode("utf-8"))
    offsets[len(text)] = total
    return offsets


def merge_positive_tokens(
    tokens: list[tuple[int, int, float]], text: str
) -> list[tuple[int, int, float]]:
    """Merge positively-tagged tokens into maximal spans.

    ``tokens`` holds (char_start, char_end, confidence) and may contain
    duplicates from overlapping windows (the highest confidence wins).
    Tokens joined by whitespace-only gaps merge into one span whose
    score is the mean member confidence.  Output spans are sorted and
    non-overlapping.
    """
    best: dict[tuple[int, int], float] = {}
    for start, end, prob in tokens:
        key = (start, end)
        if key not in best or prob > best[key]:
            best[key] = prob
    ordered = sorted((s, e, p) for (s, e), p in best.items())

    spans: list[tuple[int, int, float]] = []
    run: list[tuple[int, int, float]] = []
    for start, end, prob in ordered:
        if run and (start <= run[-1][1] or text[run[-1][1] : start].isspace()):
            run.append((start, end, prob))
        else:
            if run:
                spans.append(_flush_run(run))
            run = [(start, end, prob)]
    if run:
        spans.append(_flush_run(run))
    return spans


def _flush_run(run: list[tuple[int, int, float]]) -> tuple[int, int, float]:
    return (run[0][0], max(e for _, e, _ in run), sum(p for _, _, p in run) / len(run))


class SpanExtractor:
    """A loaded token-classification checkpoint.

    The model and tokenizer are read-only after construction, so one
    instance serves concurrent requests safely.
    """

    def __init__(
        self,
        model_dir: str,
        device: str = "cpu",
        window_tokens: int = 512,
        window_overlap: int = 64,
    ):
        self.tokenizer = AutoTokenizer.from_pretrained(model_dir)
        self.model = AutoModelForTokenClassification.from_pretrained(model_dir)
        self.model.to(device).eval()
        self.device = device
        self.window_tokens = window_tokens
        self.window_overlap = window_overlap
        id2label = self.model.config.id2label
        self.positive_ids = [i for i, label in id2label.items() if label != "O"]
        if not self.positive_ids:
            raise ValueError(f"{model_dir}: no positive label in {id2label}")
        self.model_name = getattr(self.model.config, "name_or_path", "") or str(model_dir)

    def predict(self, text: str) -> list[dict]:
        """Spans of positively-tagged text, as byte offsets.

        Returns [{"start", "end", "label", "score"}, ...], sorted by
        start, non-overlapping; the score is the mean confidence of the
        member tokens.
        """
        if not text or text.isspace():
            return []
        encoded = self.tokenizer(
            text,
            truncation=True,
            max_length=self.window_tokens,
            stride=self.window_overlap,
            return_overflowing_tokens=True,
            return_offsets_mapping=True,
            return_special_tokens_mask=True,
            return_tensors="pt",
            padding=True,
        )
        n_windows = encoded.input_ids.shape[0]
        positive: list[tuple[int, int, float]] = []
        with torch.no_grad():
            for begin in range(0, n_windows, _WINDOW_BATCH):
                stop = begin + _WINDOW_BATCH
                logits = self.model(
                    input_ids=encoded.input_ids[begin:stop].to(self.device),
                    attention_mask=encoded.attention_mask[begin:stop].to(self.device),
                ).logits
                probs = torch.softmax(logits, dim=-1)
                predicted = probs.argmax(dim=-1)
                positive_prob = probs[..., self.positive_ids].sum(dim=-1)
                for w in range(logits.shape[0]):
                    window = begin + w
                    specials = encoded.special_tokens_mask[window]
                    attention = encoded.attention_mask[window]
                    offsets = encoded.offset_mapping[window]
                    for t in range(logits.shape[1]):
                        if specials[t] or not attention[t]:
                            continue
                        if int(predicted[w, t]) not in self.positive_ids:
                            continue
                        start, end = int(offsets[t][0]), int(offsets[t][1])
                        if end > start:
                            positive.append((start, end, float(positive_prob[w, t])))
        merged = merge_positive_tokens(positive, text)
        to_bytes = _byte_offsets(text)
        spans = []
        for start, end, score in merged:
            if to_bytes is not None:
                start, end = to_bytes[start], to_bytes[end]
            spans.append(
                {"start": start, "end": end, "label": POSITIVE_LABEL, "score": score}
            )
        return spans
