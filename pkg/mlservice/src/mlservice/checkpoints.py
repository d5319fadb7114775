"""Tiny randomly-initialized checkpoints for smoke tests and local dev.

The service accepts any compatible checkpoint directory; these helpers
build minimal ones (a word-level+character-fallback tokenizer and a
two-layer encoder) so the full stack can run without downloading
weights.  Deterministic for a fixed seed.
"""

from __future__ import annotations

import string
from pathlib import Path

import torch
from tokenizers import Tokenizer, models, normalizers, pre_tokenizers, processors
from transformers import (
    BertConfig,
    BertForTokenClassification,
    BertModel,
    PreTrainedTokenizerFast,
)

# Words the toy vocabulary knows outright; everything else falls back
# to character wordpieces.
_COMMON_WORDS = (
    "graphene conducts heat neural network neutron star membrane water salt "
    "ion ions filter filters quantum lattice protein genome model data deep "
    "the a an of and in on for with was were is are"
).split()


def build_tokenizer(out_dir: str | Path, extra_words: list[str] | None = None) -> None:
    words = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    words += list(string.ascii_lowercase)
    words += ["##" + c for c in string.ascii_lowercase]
    words += list(string.digits)
    words += _COMMON_WORDS
    if extra_words:
        words += [w for w in extra_words if w not in words]
    vocab = {word: i for i, word in enumerate(dict.fromkeys(words))}
    wordpiece = models.WordPiece(
        vocab=vocab, unk_token="[UNK]", continuing_subword_prefix="##",
        max_input_chars_per_word=100,
    )
    tokenizer = Tokenizer(wordpiece)
    tokenizer.normalizer = normalizers.BertNormalizer(lowercase=True)
    tokenizer.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    tokenizer.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B:1 [SEP]:1",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])],
    )
    fast = PreTrainedTokenizerFast(
        tokenizer_object=tokenizer,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
        model_max_length=512,
    )
    fast.save_pretrained(str(out_dir))


def _tiny_config(vocab_size: int, hidden_size: int, **extra) -> BertConfig:
    return BertConfig(
        vocab_size=vocab_size,
        hidden_size=hidden_size,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=hidden_size * 2,
        max_position_embeddings=512,
        **extra,
    )


def _vocab_size(out_dir: str | Path) -> int:
    fast = PreTrainedTokenizerFast.from_pretrained(str(out_dir))
    return len(fast)


def make_token_classifier(out_dir: str | Path, seed: int = 0, hidden_size: int = 32) -> Path:
    """A tiny two-label (O / DKE) token classifier with its tokenizer."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    build_tokenizer(out_dir)
    config = _tiny_config(
        _vocab_size(out_dir),
        hidden_size,
        num_labels=2,
        id2label={0: "O", 1: "DKE"},
        label2id={"O": 0, "DKE": 1},
    )
    torch.manual_seed(seed)
    BertForTokenClassification(config).save_pretrained(str(out_dir))
    return out_dir


def make_encoder(out_dir: str | Path, seed: int = 0, hidden_size: int = 32) -> Path:
    """A tiny encoder for mean-pooled embeddings, with its tokenizer."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    build_tokenizer(out_dir)
    config = _tiny_config(_vocab_size(out_dir), hidden_size)
    torch.manual_seed(seed)
    BertModel(config).save_pretrained(str(out_dir))
    return out_dir
