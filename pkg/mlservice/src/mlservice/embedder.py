"""Mean-pooled transformer embeddings with deterministic inference."""

from __future__ import annotations

import torch
from transformers import AutoModel, AutoTokenizer

_BATCH = 32


class TextEmbedder:
    """A loaded encoder checkpoint; read-only after construction."""

    def __init__(self, model_dir: str, device: str = "cpu", max_tokens: int = 512):
        self.tokenizer = AutoTokenizer.from_pretrained(model_dir)
        self.model = AutoModel.from_pretrained(model_dir)
        self.model.to(device).eval()
        self.device = device
        self.max_tokens = max_tokens
        self.dim = int(self.model.config.hidden_size)

    def embed(self, texts: list[str]) -> list[list[float]]:
        """One vector per text, order preserved, attention-mask mean pooling."""
        if not texts:
            return []
        vectors: list[list[float]] = []
        with torch.no_grad():
            for begin in range(0, len(texts), _BATCH):
                batch = texts[begin : begin + _BATCH]
                encoded = self.tokenizer(
                    batch,
                    truncation=True,
                    max_length=self.max_tokens,
                    padding=True,
                    return_tensors="pt",
                )
                hidden = self.model(
                    input_ids=encoded.input_ids.to(self.device),
                    attention_mask=encoded.attention_mask.to(self.device),
                ).last_hidden_state
                mask = encoded.attention_mask.to(self.device).unsqueeze(-1)
                pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1)
                vectors.extend(pooled.cpu().double().tolist())
        return vectors
