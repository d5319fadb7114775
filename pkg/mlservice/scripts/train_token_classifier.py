#!/usr/bin/env python3
"""Offline fine-tuning for the span extractor (not on the serving path).

Two-stage recipe: pretrain on a broad span-annotated passage set, then
fine-tune on a multi-domain abstract set. Every entity category in the
data collapses into the single positive class the service exposes.

Data format (JSONL, one document per line):
    {"text": "...", "spans": [{"start": 0, "end": 8, "label": "Material"}, ...]}
Offsets are character offsets into "text".

Example:
    python scripts/train_token_classifier.py \
        --base-model bert-base-cased \
        --pretrain-data passages.jsonl --pretrain-epochs 3 \
        --finetune-data abstracts.jsonl --finetune-epochs 10 \
        --out ckpt/extractor
"""

from __future__ import annotations

import argparse
import json
import random
from pathlib import Path

import torch
from torch.utils.data import DataLoader, Dataset
from transformers import AutoModelForTokenClassification, AutoTokenizer

IGNORE = -100


class SpanDataset(Dataset):
    """Character-span annotations aligned to wordpiece tokens (O=0, DKE=1)."""

    def __init__(self, path: str, tokenizer, max_length: int = 512):
        self.examples = []
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                if not line.strip():
                    continue
                record = json.loads(line)
                encoded = tokenizer(
                    record["text"],
                    truncation=True,
                    max_length=max_length,
                    return_offsets_mapping=True,
                    return_special_tokens_mask=True,
                )
                labels = []
                for (start, end), special in zip(
                    encoded["offset_mapping"], encoded["special_tokens_mask"]
                ):
                    if special:
                        labels.append(IGNORE)
                        continue
                    inside = any(
                        span["start"] < end and span["end"] > start
                        for span in record["spans"]
                    )
                    labels.append(1 if inside else 0)
                self.examples.append(
                    {
                        "input_ids": encoded["input_ids"],
                        "attention_mask": encoded["attention_mask"],
                        "labels": labels,
                    }
                )

    def __len__(self) -> int:
        return len(self.examples)

    def __getitem__(self, index: int) -> dict:
        return self.examples[index]


def collate(batch: list[dict], pad_token_id: int) -> dict[str, torch.Tensor]:
    width = max(len(item["input_ids"]) for item in batch)

    def pad(values, fill):
        return [row + [fill] * (width - len(row)) for row in values]

    return {
        "input_ids": torch.tensor(pad([b["input_ids"] for b in batch], pad_token_id)),
        "attention_mask": torch.tensor(pad([b["attention_mask"] for b in batch], 0)),
        "labels": torch.tensor(pad([b["labels"] for b in batch], IGNORE)),
    }


def run_epochs(model, loader, optimizer, device, epochs, stage):
    model.train()
    for epoch in range(epochs):
        total = 0.0
        for batch in loader:
            optimizer.zero_grad()
            out = model(
                input_ids=batch["input_ids"].to(device),
                attention_mask=batch["attention_mask"].to(device),
                labels=batch["labels"].to(device),
            )
            out.loss.backward()
            torch.nn.utils.clip_grad_norm_(model.parameters(), 1.0)
            optimizer.step()
            total += float(out.loss)
        print(f"[{stage}] epoch {epoch + 1}/{epochs} loss {total / max(len(loader), 1):.4f}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--base-model", required=True, help="encoder checkpoint to start from")
    parser.add_argument("--pretrain-data", help="broad span-annotated passages (JSONL)")
    parser.add_argument("--pretrain-epochs", type=int, default=3)
    parser.add_argument("--finetune-data", required=True, help="multi-domain abstracts (JSONL)")
    parser.add_argument("--finetune-epochs", type=int, default=10)
    parser.add_argument("--batch-size", type=int, default=8)
    parser.add_argument("--lr", type=float, default=3e-5)
    parser.add_argument("--seed", type=int, default=13)
    parser.add_argument("--device", default="cuda" if torch.cuda.is_available() else "cpu")
    parser.add_argument("--out", required=True)
    args = parser.parse_args()

    random.seed(args.seed)
    torch.manual_seed(args.seed)

    tokenizer = AutoTokenizer.from_pretrained(args.base_model)
    model = AutoModelForTokenClassification.from_pretrained(
        args.base_model,
        num_labels=2,
        id2label={0: "O", 1: "DKE"},
        label2id={"O": 0, "DKE": 1},
    ).to(args.device)
    optimizer = torch.optim.AdamW(model.parameters(), lr=args.lr)

    def loader(path):
        dataset = SpanDataset(path, tokenizer)
        return DataLoader(
            dataset,
            batch_size=args.batch_size,
            shuffle=True,
            collate_fn=lambda b: collate(b, tokenizer.pad_token_id),
        )

    if args.pretrain_data:
        run_epochs(model, loader(args.pretrain_data), optimizer, args.device,
                   args.pretrain_epochs, "pretrain")
    run_epochs(model, loader(args.finetune_data), optimizer, args.device,
               args.finetune_epochs, "finetune")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out)
    tokenizer.save_pretrained(out)
    print(f"saved fine-tuned extractor to {out}")


if __name__ == "__main__":
    main()
