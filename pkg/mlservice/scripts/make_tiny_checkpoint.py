#!/usr/bin/env python3
"""Build a tiny random checkpoint for local runs of the service.

Examples:
    python scripts/make_tiny_checkpoint.py --kind classifier --out ckpt/extract
    python scripts/make_tiny_checkpoint.py --kind encoder --out ckpt/embed --hidden 48
"""

import argparse

from mlservice.checkpoints import make_encoder, make_token_classifier


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kind", choices=("classifier", "encoder"), required=True)
    parser.add_argument("--out", required=True, help="checkpoint directory to create")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--hidden", type=int, default=32)
    args = parser.parse_args()
    build = make_token_classifier if args.kind == "classifier" else make_encoder
    path = build(args.out, seed=args.seed, hidden_size=args.hidden)
    print(f"wrote {args.kind} checkpoint to {path}")


if __name__ == "__main__":
    main()
