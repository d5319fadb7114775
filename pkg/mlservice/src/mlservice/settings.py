"""Service configuration from environment variables.

MLSERVICE_EXTRACT_MODEL   path of the token-classification checkpoint
MLSERVICE_EMBED_MODELS    comma-separated name=path pairs
MLSERVICE_DEVICE          torch device, default cpu
MLSERVICE_WINDOW_TOKENS   extraction window size, default 512
MLSERVICE_WINDOW_OVERLAP  tokens shared between windows, default 64
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Mapping


@dataclass(frozen=True)
class Settings:
    extract_model: str
    embed_models: dict[str, str] = field(default_factory=dict)
    device: str = "cpu"
    window_tokens: int = 512
    window_overlap: int = 64

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None) -> "Settings":
        env = os.environ if env is None else env
        extract_model = env.get("MLSERVICE_EXTRACT_MODEL", "")
        if not extract_model:
            raise ValueError("MLSERVICE_EXTRACT_MODEL is required")
        embed_models: dict[str, str] = {}
        raw = env.get("MLSERVICE_EMBED_MODELS", "")
        for chunk in raw.replace(";", ",").split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            name, sep, path = chunk.partition("=")
            if not sep or not name.strip() or not path.strip():
                raise ValueError(f"bad MLSERVICE_EMBED_MODELS entry: {chunk!r}")
            embed_models[name.strip()] = path.strip()
        return cls(
            extract_model=extract_model,
            embed_models=embed_models,
            device=env.get("MLSERVICE_DEVICE", "cpu"),
            window_tokens=int(env.get("MLSERVICE_WINDOW_TOKENS", "512")),
            window_overlap=int(env.get("MLSERVICE_WINDOW_OVERLAP", "64")),
        )
