"""Run configuration: one flat INI file with a section per module.

Precedence, lowest to highest: built-in defaults, config file, then
PAPERSCOUT_<SECTION>_<KEY> environment variables, then explicit CLI
overrides.  Every default here is the documented module default.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .index import DEFAULT_B, DEFAULT_K1, QueryCaps
from .phrases import TextRankParams

ENV_PREFIX = "PAPERSCOUT"

EXTRACTORS = ("textrank", "chunks", "remote")
BACKENDS = ("tfidf", "wordvec", "wordvec_weighted", "remote")

DEFAULT_KS = (1, 5, 10, 20, 50)


def _parse_bool(raw: str) -> bool:
    value = raw.strip().casefold()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_ks(raw: str) -> tuple[int, ...]:
    ks = tuple(int(part) for part in raw.replace(",", " ").split())
    if not ks or any(k < 1 for k in ks):
        raise ValueError(f"invalid K list: {raw!r}")
    return ks


# (section, key) -> (default, parser)
_SCHEMA: dict[tuple[str, str], tuple[object, object]] = {
    ("run", "extractor"): ("textrank", str),
    ("run", "backend"): ("tfidf", str),
    ("run", "parallelism"): (1, int),
    ("paths", "corpus"): ("", str),
    ("paths", "index"): ("", str),
    ("paths", "wordvec"): ("", str),
    ("caps", "max_phrases"): (QueryCaps().max_phrases, int),
    ("caps", "max_arity"): (QueryCaps().max_arity, int),
    ("caps", "max_queries"): (QueryCaps().max_queries, int),
    ("caps", "per_query_k"): (QueryCaps().per_query_k, int),
    ("bm25", "k1"): (DEFAULT_K1, float),
    ("bm25", "b"): (DEFAULT_B, float),
    ("textrank", "window"): (TextRankParams().window, int),
    ("textrank", "damping"): (TextRankParams().damping, float),
    ("textrank", "max_iter"): (TextRankParams().max_iter, int),
    ("textrank", "tol"): (TextRankParams().tol, float),
    ("textrank", "keep_ratio"): (TextRankParams().keep_ratio, float),
    ("endpoints", "extract"): ("", str),
    ("endpoints", "embed"): ("", str),
    ("endpoints", "embed_model"): ("", str),
    ("endpoints", "timeout_s"): (30.0, float),
    ("endpoints", "embed_batch"): (64, int),
    ("eval", "ks"): (DEFAULT_KS, _parse_ks),
    ("eval", "count_misses"): (True, _parse_bool),
}


@dataclass
class RunConfig:
    extractor: str = "textrank"
    backend: str = "tfidf"
    parallelism: int = 1
    corpus_path: str = ""
    index_path: str = ""
    wordvec_path: str = ""
    caps: QueryCaps = QueryCaps()
    k1: float = DEFAULT_K1
    b: float = DEFAULT_B
    textrank: TextRankParams = TextRankParams()
    extract_endpoint: str = ""
    embed_endpoint: str = ""
    embed_model: str = ""
    endpoint_timeout_s: float = 30.0
    embed_batch: int = 64
    ks: tuple[int, ...] = DEFAULT_KS
    count_misses: bool = True

    def validate(self) -> None:
        if self.extractor not in EXTRACTORS:
            raise ValueError(f"unknown extractor {self.extractor!r}; choose from {EXTRACTORS}")
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}; choose from {BACKENDS}")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")

    def to_dict(self) -> dict:
        """Echoable nested view, mirroring the config-file layout."""
        return {
            "run": {
                "extractor": self.extractor,
                "backend": self.backend,
                "parallelism": self.parallelism,
            },
            "paths": {
                "corpus": self.corpus_path,
                "index": self.index_path,
                "wordvec": self.wordvec_path,
            },
            "caps": {
                "max_phrases": self.caps.max_phrases,
                "max_arity": self.caps.max_arity,
                "max_queries": self.caps.max_queries,
                "per_query_k": self.caps.per_query_k,
            },
            "bm25": {"k1": self.k1, "b": self.b},
            "textrank": {
                "window": self.textrank.window,
                "damping": self.textrank.damping,
                "max_iter": self.textrank.max_iter,
                "tol": self.textrank.tol,
                "keep_ratio": self.textrank.keep_ratio,
            },
            "endpoints": {
                "extract": self.extract_endpoint,
                "embed": self.embed_endpoint,
                "embed_model": self.embed_model,
                "timeout_s": self.endpoint_timeout_s,
                "embed_batch": self.embed_batch,
            },
            "eval": {"ks": list(self.ks), "count_misses": self.count_misses},
        }


def _from_values(values: dict[tuple[str, str], object]) -> RunConfig:
    def get(section: str, key: str):
        return values[(section, key)]

    config = RunConfig(
        extractor=get("run", "extractor"),
        backend=get("run", "backend"),
        parallelism=get("run", "parallelism"),
        corpus_path=get("paths", "corpus"),
        index_path=get("paths", "index"),
        wordvec_path=get("paths", "wordvec"),
        caps=QueryCaps(
            max_phrases=get("caps", "max_phrases"),
            max_arity=get("caps", "max_arity"),
            max_queries=get("caps", "max_queries"),
            per_query_k=get("caps", "per_query_k"),
        ),
        k1=get("bm25", "k1"),
        b=get("bm25", "b"),
        textrank=TextRankParams(
            window=get("textrank", "window"),
            damping=get("textrank", "damping"),
            max_iter=get("textrank", "max_iter"),
            tol=get("textrank", "tol"),
            keep_ratio=get("textrank", "keep_ratio"),
        ),
        extract_endpoint=get("endpoints", "extract"),
        embed_endpoint=get("endpoints", "embed"),
        embed_model=get("endpoints", "embed_model"),
        endpoint_timeout_s=get("endpoints", "timeout_s"),
        embed_batch=get("endpoints", "embed_batch"),
        ks=get("eval", "ks"),
        count_misses=get("eval", "count_misses"),
    )
    config.validate()
    return config


def load_config(
    path: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    overrides: Mapping[str, str] | None = None,
) -> RunConfig:
    """Resolve the effective configuration.

    ``overrides`` maps "section.key" strings to raw values (as the CLI
    flags supply them).  Unknown sections or keys are errors.
    """
    values = {pair: default for pair, (default, _) in _SCHEMA.items()}

    if path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise ValueError(f"config file not found: {path}")
        for section in parser.sections():
            for key, raw in parser.items(section):
                pair = (section, key)
                if pair not in _SCHEMA:
                    raise ValueError(f"{path}: unknown config key [{section}] {key}")
                values[pair] = _SCHEMA[pair][1](raw)

    if env:
        for (section, key), (_, parse) in _SCHEMA.items():
            raw = env.get(f"{ENV_PREFIX}_{section.upper()}_{key.upper()}")
            if raw is not None:
                values[(section, key)] = parse(raw)

    if overrides:
        for dotted, raw in overrides.items():
            section, _, key = dotted.partition(".")
            pair = (section, key)
            if pair not in _SCHEMA:
                raise ValueError(f"unknown config key {dotted!r}")
            values[pair] = _SCHEMA[pair][1](raw) if isinstance(raw, str) else raw

    return _from_values(values)
