"""Config resolution: defaults, file, environment, flag overrides."""

from __future__ import annotations

import pytest

from paperscout.config import DEFAULT_KS, RunConfig, load_config


class TestDefaults:
    def test_documented_defaults(self):
        config = load_config()
        assert config.extractor == "textrank"
        assert config.backend == "tfidf"
        assert (config.k1, config.b) == (1.2, 0.75)
        assert config.caps.max_phrases == 30
        assert config.caps.max_arity == 3
        assert config.caps.max_queries == 300
        assert config.caps.per_query_k == 10
        assert config.textrank.window == 2
        assert config.textrank.damping == 0.85
        assert config.textrank.tol == 1e-6
        assert config.textrank.max_iter == 100
        assert config.textrank.keep_ratio == pytest.approx(1 / 3)
        assert config.ks == DEFAULT_KS == (1, 5, 10, 20, 50)
        assert config.count_misses is True
        assert config.parallelism == 1


class TestLayering:
    def test_file_then_env_then_flags(self, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text("[bm25]\nk1 = 1.5\nb = 0.5\n\n[run]\nextractor = chunks\n")
        config = load_config(
            ini,
            env={"PAPERSCOUT_BM25_B": "0.9"},
            overrides={"run.extractor": "textrank"},
        )
        assert config.k1 == 1.5          # from file
        assert config.b == 0.9           # env beats file
        assert config.extractor == "textrank"  # flag beats both

    def test_unknown_key_rejected(self, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text("[bm25]\nk3 = 1.5\n")
        with pytest.raises(ValueError, match="unknown config key"):
            load_config(ini)

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="not found"):
            load_config(tmp_path / "absent.ini")

    def test_invalid_enum_rejected(self):
        with pytest.raises(ValueError, match="unknown extractor"):
            load_config(overrides={"run.extractor": "llm"})

    def test_ks_parsing(self):
        config = load_config(overrides={"eval.ks": "1, 3 10"})
        assert config.ks == (1, 3, 10)

    def test_bool_parsing(self):
        assert load_config(overrides={"eval.count_misses": "false"}).count_misses is False
        with pytest.raises(ValueError):
            load_config(overrides={"eval.count_misses": "maybe"})


class TestEcho:
    def test_to_dict_mirrors_file_layout(self):
        echo = RunConfig().to_dict()
        assert echo["bm25"] == {"k1": 1.2, "b": 0.75}
        assert echo["run"]["extractor"] == "textrank"
        assert echo["eval"]["ks"] == [1, 5, 10, 20, 50]

    def test_override_reflected_in_echo(self):
        config = load_config(overrides={"run.backend": "wordvec"})
        assert config.to_dict()["run"]["backend"] == "wordvec"
