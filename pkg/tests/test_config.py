"""Configuration loading and path resolution."""

from __future__ import annotations

import pytest
import yaml

from archeodb.config import ConfigError, load_config, load_grammar
from archeodb.structure import NoticeGrammar

MINIMAL = {
    "default_language": "fr",
    "corpus_dir": "corpus",
    "grammar": "grammar.yaml",
    "store_dir": "store",
    "lexicons": {"fr": {"entries": "lex.tsv", "suffixes": "suf.tsv"}},
    "gazetteer": "gaz.tsv",
    "concepts": "concepts.tsv",
}


def write_tree(tmp_path, overrides=None, drop=None):
    (tmp_path / "corpus").mkdir(exist_ok=True)
    for name in ("grammar.yaml", "lex.tsv", "suf.tsv", "gaz.tsv",
                 "concepts.tsv"):
        (tmp_path / name).write_text("", encoding="utf-8")
    raw = {k: v for k, v in MINIMAL.items() if k != (drop or "")}
    raw.update(overrides or {})
    path = tmp_path / "pipeline.yaml"
    path.write_text(yaml.safe_dump(raw), encoding="utf-8")
    return path


def test_load_config_resolves_relative_to_file(tmp_path):
    config = load_config(write_tree(tmp_path))
    assert config.corpus_dir == (tmp_path / "corpus").resolve()
    assert config.store_dir == (tmp_path / "store").resolve()
    assert config.default_language == "fr"
    assert config.lexicons["fr"].entries.name == "lex.tsv"
    assert config.lexicons["fr"].default_pos == "N"
    assert config.person_gazetteer_path is None
    assert config.periods_path is None
    assert not config.link_options.fuzzy_enabled


def test_load_config_optional_sections(tmp_path):
    for name in ("persons.tsv", "periods.tsv", "patterns.txt"):
        (tmp_path / name).write_text("", encoding="utf-8")
    path = write_tree(tmp_path, overrides={
        "person_gazetteer": "persons.tsv",
        "periods": "periods.tsv",
        "patterns": "patterns.txt",
        "link": {"fuzzy_enabled": True, "max_edit_distance": 2},
    })
    config = load_config(path)
    assert config.person_gazetteer_path.name == "persons.tsv"
    assert config.link_options.fuzzy_enabled
    assert config.link_options.max_edit_distance == 2
    assert config.link_options.min_length_for_fuzzy == 6


def test_load_config_missing_file():
    with pytest.raises(ConfigError, match="does not exist"):
        load_config("/nonexistent/pipeline.yaml")


def test_load_config_missing_key(tmp_path):
    path = write_tree(tmp_path, drop="gazetteer")
    with pytest.raises(ConfigError, match="missing required key 'gazetteer'"):
        load_config(path)


def test_load_config_dangling_path(tmp_path):
    path = write_tree(tmp_path, overrides={"concepts": "missing.tsv"})
    with pytest.raises(ConfigError, match="path does not exist"):
        load_config(path)


def test_load_config_bad_language(tmp_path):
    path = write_tree(tmp_path, overrides={"default_language": "it"})
    with pytest.raises(ConfigError, match="default_language"):
        load_config(path)
    path = write_tree(tmp_path, overrides={
        "lexicons": {"it": {"entries": "lex.tsv", "suffixes": "suf.tsv"}},
    })
    with pytest.raises(ConfigError, match="unknown lexicon language"):
        load_config(path)


def test_load_config_rejects_invalid_yaml(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("a: [1,\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="invalid YAML"):
        load_config(path)
    path.write_text("- just\n- a list\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="top level must be a mapping"):
        load_config(path)


def test_load_grammar(tmp_path):
    path = tmp_path / "grammar.yaml"
    path.write_text(
        yaml.safe_dump({
            "header_pattern": r"\s*(\d+)\s*-\s*(.+?)\s*",
            "zones": [{"label": "finds", "pattern": "Finds:"}],
        }),
        encoding="utf-8",
    )
    grammar = load_grammar(path)
    assert isinstance(grammar, NoticeGrammar)
    assert grammar.zone_rules == (("finds", "Finds:"),)


def test_load_grammar_requires_label_and_pattern(tmp_path):
    path = tmp_path / "grammar.yaml"
    path.write_text(
        yaml.safe_dump({
            "header_pattern": r"(\d+)(.*)",
            "zones": [{"label": "finds"}],
        }),
        encoding="utf-8",
    )
    with pytest.raises(ConfigError, match="label and pattern"):
        load_grammar(path)


def test_fixture_config_loads(ingested):
    config = ingested.config
    assert set(config.lexicons) == {"fr", "de", "en"}
    assert config.person_gazetteer_path is not None
    assert config.patterns_path is not None
