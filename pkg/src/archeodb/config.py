"""Run configuration: one YAML file fully determines a pipeline run.

All paths inside the file resolve relative to the file's own directory,
so a config travels with its fixture tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from .corpus import LANGUAGES
from .structure import NoticeGrammar
from .terminology import LinkOptions


class ConfigError(Exception):
    """Missing, malformed, or dangling configuration."""


@dataclass(frozen=True)
class LexiconPaths:
    entries: Path
    suffixes: Path
    default_pos: str = "N"


@dataclass(frozen=True)
class PipelineConfig:
    """Resolved paths plus run options; see load_config for the file shape."""

    corpus_dir: Path
    grammar_path: Path
    store_dir: Path
    default_language: str
    lexicons: dict[str, LexiconPaths]
    gazetteer_path: Path
    concepts_path: Path
    person_gazetteer_path: Optional[Path] = None
    periods_path: Optional[Path] = None
    patterns_path: Optional[Path] = None
    link_options: LinkOptions = field(default_factory=LinkOptions)


def _require(mapping: dict, key: str, source: Path):
    if key not in mapping:
        raise ConfigError(f"{source}: missing required key {key!r}")
    return mapping[key]


def _existing(path: Path, source: Path, role: str) -> Path:
    if not path.exists():
        raise ConfigError(f"{source}: {role} path does not exist: {path}")
    return path


def load_config(path: str | Path) -> PipelineConfig:
    """Parse the pipeline YAML file and verify every referenced path."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file does not exist: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    base = path.parent

    def resolve(value: str) -> Path:
        return (base / value).resolve()

    default_language = _require(raw, "default_language", path)
    if default_language not in LANGUAGES:
        raise ConfigError(
            f"{path}: default_language must be one of {LANGUAGES}, "
            f"got {default_language!r}"
        )

    corpus_dir = _existing(resolve(_require(raw, "corpus_dir", path)), path, "corpus")
    grammar_path = _existing(
        resolve(_require(raw, "grammar", path)), path, "grammar"
    )
    store_dir = resolve(_require(raw, "store_dir", path))

    lexicons_raw = _require(raw, "lexicons", path)
    if not isinstance(lexicons_raw, dict) or not lexicons_raw:
        raise ConfigError(f"{path}: lexicons must be a non-empty mapping")
    lexicons: dict[str, LexiconPaths] = {}
    for lang, spec in lexicons_raw.items():
        if lang not in LANGUAGES:
            raise ConfigError(f"{path}: unknown lexicon language {lang!r}")
        if not isinstance(spec, dict):
            raise ConfigError(f"{path}: lexicons.{lang} must be a mapping")
        lexicons[lang] = LexiconPaths(
            entries=_existing(
                resolve(_require(spec, "entries", path)), path, f"{lang} lexicon"
            ),
            suffixes=_existing(
                resolve(_require(spec, "suffixes", path)), path, f"{lang} suffixes"
            ),
            default_pos=spec.get("default_pos", "N"),
        )

    gazetteer_path = _existing(
        resolve(_require(raw, "gazetteer", path)), path, "gazetteer"
    )
    concepts_path = _existing(
        resolve(_require(raw, "concepts", path)), path, "concept table"
    )
    person_gazetteer_path = None
    if raw.get("person_gazetteer"):
        person_gazetteer_path = _existing(
            resolve(raw["person_gazetteer"]), path, "person gazetteer"
        )
    periods_path = None
    if raw.get("periods"):
        periods_path = _existing(resolve(raw["periods"]), path, "period table")
    patterns_path = None
    if raw.get("patterns"):
        patterns_path = _existing(resolve(raw["patterns"]), path, "patterns")

    link_raw = raw.get("link", {})
    if not isinstance(link_raw, dict):
        raise ConfigError(f"{path}: link must be a mapping")
    try:
        link_options = LinkOptions(
            fuzzy_enabled=bool(link_raw.get("fuzzy_enabled", False)),
            max_edit_distance=int(link_raw.get("max_edit_distance", 1)),
            min_length_for_fuzzy=int(link_raw.get("min_length_for_fuzzy", 6)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: bad link options: {exc}") from exc

    return PipelineConfig(
        corpus_dir=corpus_dir,
        grammar_path=grammar_path,
        store_dir=store_dir,
        default_language=default_language,
        lexicons=lexicons,
        gazetteer_path=gazetteer_path,
        concepts_path=concepts_path,
        person_gazetteer_path=person_gazetteer_path,
        periods_path=periods_path,
        patterns_path=patterns_path,
        link_options=link_options,
    )


def load_grammar(path: str | Path) -> NoticeGrammar:
    """Grammar YAML: header_pattern plus ordered zone rules."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    header_pattern = _require(raw, "header_pattern", path)
    zones_raw = raw.get("zones", [])
    if not isinstance(zones_raw, list):
        raise ConfigError(f"{path}: zones must be a list")
    rules = []
    for entry in zones_raw:
        if not isinstance(entry, dict) or "label" not in entry or "pattern" not in entry:
            raise ConfigError(f"{path}: each zone needs label and pattern")
        rules.append((entry["label"], entry["pattern"]))
    return NoticeGrammar(header_pattern=header_pattern, zone_rules=tuple(rules))
