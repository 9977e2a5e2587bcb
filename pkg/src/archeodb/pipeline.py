"""End-to-end ingest: corpus -> notices -> mentions -> linked store.

A run always builds from the empty snapshot, so identical inputs yield
an identical version-1 store; rerunning over a changed corpus never
leaves stale records behind.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .config import ConfigError, PipelineConfig, load_config, load_grammar
from .corpus import LANGUAGES, Document, load_corpus_dir
from .extraction import (
    DEFAULT_TERM_PATTERNS,
    Gazetteer,
    Mention,
    default_period_table,
    extract_dates,
    extract_places,
    extract_terms,
    load_gazetteer,
    load_patterns,
    load_period_table,
    select_term_mentions,
)
from .lingproc import Token, fold_text, load_lexicon, pos_tag, tokenize
from .store import (
    EMPTY_SNAPSHOT,
    Batch,
    NoticeRecord,
    Snapshot,
    commit,
    persist,
)
from .structure import detect_zones, segment_notices
from .terminology import (
    Concept,
    Label,
    link_mention,
    load_concept_table,
    normalize_form,
)


@dataclass(frozen=True)
class DocReport:
    """Per-document ingest counts."""

    doc_id: str
    notices: int
    mentions: dict[str, int]
    linked_ratio: float

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "notices": self.notices,
            "mentions": dict(self.mentions),
            "linked_ratio": self.linked_ratio,
        }


@dataclass(frozen=True)
class RunReport:
    docs: tuple[DocReport, ...]
    warnings: tuple[str, ...]
    store_version: int

    def to_dict(self) -> dict:
        return {
            "documents": [d.to_dict() for d in self.docs],
            "warnings": list(self.warnings),
            "store_version": self.store_version,
        }


MENTION_KINDS = ("date", "place", "person", "term")


def _notice_token_slice(
    tokens: Sequence[Token], starts: Sequence[int], begin: int, end: int
) -> list[Token]:
    # Tokens never straddle notice boundaries: boundaries sit at line
    # starts and no token contains a newline.
    lo = bisect_left(starts, begin)
    hi = bisect_left(starts, end)
    return list(tokens[lo:hi])


def _gazetteer_concepts(
    gazetteers: Sequence[Gazetteer], taken: set[str]
) -> list[Concept]:
    """Expose gazetteer ids as concepts so mention links stay uniform.

    Each id gets its display names as labels in every language (proper
    names carry across); ids already present in the concept table are
    left to the table.
    """
    names: dict[str, list[tuple[str, str]]] = {}
    for gazetteer in gazetteers:
        for key, entry_id in gazetteer.entries.items():
            display = gazetteer.display.get(key, key)
            names.setdefault(entry_id, []).append((key, display))
    concepts = []
    for entry_id in sorted(names):
        if entry_id in taken:
            continue
        displays = [d for _, d in sorted(names[entry_id])]
        labels = {
            lang: tuple(Label(d, normalize_form(d)) for d in displays)
            for lang in LANGUAGES
        }
        preferred = {lang: displays[0] for lang in LANGUAGES}
        concepts.append(
            Concept(concept_id=entry_id, labels=labels, preferred=preferred)
        )
    return concepts


def run_pipeline(config: PipelineConfig) -> RunReport:
    """Ingest the configured corpus and persist a fresh snapshot."""
    grammar = load_grammar(config.grammar_path)
    lexicons = {
        lang: load_lexicon(paths.entries, paths.suffixes, paths.default_pos)
        for lang, paths in config.lexicons.items()
    }
    gazetteer = load_gazetteer(config.gazetteer_path)
    person_gazetteer: Optional[Gazetteer] = None
    if config.person_gazetteer_path is not None:
        person_gazetteer = load_gazetteer(config.person_gazetteer_path)
    periods = (
        load_period_table(config.periods_path)
        if config.periods_path is not None
        else default_period_table()
    )
    patterns = (
        load_patterns(config.patterns_path)
        if config.patterns_path is not None
        else list(DEFAULT_TERM_PATTERNS)
    )
    concept_table = load_concept_table(config.concepts_path)

    documents, warnings = load_corpus_dir(config.corpus_dir, config.default_language)
    for doc in documents:
        if doc.meta.language not in lexicons:
            raise ConfigError(
                f"no lexicon configured for language {doc.meta.language!r} "
                f"(document {doc.meta.doc_id})"
            )

    notice_records: list[NoticeRecord] = []
    all_mentions: list[Mention] = []
    doc_reports: list[DocReport] = []

    for doc in documents:
        doc_id = doc.meta.doc_id
        language = doc.meta.language
        _, notices, seg_warnings = segment_notices(doc, grammar)
        warnings.extend(seg_warnings)
        tokens = pos_tag(tokenize(doc.text), lexicons[language])
        starts = [t.start for t in tokens]

        kind_counts = {kind: 0 for kind in MENTION_KINDS}
        linked = 0
        linkable = 0
        for notice in notices:
            zones = detect_zones(notice, doc, grammar)
            notice = replace(notice, zones=tuple(zones))
            slice_tokens = _notice_token_slice(tokens, starts, notice.start, notice.end)

            mentions = extract_dates(
                slice_tokens,
                doc.text,
                periods,
                language,
                notice.notice_id,
                warnings,
                doc_id,
            )
            mentions.extend(
                extract_places(
                    slice_tokens, doc.text, gazetteer, notice.notice_id, kind="place"
                )
            )
            if person_gazetteer is not None:
                mentions.extend(
                    extract_places(
                        slice_tokens,
                        doc.text,
                        person_gazetteer,
                        notice.notice_id,
                        kind="person",
                    )
                )
            occurrences = extract_terms(slice_tokens, patterns, notice.notice_id)
            for mention in select_term_mentions(occurrences, doc.text):
                linkable += 1
                # Stored normalized form is fold-joined; the linker expects
                # label normalization, so probe with a re-normalized copy.
                probe = replace(
                    mention, normalized=normalize_form(mention.normalized)
                )
                result = link_mention(
                    probe, concept_table, language, config.link_options
                )
                if result.linked:
                    linked += 1
                    mention = replace(mention, concept_id=result.concept_id)
                mentions.append(mention)

            for mention in mentions:
                kind_counts[mention.kind] += 1
            all_mentions.extend(mentions)
            notice_records.append(
                NoticeRecord(
                    notice_id=notice.notice_id,
                    doc_id=doc_id,
                    number=notice.number,
                    municipality=notice.municipality,
                    start=notice.start,
                    end=notice.end,
                    zones=notice.zones,
                    tokens=tuple(
                        (t.start, t.end, fold_text(t.surface)) for t in slice_tokens
                    ),
                )
            )
        doc_reports.append(
            DocReport(
                doc_id=doc_id,
                notices=len(notices),
                mentions=kind_counts,
                linked_ratio=(linked / linkable) if linkable else 0.0,
            )
        )

    gazetteers = [gazetteer] + ([person_gazetteer] if person_gazetteer else [])
    taken = {c.concept_id for c in concept_table}
    concepts = list(concept_table) + _gazetteer_concepts(gazetteers, taken)

    batch = Batch(
        documents=tuple(documents),
        notices=tuple(notice_records),
        mentions=tuple(all_mentions),
        concepts=tuple(concepts),
    )
    snapshot = commit(EMPTY_SNAPSHOT, batch)
    persist(snapshot, config.store_dir)
    return RunReport(
        docs=tuple(doc_reports),
        warnings=tuple(warnings),
        store_version=snapshot.version,
    )


def ingest(config_path: str) -> RunReport:
    """CLI entry: load config, run, persist."""
    return run_pipeline(load_config(config_path))
