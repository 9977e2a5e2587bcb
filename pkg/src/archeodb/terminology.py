"""Multilingual concept table: normalization, variant clustering, linking, curation.

Fuzzy matching is off by default and tightly bounded (edit distance <= 1,
surface length >= 6): the matcher must be flexible across spelling
variants yet never drown curators in spurious links. All lookups share
one normalization, so any case/diacritic variant of a label links to the
same concept.
"""

from __future__ import annotations

import json
import time as _time
import unicodedata
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence, Union

from .corpus import LANGUAGES
from .extraction import Mention
from .lingproc import fold_text


class CurationError(Exception):
    """Base class for curation edit failures."""


class UnknownConceptError(CurationError):
    """Edit references a concept_id that does not exist."""


class UnknownLabelError(CurationError):
    """Edit references a label the concept does not carry."""


class MergeOrderViolationError(CurationError):
    """MergeConcepts requires keep_id < merge_id lexicographically."""


class DuplicateLabelError(CurationError):
    """The concept already carries that label for that language."""


class DuplicateConceptError(CurationError):
    """SplitLabel target concept_id already exists."""


DEFAULT_PLURAL_SUFFIXES = (("aux", "al"), ("x", ""), ("s", ""))


@dataclass(frozen=True)
class NormalizationRules:
    """Folding flags plus ordered plural-suffix rewrites.

    Replacements may never lengthen a form, and a rewrite only applies
    when the result keeps at least min_stem_length scalars.
    """

    fold_case: bool = True
    fold_diacritics: bool = True
    plural_suffixes: tuple[tuple[str, str], ...] = DEFAULT_PLURAL_SUFFIXES
    min_stem_length: int = 3

    def __post_init__(self):
        if self.min_stem_length < 1:
            raise ValueError("min_stem_length must be >= 1")
        for suffix, replacement in self.plural_suffixes:
            if not suffix:
                raise ValueError("empty plural suffix")
            if len(replacement) > len(suffix):
                raise ValueError(
                    f"replacement {replacement!r} longer than suffix {suffix!r}"
                )


DEFAULT_RULES = NormalizationRules()


def _strip_plural(word: str, rules: NormalizationRules) -> str:
    # Iterated to a fixpoint: stripping may expose another suffix
    # ("abss" -> "abs"), and idempotence must hold for every input,
    # not just natural vocabulary.
    while True:
        rewritten = word
        for suffix, replacement in rules.plural_suffixes:
            if word.endswith(suffix):
                candidate = word[: -len(suffix)] + replacement
                if len(candidate) >= rules.min_stem_length:
                    rewritten = candidate
                    break
        if rewritten == word:
            return word
        if len(rewritten) >= len(word):
            # Non-shortening rule sets cannot be iterated safely.
            return rewritten
        word = rewritten


def normalize_form(s: str, rules: NormalizationRules = DEFAULT_RULES) -> str:
    """Fold, collapse whitespace, then strip plural suffixes per word."""
    if rules.fold_case and rules.fold_diacritics:
        s = fold_text(s)
    elif rules.fold_case:
        s = s.casefold()
    elif rules.fold_diacritics:
        decomposed = unicodedata.normalize("NFD", s)
        s = "".join(c for c in decomposed if not unicodedata.combining(c))
    return " ".join(_strip_plural(word, rules) for word in s.split())


# ---------------------------------------------------------------------------
# Concepts

@dataclass(frozen=True)
class Label:
    """One display label plus its stored normalized form."""

    display: str
    normalized: str


@dataclass(frozen=True)
class Concept:
    """Canonical terminology entry with per-language label sets."""

    concept_id: str
    labels: dict[str, tuple[Label, ...]] = field(default_factory=dict)
    preferred: dict[str, str] = field(default_factory=dict)
    notes: str = ""

    def __post_init__(self):
        for lang, display in self.preferred.items():
            displays = [l.display for l in self.labels.get(lang, ())]
            if display not in displays:
                raise ValueError(
                    f"{self.concept_id}: preferred {lang} label {display!r} "
                    f"not among its labels"
                )

    def labels_for(self, lang: str) -> tuple[Label, ...]:
        return self.labels.get(lang, ())


def make_concept(
    concept_id: str,
    labels: dict[str, Sequence[str]],
    preferred: Optional[dict[str, str]] = None,
    notes: str = "",
    rules: NormalizationRules = DEFAULT_RULES,
) -> Concept:
    """Build a concept from display labels, normalizing each alongside."""
    stored = {
        lang: tuple(Label(d, normalize_form(d, rules)) for d in displays)
        for lang, displays in labels.items()
    }
    if preferred is None:
        preferred = {
            lang: displays[0].display for lang, displays in stored.items() if displays
        }
    return Concept(
        concept_id=concept_id, labels=stored, preferred=preferred, notes=notes
    )


def load_concept_table(
    path: str | Path, rules: NormalizationRules = DEFAULT_RULES
) -> list[Concept]:
    """TSV columns: concept_id, language, label, is_preferred (0/1)."""
    raw: dict[str, dict[str, list[str]]] = {}
    preferred: dict[str, dict[str, str]] = {}
    order: list[str] = []
    for lineno, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip() or line.startswith("#"):
            continue
        cells = line.split("\t")
        if len(cells) != 4:
            raise CurationError(f"{path}:{lineno}: expected 4 columns")
        concept_id, lang, label, is_preferred = cells
        if lang not in LANGUAGES:
            raise CurationError(f"{path}:{lineno}: unknown language {lang!r}")
        if concept_id not in raw:
            raw[concept_id] = {}
            preferred[concept_id] = {}
            order.append(concept_id)
        raw[concept_id].setdefault(lang, []).append(label)
        if is_preferred == "1":
            preferred[concept_id][lang] = label
    return [
        make_concept(cid, raw[cid], preferred[cid] or None, rules=rules)
        for cid in order
    ]


# ---------------------------------------------------------------------------
# Variant clustering

@dataclass(frozen=True)
class VariantCluster:
    """Term candidates grouped under one normalized key."""

    key: str
    members: tuple
    total_freq: int


def cluster_variants(candidates: Sequence, rules: NormalizationRules = DEFAULT_RULES) -> list[VariantCluster]:
    """Group TermCandidates whose forms normalize to the same key.

    Clusters are sorted by total frequency descending, then key ascending;
    members keep their original normalized surfaces.
    """
    groups: dict[str, list] = {}
    for cand in candidates:
        key = normalize_form(cand.normalized, rules)
        groups.setdefault(key, []).append(cand)
    clusters = [
        VariantCluster(
            key=key,
            members=tuple(sorted(members, key=lambda c: c.normalized)),
            total_freq=sum(c.freq for c in members),
        )
        for key, members in groups.items()
    ]
    clusters.sort(key=lambda cl: (-cl.total_freq, cl.key))
    return clusters


# ---------------------------------------------------------------------------
# Linking

@dataclass(frozen=True)
class LinkOptions:
    """Fuzzy-matching bounds; fuzzy is opt-in."""

    fuzzy_enabled: bool = False
    max_edit_distance: int = 1
    min_length_for_fuzzy: int = 6

    def __post_init__(self):
        if self.max_edit_distance < 0:
            raise ValueError("max_edit_distance must be >= 0")


@dataclass(frozen=True)
class LinkResult:
    """Outcome of linking one mention: a concept or nothing."""

    concept_id: Optional[str]
    method: Optional[str] = None  # "exact" | "fuzzy"
    distance: int = 0

    @property
    def linked(self) -> bool:
        return self.concept_id is not None


UNLINKED = LinkResult(concept_id=None)


def bounded_edit_distance(a: str, b: str, limit: int) -> Optional[int]:
    """Levenshtein distance if <= limit, else None; banded single-row DP."""
    if a == b:
        return 0
    la, lb = len(a), len(b)
    if abs(la - lb) > limit:
        return None
    if la == 0:
        return lb if lb <= limit else None
    if lb == 0:
        return la if la <= limit else None
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        cur = [i] + [0] * lb
        row_min = i
        for j in range(1, lb + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
            row_min = min(row_min, cur[j])
        if row_min > limit:
            return None
        prev = cur
    return prev[lb] if prev[lb] <= limit else None


def link_mention(
    mention: Mention,
    table: Sequence[Concept],
    lang: str,
    opts: LinkOptions = LinkOptions(),
) -> LinkResult:
    """Link a mention's normalized form against the concept labels of lang.

    An exact normalized match always wins; fuzzy matching only runs when
    enabled, the form is long enough, and no exact match exists. Ties
    resolve by (distance, concept_id ascending).
    """
    form = mention.normalized
    exact: Optional[str] = None
    for concept in table:
        for label in concept.labels_for(lang):
            if label.normalized == form:
                if exact is None or concept.concept_id < exact:
                    exact = concept.concept_id
    if exact is not None:
        return LinkResult(concept_id=exact, method="exact", distance=0)
    if not opts.fuzzy_enabled or len(form) < opts.min_length_for_fuzzy:
        return UNLINKED
    best: Optional[tuple[int, str]] = None
    for concept in table:
        for label in concept.labels_for(lang):
            d = bounded_edit_distance(form, label.normalized, opts.max_edit_distance)
            if d is None:
                continue
            key = (d, concept.concept_id)
            if best is None or key < best:
                best = key
    if best is None:
        return UNLINKED
    return LinkResult(concept_id=best[1], method="fuzzy", distance=best[0])


# ---------------------------------------------------------------------------
# Curation

@dataclass(frozen=True)
class AddLabel:
    concept_id: str
    language: str
    label: str


@dataclass(frozen=True)
class MergeConcepts:
    keep_id: str
    merge_id: str


@dataclass(frozen=True)
class SplitLabel:
    concept_id: str
    language: str
    label: str
    new_concept_id: str


CurationEdit = Union[AddLabel, MergeConcepts, SplitLabel]


@dataclass(frozen=True)
class AuditEntry:
    """One applied edit, ready for the append-only log."""

    timestamp: float
    kind: str
    payload: dict

    def to_line(self) -> str:
        return "\t".join(
            [
                f"{self.timestamp:.6f}",
                self.kind,
                json.dumps(self.payload, ensure_ascii=False, sort_keys=True),
            ]
        )


def curate(
    table: Sequence[Concept],
    edit: CurationEdit,
    rules: NormalizationRules = DEFAULT_RULES,
    timestamp: Optional[float] = None,
) -> tuple[list[Concept], AuditEntry]:
    """Apply one edit, returning the new table plus its audit entry.

    The input table is never modified; merges require the surviving id to
    be the lexicographically smaller one so outcomes are order-independent.
    """
    if timestamp is None:
        timestamp = _time.time()
    by_id = {c.concept_id: c for c in table}

    if isinstance(edit, AddLabel):
        concept = by_id.get(edit.concept_id)
        if concept is None:
            raise UnknownConceptError(f"unknown concept {edit.concept_id!r}")
        if edit.language not in LANGUAGES:
            raise CurationError(f"unknown language {edit.language!r}")
        existing = concept.labels_for(edit.language)
        if any(l.display == edit.label for l in existing):
            raise DuplicateLabelError(
                f"{edit.concept_id} already has {edit.language} label {edit.label!r}"
            )
        labels = dict(concept.labels)
        labels[edit.language] = existing + (
            Label(edit.label, normalize_form(edit.label, rules)),
        )
        preferred = dict(concept.preferred)
        preferred.setdefault(edit.language, edit.label)
        updated = replace(concept, labels=labels, preferred=preferred)
        new_table = [updated if c.concept_id == edit.concept_id else c for c in table]
        entry = AuditEntry(
            timestamp,
            "add_label",
            {
                "concept_id": edit.concept_id,
                "language": edit.language,
                "label": edit.label,
            },
        )
        return new_table, entry

    if isinstance(edit, MergeConcepts):
        keep = by_id.get(edit.keep_id)
        merge = by_id.get(edit.merge_id)
        if keep is None:
            raise UnknownConceptError(f"unknown concept {edit.keep_id!r}")
        if merge is None:
            raise UnknownConceptError(f"unknown concept {edit.merge_id!r}")
        if not edit.keep_id < edit.merge_id:
            raise MergeOrderViolationError(
                f"survivor must be lexicographically smaller: "
                f"{edit.keep_id!r} vs {edit.merge_id!r}"
            )
        labels = {lang: tuple(ls) for lang, ls in keep.labels.items()}
        for lang, moved in merge.labels.items():
            labels[lang] = labels.get(lang, ()) + moved
        preferred = dict(keep.preferred)
        for lang, display in merge.preferred.items():
            preferred.setdefault(lang, display)
        updated = replace(keep, labels=labels, preferred=preferred)
        new_table = [
            updated if c.concept_id == edit.keep_id else c
            for c in table
            if c.concept_id != edit.merge_id
        ]
        entry = AuditEntry(
            timestamp,
            "merge_concepts",
            {"keep_id": edit.keep_id, "merge_id": edit.merge_id},
        )
        return new_table, entry

    if isinstance(edit, SplitLabel):
        concept = by_id.get(edit.concept_id)
        if concept is None:
            raise UnknownConceptError(f"unknown concept {edit.concept_id!r}")
        if edit.new_concept_id in by_id:
            raise DuplicateConceptError(
                f"concept {edit.new_concept_id!r} already exists"
            )
        existing = concept.labels_for(edit.language)
        moved = [l for l in existing if l.display == edit.label]
        if not moved:
            raise UnknownLabelError(
                f"{edit.concept_id} has no {edit.language} label {edit.label!r}"
            )
        remaining = tuple(l for l in existing if l.display != edit.label)
        labels = dict(concept.labels)
        if remaining:
            labels[edit.language] = remaining
        else:
            del labels[edit.language]
        preferred = dict(concept.preferred)
        if preferred.get(edit.language) == edit.label:
            if remaining:
                preferred[edit.language] = remaining[0].display
            else:
                del preferred[edit.language]
        updated = replace(concept, labels=labels, preferred=preferred)
        fresh = Concept(
            concept_id=edit.new_concept_id,
            labels={edit.language: (moved[0],)},
            preferred={edit.language: edit.label},
        )
        new_table = [
            updated if c.concept_id == edit.concept_id else c for c in table
        ] + [fresh]
        entry = AuditEntry(
            timestamp,
            "split_label",
            {
                "concept_id": edit.concept_id,
                "language": edit.language,
                "label": edit.label,
                "new_concept_id": edit.new_concept_id,
            },
        )
        return new_table, entry

    raise CurationError(f"unknown edit {edit!r}")


def append_audit(path: str | Path, entry: AuditEntry) -> None:
    """Append one audit record to the line-delimited log."""
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(entry.to_line() + "\n")
