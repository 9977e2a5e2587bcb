"""Embedded snapshot store: records, inverted index, queries, persistence.

Snapshots are immutable; commit swaps in a new one, so readers never see
a half-applied batch. The on-disk form is line-delimited JSON per
collection plus a checksummed manifest; the index is rebuilt on load
rather than persisted, which keeps exactly one format to version.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .corpus import Document, DocumentMeta
from .extraction import Mention, TimeRange
from .lingproc import fold_text
from .structure import Zone
from .terminology import Concept, Label


class StoreError(Exception):
    """Base class for store failures."""


class ForeignKeyViolationError(StoreError):
    """A record references an id that does not exist."""


class DuplicateIdError(StoreError):
    """The same id appears twice within one batch."""


class CorruptSnapshotError(StoreError):
    """Checksum mismatch or missing file under a manifest."""


class VersionMismatchError(StoreError):
    """On-disk format_version is not one this code reads."""


FORMAT_VERSION = 1

MANIFEST_NAME = "manifest"
COLLECTION_FILES = (
    "documents.jsonl",
    "notices.jsonl",
    "mentions.jsonl",
    "concepts.jsonl",
)


@dataclass(frozen=True)
class NoticeRecord:
    """A stored notice: structure plus its folded token stream.

    tokens holds (char_start, char_end, folded_surface) triples over the
    owning document's text; the index and matched spans both derive from
    this stream, so queries never need to re-tokenize.
    """

    notice_id: str
    doc_id: str
    number: int
    municipality: str
    start: int
    end: int
    zones: tuple[Zone, ...]
    tokens: tuple[tuple[int, int, str], ...]


@dataclass(frozen=True)
class InvertedIndex:
    """Map folded token -> tuple of (notice_id, positions) postings."""

    postings: dict[str, tuple[tuple[str, tuple[int, ...]], ...]] = field(
        default_factory=dict
    )

    def lookup(self, token: str) -> tuple[tuple[str, tuple[int, ...]], ...]:
        return self.postings.get(token, ())


def build_index(notices: Iterable[NoticeRecord]) -> InvertedIndex:
    """Post every stored token occurrence; deterministic by construction."""
    raw: dict[str, dict[str, list[int]]] = {}
    for notice in notices:
        for pos, (_, _, folded) in enumerate(notice.tokens):
            raw.setdefault(folded, {}).setdefault(notice.notice_id, []).append(pos)
    postings = {
        token: tuple(
            (notice_id, tuple(positions))
            for notice_id, positions in sorted(by_notice.items())
        )
        for token, by_notice in raw.items()
    }
    return InvertedIndex(postings=postings)


@dataclass(frozen=True)
class Snapshot:
    documents: dict[str, Document] = field(default_factory=dict)
    notices: dict[str, NoticeRecord] = field(default_factory=dict)
    mentions: dict[str, Mention] = field(default_factory=dict)
    concepts: dict[str, Concept] = field(default_factory=dict)
    index: InvertedIndex = field(default_factory=InvertedIndex)
    version: int = 0


EMPTY_SNAPSHOT = Snapshot()


@dataclass(frozen=True)
class Batch:
    """One commit's worth of upserts plus concept deletions."""

    documents: tuple[Document, ...] = ()
    notices: tuple[NoticeRecord, ...] = ()
    mentions: tuple[Mention, ...] = ()
    concepts: tuple[Concept, ...] = ()
    delete_concepts: tuple[str, ...] = ()


def _check_batch_ids(ids: Sequence[str], collection: str) -> None:
    seen = set()
    for record_id in ids:
        if record_id in seen:
            raise DuplicateIdError(f"duplicate {collection} id {record_id!r} in batch")
        seen.add(record_id)


def commit(snapshot: Snapshot, batch: Batch) -> Snapshot:
    """Apply a batch, returning a new snapshot with version + 1.

    Foreign keys are validated over the full post-commit state, so a
    concept deletion must relink or remove its mentions within the same
    batch.
    """
    _check_batch_ids([d.meta.doc_id for d in batch.documents], "document")
    _check_batch_ids([n.notice_id for n in batch.notices], "notice")
    _check_batch_ids([m.mention_id for m in batch.mentions], "mention")
    _check_batch_ids([c.concept_id for c in batch.concepts], "concept")

    documents = dict(snapshot.documents)
    for doc in batch.documents:
        documents[doc.meta.doc_id] = doc
    notices = dict(snapshot.notices)
    for notice in batch.notices:
        notices[notice.notice_id] = notice
    mentions = dict(snapshot.mentions)
    for mention in batch.mentions:
        mentions[mention.mention_id] = mention
    concepts = dict(snapshot.concepts)
    for concept in batch.concepts:
        concepts[concept.concept_id] = concept
    for concept_id in batch.delete_concepts:
        if concept_id not in concepts:
            raise ForeignKeyViolationError(
                f"cannot delete unknown concept {concept_id!r}"
            )
        del concepts[concept_id]

    for notice in notices.values():
        if notice.doc_id not in documents:
            raise ForeignKeyViolationError(
                f"notice {notice.notice_id!r} references missing document "
                f"{notice.doc_id!r}"
            )
    for mention in mentions.values():
        if mention.notice_id not in notices:
            raise ForeignKeyViolationError(
                f"mention {mention.mention_id!r} references missing notice "
                f"{mention.notice_id!r}"
            )
        if mention.concept_id is not None and mention.concept_id not in concepts:
            raise ForeignKeyViolationError(
                f"mention {mention.mention_id!r} references missing concept "
                f"{mention.concept_id!r}"
            )

    if batch.notices:
        index = build_index(notices.values())
    else:
        index = snapshot.index
    return Snapshot(
        documents=documents,
        notices=notices,
        mentions=mentions,
        concepts=concepts,
        index=index,
        version=snapshot.version + 1,
    )


# ---------------------------------------------------------------------------
# Queries

@dataclass(frozen=True)
class Query:
    """Conjunctive filters; every given filter must hold."""

    text_terms: tuple[str, ...] = ()
    concept_id: Optional[str] = None
    place_id: Optional[str] = None
    period: Optional[TimeRange] = None
    municipality: Optional[str] = None
    limit: int = 20
    offset: int = 0

    def __post_init__(self):
        if self.limit < 1:
            raise ValueError("limit must be >= 1")
        if self.offset < 0:
            raise ValueError("offset must be >= 0")


@dataclass(frozen=True)
class Hit:
    notice_id: str
    score: int
    matched_spans: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class ResultPage:
    total: int
    hits: tuple[Hit, ...]


def _mentions_by_notice(snapshot: Snapshot) -> dict[str, list[Mention]]:
    grouped: dict[str, list[Mention]] = {}
    for mention in snapshot.mentions.values():
        grouped.setdefault(mention.notice_id, []).append(mention)
    return grouped


def query(snapshot: Snapshot, q: Query) -> ResultPage:
    """Evaluate conjunctive filters; rank by (score desc, notice_id asc)."""
    candidates = set(snapshot.notices)
    scores: dict[str, int] = {}
    matched_positions: dict[str, set[int]] = {}

    terms = [fold_text(t) for t in q.text_terms]
    for term in terms:
        postings = dict(snapshot.index.lookup(term))
        candidates &= set(postings)
        for notice_id in list(candidates):
            positions = postings[notice_id]
            scores[notice_id] = scores.get(notice_id, 0) + len(positions)
            matched_positions.setdefault(notice_id, set()).update(positions)

    if q.concept_id is not None or q.place_id is not None or q.period is not None:
        grouped = _mentions_by_notice(snapshot)
        if q.concept_id is not None:
            candidates = {
                nid
                for nid in candidates
                if any(m.concept_id == q.concept_id for m in grouped.get(nid, []))
            }
        if q.place_id is not None:
            candidates = {
                nid
                for nid in candidates
                if any(
                    m.kind == "place" and m.concept_id == q.place_id
                    for m in grouped.get(nid, [])
                )
            }
        if q.period is not None:
            candidates = {
                nid
                for nid in candidates
                if any(
                    m.kind == "date" and m.time is not None and m.time.overlaps(q.period)
                    for m in grouped.get(nid, [])
                )
            }
    if q.municipality is not None:
        wanted = fold_text(q.municipality)
        candidates = {
            nid
            for nid in candidates
            if fold_text(snapshot.notices[nid].municipality) == wanted
        }

    ranked = sorted(candidates, key=lambda nid: (-scores.get(nid, 0), nid))
    total = len(ranked)
    page_ids = ranked[q.offset : q.offset + q.limit]
    hits = []
    for nid in page_ids:
        notice = snapshot.notices[nid]
        spans = sorted(
            {
                (notice.tokens[pos][0], notice.tokens[pos][1])
                for pos in matched_positions.get(nid, ())
            }
        )
        hits.append(
            Hit(notice_id=nid, score=scores.get(nid, 0), matched_spans=tuple(spans))
        )
    return ResultPage(total=total, hits=tuple(hits))


# ---------------------------------------------------------------------------
# Serialization

def _canonical(record: dict) -> str:
    return json.dumps(
        record, ensure_ascii=False, sort_keys=True, separators=(",", ":")
    )


def document_to_record(doc: Document) -> dict:
    return {
        "doc_id": doc.meta.doc_id,
        "title": doc.meta.title,
        "volume": doc.meta.volume,
        "language": doc.meta.language,
        "text": doc.text,
    }


def _document_from_record(record: dict) -> Document:
    meta = DocumentMeta(
        doc_id=record["doc_id"],
        title=record["title"],
        volume=record["volume"],
        language=record["language"],
    )
    return Document(meta=meta, text=record["text"])


def notice_to_record(notice: NoticeRecord) -> dict:
    return {
        "notice_id": notice.notice_id,
        "doc_id": notice.doc_id,
        "number": notice.number,
        "municipality": notice.municipality,
        "start": notice.start,
        "end": notice.end,
        "zones": [[z.label, z.start, z.end] for z in notice.zones],
        "tokens": [[s, e, t] for s, e, t in notice.tokens],
    }


def _notice_from_record(record: dict) -> NoticeRecord:
    return NoticeRecord(
        notice_id=record["notice_id"],
        doc_id=record["doc_id"],
        number=record["number"],
        municipality=record["municipality"],
        start=record["start"],
        end=record["end"],
        zones=tuple(Zone(label, s, e) for label, s, e in record["zones"]),
        tokens=tuple((s, e, t) for s, e, t in record["tokens"]),
    )


def mention_to_record(mention: Mention) -> dict:
    return {
        "mention_id": mention.mention_id,
        "notice_id": mention.notice_id,
        "kind": mention.kind,
        "start": mention.start,
        "end": mention.end,
        "surface": mention.surface,
        "normalized": mention.normalized,
        "concept_id": mention.concept_id,
        "from_year": mention.time.from_year if mention.time else None,
        "to_year": mention.time.to_year if mention.time else None,
    }


def _mention_from_record(record: dict) -> Mention:
    time = None
    if record["from_year"] is not None:
        time = TimeRange(record["from_year"], record["to_year"])
    return Mention(
        mention_id=record["mention_id"],
        notice_id=record["notice_id"],
        kind=record["kind"],
        start=record["start"],
        end=record["end"],
        surface=record["surface"],
        normalized=record["normalized"],
        concept_id=record["concept_id"],
        time=time,
    )


def concept_to_record(concept: Concept) -> dict:
    return {
        "concept_id": concept.concept_id,
        "labels": {
            lang: [[l.display, l.normalized] for l in labels]
            for lang, labels in concept.labels.items()
        },
        "preferred": dict(concept.preferred),
        "notes": concept.notes,
    }


def _concept_from_record(record: dict) -> Concept:
    return Concept(
        concept_id=record["concept_id"],
        labels={
            lang: tuple(Label(display, normalized) for display, normalized in labels)
            for lang, labels in record["labels"].items()
        },
        preferred=dict(record["preferred"]),
        notes=record["notes"],
    )


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def persist(snapshot: Snapshot, directory: str | Path) -> None:
    """Write all collections plus a checksummed manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    serializers = {
        "documents.jsonl": (
            snapshot.documents,
            document_to_record,
        ),
        "notices.jsonl": (snapshot.notices, notice_to_record),
        "mentions.jsonl": (snapshot.mentions, mention_to_record),
        "concepts.jsonl": (snapshot.concepts, concept_to_record),
    }
    checksums = {}
    for name, (collection, to_record) in serializers.items():
        lines = [
            _canonical(to_record(collection[key])) for key in sorted(collection)
        ]
        data = ("\n".join(lines) + "\n" if lines else "").encode("utf-8")
        (directory / name).write_bytes(data)
        checksums[name] = _sha256(data)
    manifest = {
        "format_version": FORMAT_VERSION,
        "version": snapshot.version,
        "files": checksums,
    }
    (directory / MANIFEST_NAME).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _read_jsonl(data: bytes) -> list[dict]:
    text = data.decode("utf-8")
    return [json.loads(line) for line in text.splitlines() if line]


def load(directory: str | Path) -> Snapshot:
    """Read a snapshot back; an absent store is the empty version 0 state."""
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.exists():
        leftovers = [
            name for name in COLLECTION_FILES if (directory / name).exists()
        ]
        if leftovers:
            raise CorruptSnapshotError(
                f"{directory}: data files without a manifest: {', '.join(leftovers)}"
            )
        return EMPTY_SNAPSHOT
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise CorruptSnapshotError(f"{manifest_path}: unreadable manifest") from exc
    if manifest.get("format_version") != FORMAT_VERSION:
        raise VersionMismatchError(
            f"{directory}: format_version {manifest.get('format_version')!r}, "
            f"expected {FORMAT_VERSION}"
        )
    blobs = {}
    for name in COLLECTION_FILES:
        expected = manifest.get("files", {}).get(name)
        if expected is None:
            raise CorruptSnapshotError(f"{directory}: manifest misses {name}")
        path = directory / name
        if not path.exists():
            raise CorruptSnapshotError(f"{directory}: missing file {name}")
        data = path.read_bytes()
        if _sha256(data) != expected:
            raise CorruptSnapshotError(f"{directory}: checksum mismatch for {name}")
        blobs[name] = data

    documents = {
        r["doc_id"]: _document_from_record(r)
        for r in _read_jsonl(blobs["documents.jsonl"])
    }
    notices = {
        r["notice_id"]: _notice_from_record(r)
        for r in _read_jsonl(blobs["notices.jsonl"])
    }
    mentions = {
        r["mention_id"]: _mention_from_record(r)
        for r in _read_jsonl(blobs["mentions.jsonl"])
    }
    concepts = {
        r["concept_id"]: _concept_from_record(r)
        for r in _read_jsonl(blobs["concepts.jsonl"])
    }
    return Snapshot(
        documents=documents,
        notices=notices,
        mentions=mentions,
        concepts=concepts,
        index=build_index(notices.values()),
        version=int(manifest["version"]),
    )
