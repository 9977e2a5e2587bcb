"""Load digitized volume files into an immutable in-memory document model.

All character offsets used anywhere in the package index Unicode scalar
values of ``Document.text`` exactly as stored here: line endings are
normalized to LF and a leading BOM is stripped once, at load time.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

LANGUAGES = ("fr", "de", "en")

_BOM = "﻿"


class CorpusError(Exception):
    """Base class for corpus loading failures."""


class InvalidEncodingError(CorpusError):
    """Input bytes are not valid UTF-8."""


class EmptyMetaError(CorpusError):
    """Document metadata is missing a doc_id."""


class DuplicateDocIdError(CorpusError):
    """Two corpus files share the same stem."""


@dataclass(frozen=True)
class DocumentMeta:
    """Caller-assigned identity and provenance of one digitized volume."""

    doc_id: str
    title: str
    volume: str
    language: str
    source_path: str = ""

    def __post_init__(self):
        if self.language not in LANGUAGES:
            raise ValueError(
                f"language must be one of {LANGUAGES}, got {self.language!r}"
            )


@dataclass(frozen=True)
class Document:
    """One volume's metadata plus its normalized text (LF-only, no BOM)."""

    meta: DocumentMeta
    text: str


def load_document(data: bytes, meta: DocumentMeta) -> Document:
    """Decode one volume file and normalize its text.

    CRLF and lone CR become LF; a leading BOM is dropped. The metadata is
    carried through unchanged. Raises InvalidEncodingError for non-UTF-8
    input and EmptyMetaError when meta.doc_id is empty.
    """
    if not meta.doc_id:
        raise EmptyMetaError("doc_id must be non-empty")
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InvalidEncodingError(f"{meta.doc_id}: not valid UTF-8: {exc}") from exc
    if text.startswith(_BOM):
        text = text[len(_BOM):]
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    return Document(meta=meta, text=text)


def corpus_manifest(
    directory_listing: Iterable[str], default_language: str
) -> list[DocumentMeta]:
    """Build one DocumentMeta per ``.txt`` file name, in lexicographic order.

    doc_id is the file stem; title defaults to the stem and volume to the
    empty string (a meta.tsv can refine both later). Raises
    DuplicateDocIdError when two listed files share a stem.
    """
    names = sorted(n for n in directory_listing if n.endswith(".txt"))
    metas: list[DocumentMeta] = []
    seen: set[str] = set()
    for name in names:
        stem = name[: -len(".txt")]
        if stem in seen:
            raise DuplicateDocIdError(f"duplicate doc_id {stem!r}")
        seen.add(stem)
        metas.append(
            DocumentMeta(
                doc_id=stem,
                title=stem,
                volume="",
                language=default_language,
                source_path=name,
            )
        )
    return metas


META_COLUMNS = ("doc_id", "title", "volume", "language")


def read_meta_table(path: str | os.PathLike) -> dict[str, dict[str, str]]:
    """Read a corpus meta.tsv (header row doc_id/title/volume/language).

    Returns a mapping doc_id -> column dict. Raises CorpusError on a bad
    header or duplicate doc_id rows.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise CorpusError(f"{path}: empty meta table")
    header = tuple(lines[0].rstrip("\n").split("\t"))
    if header != META_COLUMNS:
        raise CorpusError(
            f"{path}: expected header {'/'.join(META_COLUMNS)}, got {header}"
        )
    rows: dict[str, dict[str, str]] = {}
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split("\t")
        if len(cells) != len(META_COLUMNS):
            raise CorpusError(f"{path}:{i}: expected {len(META_COLUMNS)} columns")
        row = dict(zip(META_COLUMNS, cells))
        if row["doc_id"] in rows:
            raise DuplicateDocIdError(f"{path}:{i}: duplicate doc_id {row['doc_id']!r}")
        rows[row["doc_id"]] = row
    return rows


def load_corpus_dir(
    directory: str | os.PathLike, default_language: str
) -> tuple[list[Document], list[str]]:
    """Load every ``<doc_id>.txt`` under a corpus directory.

    An optional ``meta.tsv`` beside the files overrides title/volume/language
    per doc_id. Returns the documents in manifest order plus warnings for
    meta rows that reference no file.
    """
    directory = Path(directory)
    listing = sorted(p.name for p in directory.iterdir() if p.is_file())
    metas = corpus_manifest(listing, default_language)
    warnings: list[str] = []

    meta_path = directory / "meta.tsv"
    if meta_path.exists():
        table = read_meta_table(meta_path)
        known = {m.doc_id for m in metas}
        for doc_id in sorted(set(table) - known):
            warnings.append(f"{doc_id}@0: meta.tsv row has no matching .txt file")
        metas = [
            DocumentMeta(
                doc_id=m.doc_id,
                title=table[m.doc_id]["title"] if m.doc_id in table else m.title,
                volume=table[m.doc_id]["volume"] if m.doc_id in table else m.volume,
                language=table[m.doc_id]["language"]
                if m.doc_id in table
                else m.language,
                source_path=m.source_path,
            )
            for m in metas
        ]

    docs = [
        load_document((directory / m.source_path).read_bytes(), m) for m in metas
    ]
    return docs, warnings
