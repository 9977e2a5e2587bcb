"""Corpus loading: decoding, normalization, manifest, and meta overrides."""

from __future__ import annotations

import pytest

from archeodb.corpus import (
    CorpusError,
    Document,
    DocumentMeta,
    DuplicateDocIdError,
    EmptyMetaError,
    InvalidEncodingError,
    corpus_manifest,
    load_corpus_dir,
    load_document,
    read_meta_table,
)


def meta(doc_id="d1", language="fr"):
    return DocumentMeta(doc_id=doc_id, title="T", volume="1", language=language)


def test_load_document_normalizes_line_endings():
    doc = load_document(b"a\r\nb\rc\nd", meta())
    assert doc.text == "a\nb\nc\nd"


def test_load_document_strips_bom():
    doc = load_document("﻿premier".encode("utf-8"), meta())
    assert doc.text == "premier"


def test_load_document_keeps_interior_unicode():
    doc = load_document("âge du Fer à Sion".encode("utf-8"), meta())
    assert doc.text == "âge du Fer à Sion"


def test_load_document_rejects_bad_utf8():
    with pytest.raises(InvalidEncodingError):
        load_document(b"\xff\xfe\x00bad", meta())


def test_load_document_rejects_empty_doc_id():
    with pytest.raises(EmptyMetaError):
        load_document(b"text", meta(doc_id=""))


def test_meta_rejects_unknown_language():
    with pytest.raises(ValueError):
        DocumentMeta(doc_id="d1", title="T", volume="1", language="it")


def test_corpus_manifest_orders_and_defaults():
    metas = corpus_manifest(["b.txt", "a.txt", "notes.md"], "de")
    assert [m.doc_id for m in metas] == ["a", "b"]
    assert all(m.language == "de" for m in metas)
    assert metas[0].source_path == "a.txt"
    assert metas[0].title == "a" and metas[0].volume == ""


def test_corpus_manifest_rejects_duplicate_stem():
    with pytest.raises(DuplicateDocIdError):
        corpus_manifest(["a.txt", "a.txt"], "fr")


def test_read_meta_table_requires_exact_header(tmp_path):
    path = tmp_path / "meta.tsv"
    path.write_text("doc_id\ttitle\tvolume\n", encoding="utf-8")
    with pytest.raises(CorpusError):
        read_meta_table(path)


def test_read_meta_table_rejects_duplicate_rows(tmp_path):
    path = tmp_path / "meta.tsv"
    path.write_text(
        "doc_id\ttitle\tvolume\tlanguage\n"
        "a\tA\t1\tfr\n"
        "a\tA bis\t2\tde\n",
        encoding="utf-8",
    )
    with pytest.raises(DuplicateDocIdError):
        read_meta_table(path)


def test_load_corpus_dir_applies_meta_and_warns_on_strays(tmp_path):
    (tmp_path / "a.txt").write_text("alpha\n", encoding="utf-8")
    (tmp_path / "b.txt").write_text("beta\n", encoding="utf-8")
    (tmp_path / "meta.tsv").write_text(
        "doc_id\ttitle\tvolume\tlanguage\n"
        "a\tVolume A\tI\tde\n"
        "ghost\tMissing\tII\ten\n",
        encoding="utf-8",
    )
    docs, warnings = load_corpus_dir(tmp_path, "fr")
    assert [d.meta.doc_id for d in docs] == ["a", "b"]
    assert docs[0].meta.language == "de" and docs[0].meta.title == "Volume A"
    assert docs[1].meta.language == "fr", "b has no meta row, default applies"
    assert warnings == ["ghost@0: meta.tsv row has no matching .txt file"]


def test_load_corpus_dir_without_meta(tmp_path):
    (tmp_path / "only.txt").write_text("text\n", encoding="utf-8")
    docs, warnings = load_corpus_dir(tmp_path, "en")
    assert len(docs) == 1 and warnings == []
    assert isinstance(docs[0], Document)
    assert docs[0].meta.language == "en"


def test_fixture_corpus_loads_cleanly(ingested):
    docs, warnings = load_corpus_dir(
        ingested.config.corpus_dir, ingested.config.default_language
    )
    assert [d.meta.doc_id for d in docs] == ["vol_alpha", "vol_beta", "vol_gamma"]
    assert [d.meta.language for d in docs] == ["fr", "de", "en"]
    assert warnings == []
    for doc in docs:
        assert "\r" not in doc.text
        assert not doc.text.startswith("﻿")
