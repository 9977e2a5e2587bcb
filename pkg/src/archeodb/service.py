"""HTTP service over a snapshot store.

Read endpoints serve from the current immutable snapshot; the two
curation endpoints run under a single writer lock, persist, append to
the audit log, and only then swap the snapshot in. JSON bodies mirror
the stored record shapes so there is exactly one schema to know.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi import Query as QueryParam
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from .corpus import LANGUAGES
from .extraction import TimeRange
from .store import (
    Batch,
    Query,
    Snapshot,
    commit,
    concept_to_record,
    load,
    mention_to_record,
    notice_to_record,
    persist,
    query,
)
from .terminology import (
    AddLabel,
    CurationError,
    DuplicateLabelError,
    MergeConcepts,
    MergeOrderViolationError,
    UnknownConceptError,
    append_audit,
    curate,
    normalize_form,
)

AUDIT_LOG_NAME = "audit.log"


class ApiError(Exception):
    """Carries the HTTP status and the {code, message} body."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _bad_request(message: str) -> ApiError:
    return ApiError(400, "bad_request", message)


def _not_found(message: str) -> ApiError:
    return ApiError(404, "not_found", message)


def _conflict(message: str) -> ApiError:
    return ApiError(409, "conflict", message)


@dataclass
class StoreHandle:
    """Mutable holder for the current snapshot; swap only under lock."""

    snapshot: Snapshot
    store_dir: Optional[Path] = None
    lock: threading.Lock = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.lock is None:
            self.lock = threading.Lock()


class LabelBody(BaseModel):
    language: str
    label: str


class MergeBody(BaseModel):
    keep_id: str
    merge_id: str


def _page_params(limit: int, offset: int) -> tuple[int, int]:
    if limit < 1:
        raise _bad_request("limit must be >= 1")
    if offset < 0:
        raise _bad_request("offset must be >= 0")
    return limit, offset


def create_app(handle: StoreHandle) -> FastAPI:
    app = FastAPI(openapi_url=None, docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    async def api_error_handler(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"code": "bad_request", "message": str(exc.errors())},
        )

    @app.exception_handler(StarletteHTTPException)
    async def http_exception_handler(request: Request, exc: StarletteHTTPException):
        code = {400: "bad_request", 404: "not_found", 409: "conflict"}.get(
            exc.status_code, "error"
        )
        return JSONResponse(
            status_code=exc.status_code,
            content={"code": code, "message": str(exc.detail)},
        )

    @app.get("/healthz")
    def healthz():
        snapshot = handle.snapshot
        return {
            "status": "ok",
            "store_version": snapshot.version,
            "notices": len(snapshot.notices),
        }

    @app.get("/search")
    def search(
        q: Optional[str] = None,
        concept: Optional[str] = None,
        place: Optional[str] = None,
        from_year: Optional[int] = QueryParam(default=None, alias="from"),
        to_year: Optional[int] = QueryParam(default=None, alias="to"),
        municipality: Optional[str] = None,
        limit: int = 20,
        offset: int = 0,
    ):
        limit, offset = _page_params(limit, offset)
        if (from_year is None) != (to_year is None):
            raise _bad_request("from and to must be given together")
        period = None
        if from_year is not None:
            try:
                period = TimeRange(from_year, to_year)
            except ValueError as exc:
                raise _bad_request(str(exc))
        terms = tuple(t.strip() for t in (q or "").split(",") if t.strip())
        try:
            page = query(
                handle.snapshot,
                Query(
                    text_terms=terms,
                    concept_id=concept,
                    place_id=place,
                    period=period,
                    municipality=municipality,
                    limit=limit,
                    offset=offset,
                ),
            )
        except ValueError as exc:
            raise _bad_request(str(exc))
        return {
            "total": page.total,
            "hits": [
                {
                    "notice_id": h.notice_id,
                    "score": h.score,
                    "matched_spans": [[s, e] for s, e in h.matched_spans],
                }
                for h in page.hits
            ],
        }

    @app.get("/notices/{notice_id}")
    def get_notice(notice_id: str):
        snapshot = handle.snapshot
        notice = snapshot.notices.get(notice_id)
        if notice is None:
            raise _not_found(f"unknown notice {notice_id!r}")
        doc = snapshot.documents[notice.doc_id]
        mentions = sorted(
            (m for m in snapshot.mentions.values() if m.notice_id == notice_id),
            key=lambda m: (m.start, m.end, m.kind),
        )
        return {
            "notice": notice_to_record(notice),
            "text": doc.text[notice.start : notice.end],
            "mentions": [mention_to_record(m) for m in mentions],
        }

    @app.get("/concepts/{concept_id}")
    def get_concept(concept_id: str):
        concept = handle.snapshot.concepts.get(concept_id)
        if concept is None:
            raise _not_found(f"unknown concept {concept_id!r}")
        return concept_to_record(concept)

    @app.get("/concepts")
    def list_concepts(
        label: Optional[str] = None,
        lang: Optional[str] = None,
        limit: int = 20,
        offset: int = 0,
    ):
        limit, offset = _page_params(limit, offset)
        if lang is not None and lang not in LANGUAGES:
            raise _bad_request(f"lang must be one of {', '.join(LANGUAGES)}")
        snapshot = handle.snapshot
        needle = normalize_form(label) if label else None
        matches = []
        for concept_id in sorted(snapshot.concepts):
            concept = snapshot.concepts[concept_id]
            if needle is not None:
                langs = (lang,) if lang else tuple(concept.labels)
                if not any(
                    needle in l.normalized
                    for lg in langs
                    for l in concept.labels_for(lg)
                ):
                    continue
            matches.append(concept)
        return {
            "total": len(matches),
            "concepts": [
                concept_to_record(c) for c in matches[offset : offset + limit]
            ],
        }

    @app.get("/terms")
    def list_terms(sort: str = "freq", limit: int = 20, offset: int = 0):
        limit, offset = _page_params(limit, offset)
        if sort != "freq":
            raise _bad_request("sort must be 'freq'")
        snapshot = handle.snapshot
        forms: dict[str, int] = {}
        for mention in snapshot.mentions.values():
            if mention.kind == "term":
                forms[mention.normalized] = forms.get(mention.normalized, 0) + 1
        clusters: dict[str, list[tuple[str, int]]] = {}
        for form in sorted(forms):
            clusters.setdefault(normalize_form(form), []).append(
                (form, forms[form])
            )
        ranked = sorted(
            clusters.items(),
            key=lambda item: (-sum(freq for _, freq in item[1]), item[0]),
        )
        return {
            "total": len(ranked),
            "terms": [
                {
                    "key": key,
                    "total_freq": sum(freq for _, freq in members),
                    "members": [
                        {"form": form, "freq": freq} for form, freq in members
                    ],
                }
                for key, members in ranked[offset : offset + limit]
            ],
        }

    def _persist_and_swap(snapshot: Snapshot, audit_entry) -> None:
        if handle.store_dir is not None:
            persist(snapshot, handle.store_dir)
            append_audit(Path(handle.store_dir) / AUDIT_LOG_NAME, audit_entry)
        handle.snapshot = snapshot

    @app.post("/concepts/{concept_id}/labels")
    def add_label(concept_id: str, body: LabelBody):
        if body.language not in LANGUAGES:
            raise _bad_request(f"language must be one of {', '.join(LANGUAGES)}")
        with handle.lock:
            snapshot = handle.snapshot
            table = [snapshot.concepts[cid] for cid in sorted(snapshot.concepts)]
            try:
                new_table, entry = curate(
                    table, AddLabel(concept_id, body.language, body.label)
                )
            except UnknownConceptError as exc:
                raise _not_found(str(exc))
            except DuplicateLabelError as exc:
                raise _conflict(str(exc))
            except CurationError as exc:
                raise _bad_request(str(exc))
            updated = next(c for c in new_table if c.concept_id == concept_id)
            new_snapshot = commit(snapshot, Batch(concepts=(updated,)))
            _persist_and_swap(new_snapshot, entry)
        return concept_to_record(updated)

    @app.post("/concepts/merge")
    def merge_concepts(body: MergeBody):
        with handle.lock:
            snapshot = handle.snapshot
            table = [snapshot.concepts[cid] for cid in sorted(snapshot.concepts)]
            try:
                new_table, entry = curate(
                    table, MergeConcepts(body.keep_id, body.merge_id)
                )
            except UnknownConceptError as exc:
                raise _not_found(str(exc))
            except MergeOrderViolationError as exc:
                raise _conflict(str(exc))
            except CurationError as exc:
                raise _bad_request(str(exc))
            survivor = next(c for c in new_table if c.concept_id == body.keep_id)
            relinked = tuple(
                replace(m, concept_id=body.keep_id)
                for m in snapshot.mentions.values()
                if m.concept_id == body.merge_id
            )
            new_snapshot = commit(
                snapshot,
                Batch(
                    mentions=relinked,
                    concepts=(survivor,),
                    delete_concepts=(body.merge_id,),
                ),
            )
            _persist_and_swap(new_snapshot, entry)
        return concept_to_record(survivor)

    return app


def serve(store_dir: str | Path, port: int, host: str = "127.0.0.1") -> None:
    """Load the store and run the service until interrupted."""
    import uvicorn

    handle = StoreHandle(snapshot=load(store_dir), store_dir=Path(store_dir))
    app = create_app(handle)
    uvicorn.run(app, host=host, port=port, log_level="warning")
