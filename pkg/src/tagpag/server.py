"""HTTP service: config, per-annotator sessions, task payloads, annotation
writes, archive lookups, CSV export, scraped-HTML serving, and UI assets.

Annotator identity travels as a query parameter with no authentication;
deployments are trusted single-team setups, so the id is a claim, not a
credential. Every error response carries ``{"error": code, "message": ...}``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse, JSONResponse, Response
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import archive, ordering, store as store_mod, url_analysis
from .extraction import ExtractionResult, extract_clean_text
from .htmldoc import parse_document
from .store import (
    Annotation,
    AnnotationStore,
    InvalidAnnotatorId,
    InvalidLabels,
    LabelConfig,
    StorageFailure,
    Task,
    UnknownTask,
    ANNOTATOR_ID_RE,
    RESERVED_SHORTCUTS,
)

# Scraped pages must render inert: no scripts, no external loads.
HTML_LOCKDOWN_CSP = "default-src 'none'; img-src data:; style-src 'unsafe-inline'"

STATIC_DIR = Path(__file__).parent / "static"


class ApiError(Exception):
    def __init__(self, status_code: int, code: str, message: str):
        super().__init__(message)
        self.status_code = status_code
        self.code = code
        self.message = message


class AnnotationBody(BaseModel):
    labels: list[str] = []
    comment: str = ""
    edited_text: Optional[str] = None


@dataclass
class AppState:
    tasks: list[Task]
    config: LabelConfig
    store: AnnotationStore
    html_dir: Optional[Path]
    wayback: archive.WaybackClient
    randomize: bool = False
    global_seed: int = 0
    static_dir: Path = STATIC_DIR
    orders: dict = field(default_factory=dict)
    content_cache: dict = field(default_factory=dict)
    cache_lock: threading.Lock = field(default_factory=threading.Lock)

    def order_for(self, annotator_id: str) -> ordering.SessionOrder:
        order = self.orders.get(annotator_id)
        if order is None:
            order = ordering.build_order(
                annotator_id, len(self.tasks), self.global_seed, self.randomize,
            )
            self.orders[annotator_id] = order
        return order


def _require_annotator(annotator: str) -> str:
    if not ANNOTATOR_ID_RE.fullmatch(annotator or ""):
        raise ApiError(400, "invalid_annotator_id",
                       "annotator must match [A-Za-z0-9_-]+")
    return annotator


def _annotation_json(annotation: Optional[Annotation]):
    if annotation is None:
        return None
    return {
        "task_id": annotation.task_id,
        "annotator_id": annotation.annotator_id,
        "labels": list(annotation.labels),
        "comment": annotation.comment,
        "edited_text": annotation.edited_text,
        "updated_at": annotation.updated_at,
    }


def _blocks_json(result: ExtractionResult):
    return [
        {
            "tag": b.tag,
            "text": b.text,
            "char_count": b.char_count,
            "link_char_count": b.link_char_count,
            "link_density": b.link_density,
            "penalty": b.penalty,
            "doc_order": b.doc_order,
            "kept": b.kept,
            "reason": b.reason,
        }
        for b in result.blocks
    ]


def _url_analysis_json(url: str, labels) -> dict:
    try:
        parts = url_analysis.parse_url(url)
    except url_analysis.MalformedUrl:
        spans = url_analysis.highlight_string(url, labels)
        return {
            "malformed": True,
            "original": url,
            "parts": None,
            "tokens": [],
            "highlights": [_span_json(s) for s in spans],
        }
    return {
        "malformed": False,
        "original": url,
        "parts": {
            "scheme": parts.scheme,
            "host": parts.host,
            "port": parts.port,
            "path_segments": parts.path_segments,
            "query_pairs": [list(pair) for pair in parts.query_pairs],
            "fragment": parts.fragment,
        },
        "tokens": [
            {"token": t.token, "component": t.component, "start": t.start, "end": t.end}
            for t in url_analysis.tokenize_url(parts)
        ],
        "highlights": [_span_json(s) for s in url_analysis.highlight_url(parts, labels)],
    }


def _span_json(span: url_analysis.HighlightSpan) -> dict:
    return {
        "start": span.start,
        "end": span.end,
        "keyword": span.keyword,
        "label_key": span.label_key,
    }


def _resolve_html_path(state: AppState, task: Task) -> Optional[Path]:
    if not task.html_ref or state.html_dir is None:
        return None
    base = state.html_dir.resolve()
    candidate = (base / task.html_ref).resolve()
    # A crafted html_path must not escape the html directory.
    if base != candidate and base not in candidate.parents:
        return None
    if not candidate.is_file():
        return None
    return candidate


_EMPTY_EXTRACTION = {"raw_text": "", "clean_text": "", "blocks": []}


def _task_content(state: AppState, task: Task) -> dict:
    """Extraction + URL analysis for one task, computed once and cached.

    Extraction is pure, so it runs outside the lock; concurrent first
    requests may compute twice but setdefault keeps one canonical result.
    """
    with state.cache_lock:
        cached = state.content_cache.get(task.task_id)
    if cached is not None:
        return cached

    html_path = _resolve_html_path(state, task)
    data = None
    if html_path is not None:
        try:
            data = html_path.read_bytes()
        except OSError:
            data = None
    if data is None:
        extraction = dict(_EMPTY_EXTRACTION)
        html_missing = True
    else:
        result = extract_clean_text(parse_document(data))
        extraction = {
            "raw_text": result.raw_text,
            "clean_text": result.clean_text,
            "blocks": _blocks_json(result),
        }
        html_missing = False
    content = {
        "extraction": extraction,
        "html_missing": html_missing,
        "url_analysis": _url_analysis_json(task.url, state.config.labels),
    }
    with state.cache_lock:
        return state.content_cache.setdefault(task.task_id, content)


def create_app(state: AppState) -> FastAPI:
    app = FastAPI(title="tagpag", docs_url=None, redoc_url=None)
    tasks_by_id = {task.task_id: task for task in state.tasks}

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status_code,
            content={"error": exc.code, "message": exc.message},
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={"error": "validation_error", "message": str(exc.errors())},
        )

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request: Request, exc: StarletteHTTPException):
        codes = {404: "not_found", 405: "method_not_allowed"}
        return JSONResponse(
            status_code=exc.status_code,
            content={
                "error": codes.get(exc.status_code, "http_error"),
                "message": str(exc.detail),
            },
        )

    def _get_task(task_id: str) -> Task:
        task = tasks_by_id.get(task_id)
        if task is None:
            raise ApiError(404, "unknown_task", f"no task with id {task_id!r}")
        return task

    @app.get("/api/config")
    def get_config():
        return {
            "mode": state.config.mode,
            "labels": [
                {
                    "key": label.key,
                    "name": label.name,
                    "shortcut": label.shortcut,
                    "keywords": list(label.keywords),
                }
                for label in state.config.labels
            ],
            "reserved_shortcuts": list(RESERVED_SHORTCUTS),
        }

    @app.get("/api/session")
    def get_session(annotator: str = Query(default="")):
        annotator_id = _require_annotator(annotator)
        order = state.order_for(annotator_id)
        annotated = state.store.annotated_task_indices(annotator_id)
        first = ordering.next_unannotated(order, annotated, 0) if len(order) else None
        return {
            "annotator_id": annotator_id,
            "task_ids": [state.tasks[i].task_id for i in order.permutation],
            "counts": {"annotated": len(annotated), "total": len(order)},
            "first_unannotated": first,
            "randomized": order.randomized,
        }

    @app.get("/api/tasks/{task_id}")
    def get_task(task_id: str, annotator: str = Query(default="")):
        annotator_id = _require_annotator(annotator)
        task = _get_task(task_id)
        order = state.order_for(annotator_id)
        content = _task_content(state, task)
        own = state.store.get_annotation(task_id, annotator_id)
        return {
            "task": {"task_id": task.task_id, "url": task.url, "html_ref": task.html_ref},
            "extraction": content["extraction"],
            "html_missing": content["html_missing"],
            "url_analysis": content["url_analysis"],
            "own_annotation": _annotation_json(own),
            "position": ordering.position_of(order, state.store.task_index(task_id)),
            "total": len(order),
        }

    @app.put("/api/tasks/{task_id}/annotation")
    def put_annotation(task_id: str, body: AnnotationBody, annotator: str = Query(default="")):
        annotator_id = _require_annotator(annotator)
        task = _get_task(task_id)
        try:
            committed = state.store.upsert_annotation(Annotation(
                task_id=task.task_id,
                annotator_id=annotator_id,
                labels=tuple(body.labels),
                comment=body.comment,
                edited_text=body.edited_text,
            ))
        except InvalidLabels as exc:
            raise ApiError(422, "invalid_labels", str(exc)) from exc
        except InvalidAnnotatorId as exc:
            raise ApiError(400, "invalid_annotator_id", str(exc)) from exc
        except UnknownTask as exc:
            raise ApiError(404, "unknown_task", str(exc)) from exc
        except StorageFailure as exc:
            raise ApiError(500, "storage_failure", str(exc)) from exc
        order = state.order_for(annotator_id)
        annotated = state.store.annotated_task_indices(annotator_id)
        current = ordering.position_of(order, state.store.task_index(task_id))
        next_position = ordering.advance(order, annotated, current, state.config.mode)
        return {
            "annotation": _annotation_json(committed),
            "next_position": next_position,
            "counts": {"annotated": len(annotated), "total": len(order)},
        }

    @app.get("/api/tasks/{task_id}/html")
    def get_task_html(task_id: str):
        task = _get_task(task_id)
        html_path = _resolve_html_path(state, task)
        if html_path is None:
            raise ApiError(404, "html_missing", f"no stored HTML for task {task_id!r}")
        return Response(
            content=html_path.read_bytes(),
            media_type="text/html",
            headers={
                "Content-Security-Policy": HTML_LOCKDOWN_CSP,
                "X-Content-Type-Options": "nosniff",
            },
        )

    @app.get("/api/wayback")
    def get_wayback(task_id: str = Query(default="")):
        task = _get_task(task_id)
        if not task.url:
            result = archive.ArchiveLookup(status=archive.STATUS_LOOKUP_FAILED)
        else:
            result = state.wayback.lookup(task.url)
        return {
            "status": result.status,
            "snapshot_url": result.snapshot_url,
            "snapshot_timestamp": result.snapshot_timestamp,
        }

    @app.get("/api/export.csv")
    def get_export(scope: str = Query(default="all")):
        if scope != "all" and not ANNOTATOR_ID_RE.fullmatch(scope):
            raise ApiError(400, "invalid_scope", "scope must be 'all' or an annotator id")
        return Response(
            content=state.store.export_csv(scope),
            media_type="text/csv; charset=utf-8",
            headers={"Content-Disposition": 'attachment; filename="annotations.csv"'},
        )

    @app.get("/{asset_path:path}")
    def get_static(asset_path: str):
        if asset_path.startswith("api/") or asset_path == "api":
            raise ApiError(404, "not_found", f"no API route /{asset_path}")
        base = state.static_dir.resolve()
        index = base / "index.html"
        if asset_path:
            candidate = (base / asset_path).resolve()
            if (base in candidate.parents) and candidate.is_file():
                return FileResponse(candidate)
        if index.is_file():
            return FileResponse(index)
        # No built UI bundle present; the API is still fully usable.
        raise ApiError(404, "no_ui_bundle",
                       "UI assets not found; build the frontend or use the API directly")

    return app


def build_state(
    tasks_path,
    labels_path,
    annotations_dir,
    html_dir=None,
    randomize: bool = False,
    global_seed: int = 0,
    static_dir=None,
    wayback_client: Optional[archive.WaybackClient] = None,
) -> AppState:
    tasks = store_mod.load_tasks(tasks_path)
    config = store_mod.load_labels(labels_path)
    return AppState(
        tasks=tasks,
        config=config,
        store=AnnotationStore(annotations_dir, tasks, config),
        html_dir=Path(html_dir) if html_dir else None,
        wayback=wayback_client or archive.WaybackClient(),
        randomize=randomize,
        global_seed=global_seed,
        static_dir=Path(static_dir) if static_dir else STATIC_DIR,
    )
