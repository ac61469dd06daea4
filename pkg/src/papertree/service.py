"""HTTP service: ingestion, views, evidence, and re-summarization.

Documents are content-addressed by source digest, so ingestion is
idempotent.  Summarization runs in a background thread per document (one
active job per doc id); views return 409 while a job is running so clients
can poll.  All reads go through the store's atomic files.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import Body, FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .backends import BackendRegistry, HttpChatBackend
from .errors import PaperTreeError, UnknownNode
from .ingest import PARAGRAPH, parse_html, parse_markdown, source_digest
from .prompts import TEMPLATE_VERSION
from .store import (
    SummaryCache,
    TreeDocument,
    build_tree_document,
    load_tree,
    save_tree,
    summary_map,
    tree_of,
)
from .summarize import (
    ROLE_LEAF,
    ROLE_SECTION,
    STATUS_DEGRADED,
    NodeSummary,
    anchor_target_text,
    resummarize_nodes,
    summarize_tree,
    summary_cache_key,
)
from .textnorm import split_sentences
from .tree import (
    SECTION,
    SectionTree,
    build_tree,
    is_summarizable,
    iter_preorder,
    leaf_view,
    path_to_root,
)

STATUS_INGESTED = "ingested"
STATUS_SUMMARIZING = "summarizing"
STATUS_READY = "ready"
STATUS_PARTIALLY_DEGRADED = "partially_degraded"


@dataclass
class ServiceConfig:
    data_dir: str = "papertree_data"
    max_source_bytes: int = 5_000_000
    fuzzy_threshold: float = 0.85
    default_backend: str = "extractive"
    backends: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path: str | Path) -> "ServiceConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            data_dir=data.get("data_dir", "papertree_data"),
            max_source_bytes=int(data.get("max_source_bytes", 5_000_000)),
            fuzzy_threshold=float(data.get("fuzzy_threshold", 0.85)),
            default_backend=data.get("default_backend", "extractive"),
            backends=data.get("backends", {}),
        )


def _error(status_code: int, name: str, detail: str = "") -> JSONResponse:
    return JSONResponse(
        status_code=status_code, content={"error": name, "detail": detail}
    )


def _serialize_anchor(anchor) -> dict | None:
    if anchor is None:
        return None
    return {
        "target_node_id": anchor.target_node_id,
        "char_start": anchor.char_start,
        "char_end": anchor.char_end,
        "match_kind": anchor.match_kind,
        "similarity": anchor.similarity,
    }


def _serialize_points(points) -> list[dict]:
    return [
        {
            "point_text": p.point_text,
            "evidence_text": p.evidence_text,
            "anchor": _serialize_anchor(p.anchor),
        }
        for p in points
    ]


def _serialize_view(view) -> dict:
    if isinstance(view.source_panel, str):
        panel: dict = {"kind": "text", "text": view.source_panel}
    else:
        panel = {
            "kind": "children",
            "entries": [
                {"node_id": e.node_id, "title": e.title, "points": list(e.points)}
                for e in view.source_panel
            ],
        }
    return {
        "node_id": view.node_id,
        "breadcrumb": [{"id": i, "title": t} for i, t in view.breadcrumb],
        "cards": [
            {
                "child_id": c.child_id,
                "kind": c.kind,
                "display_title": c.display_title,
                "key_points": _serialize_points(c.key_points),
                "can_descend": c.can_descend,
            }
            for c in view.cards
        ],
        "parent_id": view.parent_id,
        "contextual": {"figures": list(view.figures), "source_panel": panel},
    }


def _nav_node(tree: SectionTree, node_id: str) -> dict:
    node = tree.nodes[node_id]
    if node.kind == SECTION:
        title = node.title or ""
    elif node.kind == PARAGRAPH:
        title = "¶"
    else:
        title = node.caption or ""
    return {
        "id": node.id,
        "kind": node.kind,
        "title": title,
        "children": [_nav_node(tree, c) for c in node.children],
    }


def _excerpt(target: str, anchor) -> str:
    """Anchored span plus one sentence of context on each side."""
    if not target:
        return ""
    spans = split_sentences(target)
    if not spans:
        return target
    start = anchor.char_start if anchor is not None else 0
    end = anchor.char_end if anchor is not None else 0
    first = len(spans) - 1
    for i, (_, e) in enumerate(spans):
        if e > start:
            first = i
            break
    last = first
    for i, (s, _) in enumerate(spans):
        if i > first and s < end:
            last = i
    lo = spans[max(0, first - 1)][0]
    hi = spans[min(len(spans) - 1, last + 1)][1]
    return target[lo:hi]


class DocumentService:
    """State and operations behind the HTTP endpoints."""

    def __init__(
        self, config: ServiceConfig, registry: BackendRegistry | None = None
    ) -> None:
        self.config = config
        self.registry = registry or BackendRegistry.from_config(config.backends)
        self.data_dir = Path(config.data_dir)
        self.docs_dir = self.data_dir / "docs"
        self.docs_dir.mkdir(parents=True, exist_ok=True)
        self.cache = SummaryCache(self.data_dir / "cache")
        self._jobs: dict[str, threading.Thread] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _doc_path(self, doc_id: str) -> Path:
        return self.docs_dir / f"{doc_id}.json"

    def _doc_lock(self, doc_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(doc_id, threading.Lock())

    def is_summarizing(self, doc_id: str) -> bool:
        job = self._jobs.get(doc_id)
        return job is not None and job.is_alive()

    def load(self, doc_id: str) -> TreeDocument | None:
        path = self._doc_path(doc_id)
        if not path.exists():
            return None
        return load_tree(path)

    def handle_of(self, doc_id: str, doc: TreeDocument) -> dict:
        if self.is_summarizing(doc_id):
            status = STATUS_SUMMARIZING
        elif not doc.summaries:
            status = STATUS_INGESTED
        elif any(s.status == STATUS_DEGRADED for s in doc.summaries):
            status = STATUS_PARTIALLY_DEGRADED
        else:
            status = STATUS_READY
        return {
            "doc_id": doc_id,
            "title": doc.title,
            "node_count": len(doc.nodes),
            "summarized": bool(doc.summaries),
            "status": status,
        }

    def ingest(self, source: str, format: str) -> dict:
        doc_id = source_digest(source)
        with self._doc_lock(doc_id):
            existing = self.load(doc_id)
            if existing is not None:
                return self.handle_of(doc_id, existing)
            raw = parse_html(source) if format == "html" else parse_markdown(source)
            tree = build_tree(raw)
            doc = build_tree_document(
                tree,
                {},
                source_format=format,
                content_digest=doc_id,
                title=raw.title,
                backend_id="",
                template_version=TEMPLATE_VERSION,
                created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            )
            save_tree(doc, self._doc_path(doc_id))
        self.start_job(doc_id, self.config.default_backend, node_ids=None)
        doc = self.load(doc_id)
        assert doc is not None
        return self.handle_of(doc_id, doc)

    def start_job(
        self, doc_id: str, backend_id: str, node_ids: set[str] | None
    ) -> bool:
        """Spawn the per-document summarization job; one active per doc."""
        if self.is_summarizing(doc_id):
            return False
        thread = threading.Thread(
            target=self._run_job, args=(doc_id, backend_id, node_ids), daemon=True
        )
        self._jobs[doc_id] = thread
        thread.start()
        return True

    def _run_job(
        self, doc_id: str, backend_id: str, node_ids: set[str] | None
    ) -> None:
        backend = self.registry.get(backend_id)
        if backend is None:
            return
        with self._doc_lock(doc_id):
            doc = self.load(doc_id)
            if doc is None:
                return
            tree = tree_of(doc)
            if node_ids is None:
                summaries = summarize_tree(
                    tree, backend, self.cache,
                    threshold=self.config.fuzzy_threshold,
                )
            else:
                summaries = resummarize_nodes(
                    tree, node_ids, summary_map(doc), backend, self.cache,
                    threshold=self.config.fuzzy_threshold,
                )
            updated = build_tree_document(
                tree,
                summaries,
                source_format=doc.source.format,
                content_digest=doc.source.content_digest,
                title=doc.title,
                backend_id=backend.backend_id,
                template_version=TEMPLATE_VERSION,
                created_at=doc.created_at,
            )
            save_tree(updated, self._doc_path(doc_id))

    def wait_for_job(self, doc_id: str, timeout: float | None = None) -> None:
        job = self._jobs.get(doc_id)
        if job is not None:
            job.join(timeout)

    def requeue_set(self, tree: SectionTree, node_id: str) -> list[str]:
        """Subtree plus ancestor chain, listed in pre-order position."""
        affected = {n.id for n in iter_preorder(tree, node_id)}
        affected.update(path_to_root(tree, node_id))
        return [nid for nid in tree.nodes if nid in affected]

    def invalidate_cache(
        self,
        tree: SectionTree,
        summaries: dict[str, NodeSummary],
        node_ids: list[str],
        backend_id: str,
    ) -> None:
        for nid in node_ids:
            if not is_summarizable(tree, nid):
                continue
            node = tree.nodes[nid]
            role = ROLE_LEAF if node.kind == PARAGRAPH else ROLE_SECTION
            content = anchor_target_text(tree, nid, summaries)
            self.cache.delete(
                summary_cache_key(
                    TEMPLATE_VERSION, backend_id, role, tree.abstract_text, content
                )
            )


def create_app(
    config: ServiceConfig | None = None,
    registry: BackendRegistry | None = None,
) -> FastAPI:
    config = config or ServiceConfig()
    service = DocumentService(config, registry)
    app = FastAPI(title="papertree")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.service = service

    @app.post("/documents")
    def ingest(payload: dict = Body(...)):
        source = payload.get("source", "")
        format = payload.get("format", "html")
        if format not in ("html", "markdown"):
            return _error(400, "UnsupportedFormat", f"unknown format {format!r}")
        if len(source.encode("utf-8")) > config.max_source_bytes:
            return _error(413, "SourceTooLarge")
        try:
            return service.ingest(source, format)
        except PaperTreeError as exc:
            return _error(400, type(exc).__name__, str(exc))

    @app.get("/documents/{doc_id}")
    def get_document(doc_id: str):
        doc = service.load(doc_id)
        if doc is None:
            return _error(404, "UnknownDocument", doc_id)
        return service.handle_of(doc_id, doc)

    @app.get("/documents/{doc_id}/tree")
    def get_tree(doc_id: str):
        doc = service.load(doc_id)
        if doc is None:
            return _error(404, "UnknownDocument", doc_id)
        tree = tree_of(doc)
        return {"doc_id": doc_id, "root": _nav_node(tree, tree.root_id)}

    @app.get("/documents/{doc_id}/view")
    def get_view(doc_id: str, node: str | None = None):
        doc = service.load(doc_id)
        if doc is None:
            return _error(404, "UnknownDocument", doc_id)
        if service.is_summarizing(doc_id):
            return _error(409, "Summarizing", "summaries not ready; poll the handle")
        tree = tree_of(doc)
        summaries = summary_map(doc)
        node_id = node or tree.root_id
        try:
            view = leaf_view(tree, summaries, node_id)
        except UnknownNode:
            return _error(404, "UnknownNode", node_id)
        return _serialize_view(view)

    @app.get("/documents/{doc_id}/nodes/{node_id}/evidence/{point_index}")
    def get_evidence(doc_id: str, node_id: str, point_index: int):
        doc = service.load(doc_id)
        if doc is None:
            return _error(404, "UnknownDocument", doc_id)
        tree = tree_of(doc)
        if node_id not in tree.nodes:
            return _error(404, "UnknownNode", node_id)
        summaries = summary_map(doc)
        summary = summaries.get(node_id)
        if summary is None:
            return _error(404, "NoSummary", node_id)
        if not 0 <= point_index < len(summary.points):
            return _error(416, "PointIndexOutOfRange", str(point_index))
        point = summary.points[point_index]
        target = anchor_target_text(tree, node_id, summaries)
        return {
            "evidence_text": point.evidence_text,
            "anchor": _serialize_anchor(point.anchor),
            "source_excerpt": _excerpt(target, point.anchor),
        }

    @app.post("/documents/{doc_id}/resummarize")
    def resummarize(doc_id: str, payload: dict = Body(default={})):
        doc = service.load(doc_id)
        if doc is None:
            return _error(404, "UnknownDocument", doc_id)
        backend_id = payload.get("backend_id") or config.default_backend
        backend = service.registry.get(backend_id)
        if backend is None:
            return _error(400, "UnknownBackend", backend_id)
        if isinstance(backend, HttpChatBackend) and not backend.available():
            return _error(503, "BackendUnavailable", f"{backend_id}: no credential")
        tree = tree_of(doc)
        node_id = payload.get("node_id") or tree.root_id
        if node_id not in tree.nodes:
            return _error(404, "UnknownNode", node_id)
        requeued = service.requeue_set(tree, node_id)
        service.invalidate_cache(tree, summary_map(doc), requeued, backend_id)
        started = service.start_job(doc_id, backend_id, set(requeued))
        state = "queued" if started else "already_running"
        return {"doc_id": doc_id, "state": state, "requeued": requeued}

    return app
