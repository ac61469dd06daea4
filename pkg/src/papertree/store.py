"""Persistence: canonical document files and the summary cache.

One self-contained JSON file per paper holds the tree plus its summaries.
Serialization is canonical (sorted keys, no insignificant whitespace), so
equal documents are byte-identical on disk.  Writers go through a
temp-file-plus-rename so concurrent readers never observe a torn file.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .anchor import Anchor
from .errors import CorruptDocument, InvalidDocument, SchemaVersionMismatch
from .summarize import KeyPoint, NodeSummary
from .tree import DocNode, SectionTree, validate_tree

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SourceInfo:
    format: str
    content_digest: str


@dataclass(frozen=True)
class TreeDocument:
    schema_version: int
    source: SourceInfo
    title: str
    abstract_text: str
    nodes: tuple[DocNode, ...]  # pre-order, root first
    summaries: tuple[NodeSummary, ...]
    created_at: str
    template_version: str
    backend_id: str


def tree_of(doc: TreeDocument) -> SectionTree:
    nodes = {node.id: node for node in doc.nodes}
    root_id = doc.nodes[0].id if doc.nodes else ""
    return SectionTree(
        root_id=root_id, nodes=nodes, abstract_text=doc.abstract_text
    )


def summary_map(doc: TreeDocument) -> dict[str, NodeSummary]:
    return {s.node_id: s for s in doc.summaries}


# -- json mapping ----------------------------------------------------------


def _anchor_to_dict(anchor: Anchor | None) -> dict | None:
    if anchor is None:
        return None
    return {
        "target_node_id": anchor.target_node_id,
        "char_start": anchor.char_start,
        "char_end": anchor.char_end,
        "match_kind": anchor.match_kind,
        "similarity": anchor.similarity,
    }


def _anchor_from_dict(data: dict | None) -> Anchor | None:
    if data is None:
        return None
    return Anchor(
        target_node_id=data["target_node_id"],
        char_start=data["char_start"],
        char_end=data["char_end"],
        match_kind=data["match_kind"],
        similarity=data["similarity"],
    )


def _summary_to_dict(summary: NodeSummary) -> dict:
    return {
        "node_id": summary.node_id,
        "points": [
            {
                "point_text": p.point_text,
                "evidence_text": p.evidence_text,
                "anchor": _anchor_to_dict(p.anchor),
            }
            for p in summary.points
        ],
        "total_word_count": summary.total_word_count,
        "backend_id": summary.backend_id,
        "status": summary.status,
    }


def _summary_from_dict(data: dict) -> NodeSummary:
    return NodeSummary(
        node_id=data["node_id"],
        points=tuple(
            KeyPoint(
                point_text=p["point_text"],
                evidence_text=p["evidence_text"],
                anchor=_anchor_from_dict(p.get("anchor")),
            )
            for p in data["points"]
        ),
        total_word_count=data["total_word_count"],
        backend_id=data["backend_id"],
        status=data["status"],
    )


def _node_to_dict(node: DocNode) -> dict:
    return {
        "id": node.id,
        "kind": node.kind,
        "title": node.title,
        "text": node.text,
        "caption": node.caption,
        "children": list(node.children),
        "order_index": node.order_index,
    }


def _node_from_dict(data: dict) -> DocNode:
    return DocNode(
        id=data["id"],
        kind=data["kind"],
        title=data.get("title"),
        text=data.get("text"),
        caption=data.get("caption"),
        children=tuple(data["children"]),
        order_index=data["order_index"],
    )


def document_to_dict(doc: TreeDocument) -> dict:
    return {
        "schema_version": doc.schema_version,
        "source": {
            "format": doc.source.format,
            "content_digest": doc.source.content_digest,
        },
        "title": doc.title,
        "abstract_text": doc.abstract_text,
        "nodes": [_node_to_dict(n) for n in doc.nodes],
        "summaries": [_summary_to_dict(s) for s in doc.summaries],
        "created_at": doc.created_at,
        "template_version": doc.template_version,
        "backend_id": doc.backend_id,
    }


def document_from_dict(data: dict) -> TreeDocument:
    return TreeDocument(
        schema_version=data["schema_version"],
        source=SourceInfo(
            format=data["source"]["format"],
            content_digest=data["source"]["content_digest"],
        ),
        title=data["title"],
        abstract_text=data["abstract_text"],
        nodes=tuple(_node_from_dict(n) for n in data["nodes"]),
        summaries=tuple(_summary_from_dict(s) for s in data["summaries"]),
        created_at=data["created_at"],
        template_version=data["template_version"],
        backend_id=data["backend_id"],
    )


def canonical_bytes(data: dict) -> bytes:
    text = json.dumps(data, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return (text + "\n").encode("utf-8")


def _atomic_write(path: Path, payload: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


# -- document files --------------------------------------------------------


def save_tree(doc: TreeDocument, path: str | Path) -> None:
    """Write the canonical form; equal documents give byte-identical files."""
    violations = validate_tree(tree_of(doc))
    if violations:
        raise InvalidDocument(
            "; ".join(f"{v.node_id}:{v.rule}" for v in violations[:5])
        )
    _atomic_write(Path(path), canonical_bytes(document_to_dict(doc)))


def load_tree(path: str | Path) -> TreeDocument:
    raw = Path(path).read_bytes()
    try:
        data = json.loads(raw.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise CorruptDocument(f"unparsable document file: {exc}") from exc
    if not isinstance(data, dict):
        raise CorruptDocument("document file is not an object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"schema_version {version!r}, expected {SCHEMA_VERSION}"
        )
    try:
        doc = document_from_dict(data)
    except (KeyError, TypeError) as exc:
        raise CorruptDocument(f"missing or mistyped field: {exc}") from exc
    violations = validate_tree(tree_of(doc))
    if violations:
        raise CorruptDocument(
            "invariant failure: "
            + "; ".join(f"{v.node_id}:{v.rule}" for v in violations[:5])
        )
    return doc


# -- summary cache ---------------------------------------------------------


class MemoryCache:
    """Dict-backed cache for single-process runs and tests."""

    def __init__(self) -> None:
        self._entries: dict[str, NodeSummary] = {}

    def get(self, key: str) -> NodeSummary | None:
        return self._entries.get(key)

    def put(self, key: str, summary: NodeSummary) -> None:
        self._entries[key] = summary

    def __len__(self) -> int:
        return len(self._entries)


class SummaryCache:
    """Content-addressed file cache: ``<digest[:2]>/<digest>``.

    Writes are atomic; identical keys always carry identical values, so
    last-writer-wins is safe under concurrency.
    """

    def __init__(self, base_dir: str | Path) -> None:
        self.base_dir = Path(base_dir)
        self.base_dir.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.base_dir / key[:2] / key

    def get(self, key: str) -> NodeSummary | None:
        path = self._path(key)
        try:
            raw = path.read_bytes()
        except FileNotFoundError:
            return None
        try:
            return _summary_from_dict(json.loads(raw.decode("utf-8")))
        except (ValueError, KeyError, TypeError):
            return None  # treat damaged entries as misses

    def put(self, key: str, summary: NodeSummary) -> None:
        _atomic_write(self._path(key), canonical_bytes(_summary_to_dict(summary)))

    def delete(self, key: str) -> None:
        try:
            self._path(key).unlink()
        except FileNotFoundError:
            pass


def build_tree_document(
    tree: SectionTree,
    summaries: dict[str, NodeSummary],
    *,
    source_format: str,
    content_digest: str,
    title: str,
    backend_id: str,
    template_version: str,
    created_at: str = "",
) -> TreeDocument:
    """Assemble the persistent document; summaries follow pre-order."""
    ordered_nodes = tuple(tree.nodes[nid] for nid in tree.nodes)
    ordered_summaries = tuple(
        summaries[node.id] for node in ordered_nodes if node.id in summaries
    )
    return TreeDocument(
        schema_version=SCHEMA_VERSION,
        source=SourceInfo(format=source_format, content_digest=content_digest),
        title=title,
        abstract_text=tree.abstract_text,
        nodes=ordered_nodes,
        summaries=ordered_summaries,
        created_at=created_at,
        template_version=template_version,
        backend_id=backend_id,
    )
