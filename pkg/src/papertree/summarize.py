"""Bottom-up key-point summarization over a section tree.

Every summarizable node gets 2-5 key points with evidence anchored to its
own source text.  Leaves are summarized from their paragraph text; sections
from a digest of their children's key points (figure and table children
contribute captions), so input size stays bounded at every level.  The
result is total: nodes whose backend calls fail end up with a degraded
single-point summary rather than a hole.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Mapping, Protocol

from .anchor import DEFAULT_THRESHOLD, Anchor, anchor_evidence
from .errors import (
    BackendUnavailable,
    ContentTooShort,
    InvalidDocument,
    MalformedResponse,
    MissingChildSummary,
    MissingField,
    RetryNeeded,
)
from .ingest import FIGURE, PARAGRAPH, TABLE
from .prompts import TEMPLATE_VERSION
from .textnorm import first_sentence, word_count
from .tree import SECTION, DocNode, SectionTree, is_summarizable, validate_tree

ROLE_LEAF = "leaf"
ROLE_SECTION = "section"

STATUS_OK = "ok"
STATUS_OVER_BUDGET = "over_budget"
STATUS_REPAIRED = "point_count_repaired"
STATUS_DEGRADED = "degraded"

MIN_POINTS = 2
MAX_POINTS = 5
WORD_BUDGET = 70


@dataclass(frozen=True)
class KeyPoint:
    point_text: str
    evidence_text: str
    anchor: Anchor | None = None


@dataclass(frozen=True)
class NodeSummary:
    node_id: str
    points: tuple[KeyPoint, ...]
    total_word_count: int
    backend_id: str
    status: str


@dataclass(frozen=True)
class SummaryRequest:
    role: str
    abstract_text: str
    content: str
    node_title: str | None = None


class Backend(Protocol):
    backend_id: str

    def complete(self, request: SummaryRequest) -> str: ...


class Cache(Protocol):
    def get(self, key: str) -> NodeSummary | None: ...

    def put(self, key: str, summary: NodeSummary) -> None: ...


def parse_backend_response(raw: str) -> list[KeyPoint]:
    """Extract point/evidence pairs from a backend reply.

    The reply may wrap the JSON object in prose or code fences; the first
    balanced object that parses wins.
    """
    decoder = json.JSONDecoder()
    obj = None
    idx = raw.find("{")
    while idx != -1:
        try:
            candidate, _ = decoder.raw_decode(raw[idx:])
        except ValueError:
            idx = raw.find("{", idx + 1)
            continue
        if isinstance(candidate, dict):
            obj = candidate
            break
        idx = raw.find("{", idx + 1)
    if obj is None:
        raise MalformedResponse("no parsable JSON object in response")
    points_raw = obj.get("points")
    if not isinstance(points_raw, list):
        raise MalformedResponse('response object lacks a "points" list')
    points: list[KeyPoint] = []
    for i, item in enumerate(points_raw):
        if not isinstance(item, dict):
            raise MissingField(f"points[{i}] is not an object")
        point = item.get("point")
        evidence = item.get("evidence")
        if not isinstance(point, str) or not point.strip():
            raise MissingField(f"points[{i}] lacks a point")
        if not isinstance(evidence, str) or not evidence.strip():
            raise MissingField(f"points[{i}] lacks an evidence")
        points.append(KeyPoint(point_text=point, evidence_text=evidence))
    return points


def total_words(points: list[KeyPoint] | tuple[KeyPoint, ...]) -> int:
    return sum(word_count(p.point_text) for p in points)


def validate_points(points: list[KeyPoint]) -> tuple[list[KeyPoint], str]:
    """Enforce the 2-5 point and 70-word contract.

    Over-long lists are truncated to five (point_count_repaired); lists
    under two raise RetryNeeded for the caller's single re-ask; word-budget
    overruns are kept and only flagged (over_budget) since truncation is a
    display decision.
    """
    if len(points) > MAX_POINTS:
        return points[:MAX_POINTS], STATUS_REPAIRED
    if len(points) < MIN_POINTS:
        raise RetryNeeded(f"{len(points)} points, need at least {MIN_POINTS}")
    if total_words(points) > WORD_BUDGET:
        return list(points), STATUS_OVER_BUDGET
    return list(points), STATUS_OK


def _request_points(backend: Backend, request: SummaryRequest) -> tuple[list[KeyPoint], str]:
    """Call the backend with the one-re-ask repair policy."""
    short_points: list[KeyPoint] | None = None
    last_error: Exception | None = None
    for _attempt in range(2):
        raw = backend.complete(request)
        try:
            parsed = parse_backend_response(raw)
        except (MalformedResponse, MissingField) as exc:
            last_error = exc
            continue
        try:
            return validate_points(parsed)
        except RetryNeeded:
            if parsed:
                short_points = parsed
            continue
    if short_points:
        return short_points, STATUS_DEGRADED
    raise last_error if last_error is not None else MalformedResponse("empty points")


def _anchored(
    points: list[KeyPoint], target: str, node_id: str, threshold: float
) -> tuple[KeyPoint, ...]:
    return tuple(
        replace(
            p,
            anchor=anchor_evidence(
                p.evidence_text, target, node_id=node_id, threshold=threshold
            ),
        )
        for p in points
    )


def summarize_leaf(
    node: DocNode,
    abstract: str,
    backend: Backend,
    *,
    threshold: float = DEFAULT_THRESHOLD,
) -> NodeSummary:
    """Summarize one paragraph node; evidence anchors against its text."""
    if node.kind != PARAGRAPH or not node.text:
        raise ValueError(f"node {node.id} is not a non-empty paragraph")
    request = SummaryRequest(
        role=ROLE_LEAF, abstract_text=abstract, content=node.text
    )
    points, status = _request_points(backend, request)
    return NodeSummary(
        node_id=node.id,
        points=_anchored(points, node.text, node.id, threshold),
        total_word_count=total_words(points),
        backend_id=backend.backend_id,
        status=status,
    )


def section_digest(
    tree: SectionTree, node: DocNode, summaries: Mapping[str, NodeSummary]
) -> str:
    """Serialized child digest: titles (or pilcrows) with bulleted points,
    captions for figure and table children.  Empty sections are skipped."""
    lines: list[str] = []
    for child_id in node.children:
        child = tree.nodes[child_id]
        if child.kind in (FIGURE, TABLE):
            if child.caption:
                lines.append(child.caption)
            continue
        if child.kind == SECTION and not is_summarizable(tree, child_id):
            continue
        if child.kind == SECTION:
            lines.append(child.title or "¶")
        else:
            lines.append("¶")
        summary = summaries.get(child_id)
        if summary is not None:
            lines.extend(f"- {p.point_text}" for p in summary.points)
    return "\n".join(lines)


def summarize_section(
    tree: SectionTree,
    node: DocNode,
    summaries: Mapping[str, NodeSummary],
    abstract: str,
    backend: Backend,
    *,
    threshold: float = DEFAULT_THRESHOLD,
) -> NodeSummary:
    """Summarize a section from its children's digests, never its full text."""
    if node.kind != SECTION:
        raise ValueError(f"node {node.id} is not a section")
    for child_id in node.children:
        if is_summarizable(tree, child_id) and child_id not in summaries:
            raise MissingChildSummary(child_id)
    digest = section_digest(tree, node, summaries)
    request = SummaryRequest(
        role=ROLE_SECTION,
        abstract_text=abstract,
        content=digest,
        node_title=node.title,
    )
    points, status = _request_points(backend, request)
    return NodeSummary(
        node_id=node.id,
        points=_anchored(points, digest, node.id, threshold),
        total_word_count=total_words(points),
        backend_id=backend.backend_id,
        status=status,
    )


def anchor_target_text(
    tree: SectionTree, node_id: str, summaries: Mapping[str, NodeSummary]
) -> str:
    """The text a node's evidence anchors into."""
    node = tree.nodes[node_id]
    if node.kind == PARAGRAPH:
        return node.text or ""
    if node.kind == SECTION:
        return section_digest(tree, node, summaries)
    return node.caption or ""


def summary_cache_key(
    template_version: str, backend_id: str, role: str, abstract: str, content: str
) -> str:
    """Cache key: digest of (template version, backend, role, content digest)."""
    content_digest = hashlib.sha256(
        f"{abstract}\x1f{content}".encode("utf-8")
    ).hexdigest()
    material = "\x1f".join([template_version, backend_id, role, content_digest])
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


def postorder_ids(tree: SectionTree) -> list[str]:
    out: list[str] = []
    stack: list[tuple[str, bool]] = [(tree.root_id, False)]
    while stack:
        nid, expanded = stack.pop()
        if expanded:
            out.append(nid)
            continue
        stack.append((nid, True))
        for child in reversed(tree.nodes[nid].children):
            stack.append((child, False))
    return out


def _degraded_fallback(
    node: DocNode, content: str, backend_id: str, threshold: float
) -> NodeSummary:
    sentence = first_sentence(content) or (node.title or "").strip()
    anchor = None
    if sentence and content:
        anchor = anchor_evidence(
            sentence, content, node_id=node.id, threshold=threshold
        )
    point = KeyPoint(point_text=sentence, evidence_text=sentence, anchor=anchor)
    return NodeSummary(
        node_id=node.id,
        points=(point,),
        total_word_count=word_count(sentence),
        backend_id=backend_id,
        status=STATUS_DEGRADED,
    )


def _summarize_node(
    tree: SectionTree,
    node: DocNode,
    summaries: Mapping[str, NodeSummary],
    backend: Backend,
    cache: Cache | None,
    threshold: float,
    on_node_error: Callable[[str, Exception], None] | None,
) -> NodeSummary:
    role = ROLE_LEAF if node.kind == PARAGRAPH else ROLE_SECTION
    content = (
        node.text or ""
        if node.kind == PARAGRAPH
        else section_digest(tree, node, summaries)
    )
    key = summary_cache_key(
        TEMPLATE_VERSION, backend.backend_id, role, tree.abstract_text, content
    )
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return replace(hit, node_id=node.id)
    try:
        if node.kind == PARAGRAPH:
            summary = summarize_leaf(
                node, tree.abstract_text, backend, threshold=threshold
            )
        else:
            summary = summarize_section(
                tree, node, summaries, tree.abstract_text, backend,
                threshold=threshold,
            )
    except (BackendUnavailable, MalformedResponse, MissingField, ContentTooShort) as exc:
        if on_node_error is not None:
            on_node_error(node.id, exc)
        # transient failures are not cached, so a later run can recover
        return _degraded_fallback(node, content, backend.backend_id, threshold)
    if cache is not None:
        cache.put(key, summary)
    return summary


def resummarize_nodes(
    tree: SectionTree,
    node_ids: set[str],
    summaries: Mapping[str, NodeSummary],
    backend: Backend,
    cache: Cache | None = None,
    *,
    threshold: float = DEFAULT_THRESHOLD,
    on_node_error: Callable[[str, Exception], None] | None = None,
) -> dict[str, NodeSummary]:
    """Recompute the given nodes bottom-up, reusing all other summaries."""
    updated = dict(summaries)
    for nid in postorder_ids(tree):
        if nid in node_ids and is_summarizable(tree, nid):
            updated[nid] = _summarize_node(
                tree, tree.nodes[nid], updated, backend, cache,
                threshold, on_node_error,
            )
    return updated


def summarize_tree(
    tree: SectionTree,
    backend: Backend,
    cache: Cache | None = None,
    *,
    threshold: float = DEFAULT_THRESHOLD,
    max_workers: int = 1,
    on_node_error: Callable[[str, Exception], None] | None = None,
) -> dict[str, NodeSummary]:
    """Summarize every summarizable node, children strictly before parents.

    The returned map is total over summarizable nodes; failed nodes carry a
    degraded single-point summary.  The root entry is the whole-paper
    summary.
    """
    violations = validate_tree(tree)
    if violations:
        raise InvalidDocument(f"tree invalid: {violations[:3]}")
    order = [nid for nid in postorder_ids(tree) if is_summarizable(tree, nid)]
    summaries: dict[str, NodeSummary] = {}

    if max_workers <= 1:
        for nid in order:
            summaries[nid] = _summarize_node(
                tree, tree.nodes[nid], summaries, backend, cache,
                threshold, on_node_error,
            )
        return summaries

    # wave scheduling: a node's wave is strictly above all its children's,
    # so ancestor/descendant pairs never run concurrently
    heights: dict[str, int] = {}
    for nid in order:
        node = tree.nodes[nid]
        child_heights = [heights[c] for c in node.children if c in heights]
        heights[nid] = (max(child_heights) + 1) if child_heights else 0
    waves: dict[int, list[str]] = {}
    for nid in order:
        waves.setdefault(heights[nid], []).append(nid)
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        for height in sorted(waves):
            wave = waves[height]
            results = pool.map(
                lambda nid: _summarize_node(
                    tree, tree.nodes[nid], summaries, backend, cache,
                    threshold, on_node_error,
                ),
                wave,
            )
            for nid, summary in zip(wave, results):
                summaries[nid] = summary
    return summaries
