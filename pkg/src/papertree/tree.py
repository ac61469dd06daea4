"""Section tree: construction from blocks, queries, and view projection.

The tree is the structural backbone of the reader.  Headings open nested
sections, content blocks attach to the innermost open section, and a
synthetic root titled with the document title wraps everything, so the root
summary doubles as the whole-paper summary.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterator, Mapping

from .errors import EmptyTree, NotASection, UnknownNode
from .ingest import FIGURE, HEADING, PARAGRAPH, RawDocument, REFERENCE, TABLE

if TYPE_CHECKING:
    from .summarize import NodeSummary

SECTION = "section"


@dataclass(frozen=True)
class DocNode:
    id: str
    kind: str
    title: str | None = None
    text: str | None = None
    caption: str | None = None
    children: tuple[str, ...] = ()
    order_index: int = 0


@dataclass(frozen=True)
class SectionTree:
    root_id: str
    nodes: dict[str, DocNode]  # insertion order is pre-order
    abstract_text: str


@dataclass(frozen=True)
class Card:
    child_id: str
    kind: str
    display_title: str
    key_points: tuple = ()
    can_descend: bool = False


@dataclass(frozen=True)
class SourceEntry:
    node_id: str
    title: str
    points: tuple[str, ...] = ()


@dataclass(frozen=True)
class NodeView:
    node_id: str
    breadcrumb: tuple[tuple[str, str], ...]
    cards: tuple[Card, ...]
    parent_id: str | None
    figures: tuple[str, ...]
    source_panel: tuple[SourceEntry, ...] | str


@dataclass(frozen=True)
class Violation:
    node_id: str
    rule: str


def node_id_for(kind: str, key_text: str, path: tuple[int, ...]) -> str:
    """Stable id: content hash of kind, display text, and sibling path."""
    payload = json.dumps([kind, key_text, list(path)], ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def display_text(node: DocNode) -> str:
    if node.kind == SECTION:
        return node.title or ""
    if node.kind == PARAGRAPH:
        return node.text or ""
    return node.caption or ""


def build_tree(doc: RawDocument) -> SectionTree:
    """Nest blocks under headings; reference entries never enter the tree.

    A leading level-1 heading that repeats the document title is absorbed
    into the synthetic root instead of double-wrapping the whole tree.
    """
    blocks = [b for b in doc.blocks if b.kind != REFERENCE]
    if not blocks:
        raise EmptyTree("no summarizable blocks")
    if (
        blocks[0].kind == HEADING
        and blocks[0].level == 1
        and blocks[0].text.casefold() == doc.title.casefold()
    ):
        blocks = blocks[1:]
        if not blocks:
            raise EmptyTree("no summarizable blocks")

    root = {"kind": SECTION, "title": doc.title, "path": (), "children": []}
    stack: list[tuple[int, dict]] = [(0, root)]
    for block in blocks:
        if block.kind == HEADING:
            while len(stack) > 1 and stack[-1][0] >= block.level:
                stack.pop()
            parent = stack[-1][1]
            node = {
                "kind": SECTION,
                "title": block.text,
                "path": parent["path"] + (len(parent["children"]),),
                "children": [],
            }
            parent["children"].append(node)
            stack.append((block.level, node))
        else:
            parent = stack[-1][1]
            node = {
                "kind": block.kind,
                "path": parent["path"] + (len(parent["children"]),),
                "children": [],
            }
            if block.kind == PARAGRAPH:
                node["text"] = block.text
            else:
                node["caption"] = block.caption or block.text
            parent["children"].append(node)

    nodes: dict[str, DocNode] = {}

    def freeze(raw: dict) -> str:
        key = raw.get("title") or raw.get("text") or raw.get("caption") or ""
        nid = node_id_for(raw["kind"], key, raw["path"])
        order = raw["path"][-1] if raw["path"] else 0
        # reserve the dict slot before recursing so insertion order is pre-order
        nodes[nid] = DocNode(id=nid, kind=raw["kind"], order_index=order)
        child_ids = tuple(freeze(c) for c in raw["children"])
        nodes[nid] = DocNode(
            id=nid,
            kind=raw["kind"],
            title=raw.get("title"),
            text=raw.get("text"),
            caption=raw.get("caption"),
            children=child_ids,
            order_index=order,
        )
        return nid

    root_id = freeze(root)
    return SectionTree(root_id=root_id, nodes=nodes, abstract_text=doc.abstract_text)


def iter_preorder(tree: SectionTree, start: str | None = None) -> Iterator[DocNode]:
    start_id = tree.root_id if start is None else start
    if start_id not in tree.nodes:
        raise UnknownNode(start_id)
    todo = [start_id]
    while todo:
        node = tree.nodes[todo.pop()]
        yield node
        todo.extend(reversed(node.children))


def parent_map(tree: SectionTree) -> dict[str, str]:
    parents: dict[str, str] = {}
    for node in tree.nodes.values():
        for child in node.children:
            parents[child] = node.id
    return parents


def path_to_root(tree: SectionTree, node_id: str) -> list[str]:
    """Ids from root down to ``node_id`` inclusive."""
    parents = parent_map(tree)
    chain = [node_id]
    seen = {node_id}
    while chain[-1] in parents:
        nxt = parents[chain[-1]]
        if nxt in seen:
            break
        chain.append(nxt)
        seen.add(nxt)
    chain.reverse()
    return chain


def subtree_figures(tree: SectionTree, node_id: str) -> list[str]:
    """All figure node ids in the subtree, document order, self included."""
    if node_id not in tree.nodes:
        raise UnknownNode(node_id)
    return [n.id for n in iter_preorder(tree, node_id) if n.kind == FIGURE]


def is_summarizable(tree: SectionTree, node_id: str) -> bool:
    """Paragraphs with text, and sections whose digest would be non-empty.

    Empty sections are navigation-only: they are never summarized and
    contribute nothing to their parent's digest.
    """
    node = tree.nodes[node_id]
    if node.kind == PARAGRAPH:
        return bool(node.text)
    if node.kind != SECTION:
        return False
    for child_id in node.children:
        child = tree.nodes[child_id]
        if child.kind in (FIGURE, TABLE) and child.caption:
            return True
        if is_summarizable(tree, child_id):
            return True
    return False


def _can_descend(tree: SectionTree, node: DocNode) -> bool:
    return node.kind == SECTION and len(node.children) > 0


def _breadcrumb(tree: SectionTree, node_id: str) -> tuple[tuple[str, str], ...]:
    crumbs = []
    for nid in path_to_root(tree, node_id):
        node = tree.nodes[nid]
        label = node.title if node.kind == SECTION else display_text(node)
        crumbs.append((nid, label or ""))
    return tuple(crumbs)


def node_view(
    tree: SectionTree,
    summaries: Mapping[str, "NodeSummary"],
    node_id: str,
) -> NodeView:
    """Project a section into its card list plus contextual panel."""
    if node_id not in tree.nodes:
        raise UnknownNode(node_id)
    node = tree.nodes[node_id]
    if node.kind != SECTION:
        raise NotASection(node_id)
    parents = parent_map(tree)
    cards = []
    panel = []
    for child_id in node.children:
        child = tree.nodes[child_id]
        summary = summaries.get(child_id)
        points = summary.points if summary is not None else ()
        if child.kind == SECTION:
            title = child.title or ""
        elif child.kind == PARAGRAPH:
            title = "¶"
        else:
            title = child.caption or ""
        cards.append(
            Card(
                child_id=child_id,
                kind=child.kind,
                display_title=title,
                key_points=tuple(points),
                can_descend=_can_descend(tree, child),
            )
        )
        panel.append(
            SourceEntry(
                node_id=child_id,
                title=title,
                points=tuple(p.point_text for p in points),
            )
        )
    return NodeView(
        node_id=node_id,
        breadcrumb=_breadcrumb(tree, node_id),
        cards=tuple(cards),
        parent_id=parents.get(node_id),
        figures=tuple(subtree_figures(tree, node_id)),
        source_panel=tuple(panel),
    )


def leaf_view(
    tree: SectionTree,
    summaries: Mapping[str, "NodeSummary"],
    node_id: str,
) -> NodeView:
    """Contextual projection of a leaf: original text, enclosing figures."""
    if node_id not in tree.nodes:
        raise UnknownNode(node_id)
    node = tree.nodes[node_id]
    if node.kind == SECTION:
        return node_view(tree, summaries, node_id)
    parents = parent_map(tree)
    parent_id = parents.get(node_id)
    figure_scope = parent_id if parent_id is not None else node_id
    return NodeView(
        node_id=node_id,
        breadcrumb=_breadcrumb(tree, node_id),
        cards=(),
        parent_id=parent_id,
        figures=tuple(subtree_figures(tree, figure_scope)),
        source_panel=display_text(node),
    )


def validate_tree(tree: SectionTree) -> list[Violation]:
    """Structural invariant report; violations are data, not exceptions."""
    violations: list[Violation] = []
    if tree.root_id not in tree.nodes:
        violations.append(Violation(tree.root_id, "missing-root"))
        return violations
    if tree.nodes[tree.root_id].kind != SECTION:
        violations.append(Violation(tree.root_id, "root-not-section"))

    parent_counts: dict[str, int] = {nid: 0 for nid in tree.nodes}
    for nid, node in tree.nodes.items():
        if node.id != nid:
            violations.append(Violation(nid, "id-mismatch"))
        if node.kind != SECTION and node.children:
            violations.append(Violation(node.id, "leaf-with-children"))
        last_order = None
        for child_id in node.children:
            if child_id not in tree.nodes:
                violations.append(Violation(node.id, f"dangling-child:{child_id}"))
                continue
            parent_counts[child_id] += 1
            order = tree.nodes[child_id].order_index
            if last_order is not None and order <= last_order:
                violations.append(Violation(node.id, "order-not-increasing"))
            last_order = order
    for nid, count in parent_counts.items():
        if nid == tree.root_id:
            if count != 0:
                violations.append(Violation(nid, "root-has-parent"))
        elif count == 0:
            violations.append(Violation(nid, "unreachable"))
        elif count > 1:
            violations.append(Violation(nid, "multiple-parents"))

    # cycle guard: walk from root with a visited set
    visited: set[str] = set()
    todo = [tree.root_id]
    while todo:
        nid = todo.pop()
        if nid in visited:
            violations.append(Violation(nid, "cycle"))
            continue
        visited.add(nid)
        node = tree.nodes.get(nid)
        if node is None:
            continue
        todo.extend(c for c in node.children if c in tree.nodes)
    return violations
