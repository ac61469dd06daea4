"""Independent reference implementations used to check the library.

Everything here is deliberately written from scratch against the documented
behavior, not by calling back into papertree internals: brute-force window
enumeration with a vectorized edit-distance DP, a heading-stack parent
derivation, exhaustive DFS filters, and the point-validation rule table.
"""

from __future__ import annotations

import math

import numpy as np


# -- edit distance / windows -------------------------------------------------


def prefix_distances(evidence: str, window: str) -> np.ndarray:
    """Levenshtein distance from ``evidence`` to every prefix of ``window``.

    Row-vectorized DP: the insertion chain along a row is folded into a
    running minimum of (base[j] - j).
    """
    n = len(window)
    w = np.array([ord(c) for c in window], dtype=np.int64)
    j_idx = np.arange(1, n + 1, dtype=np.int64)
    prev = np.arange(n + 1, dtype=np.int64)
    for i, ch in enumerate(evidence, 1):
        cost = (w != ord(ch)).astype(np.int64)
        base = np.minimum(prev[:-1] + cost, prev[1:] + 1)
        run = np.minimum(np.minimum.accumulate(base - j_idx), i)
        cur = np.empty(n + 1, dtype=np.int64)
        cur[0] = i
        cur[1:] = run + j_idx
        prev = cur
    return prev


def oracle_token_bounds(text: str) -> list[tuple[int, int]]:
    bounds = []
    start = None
    for i, ch in enumerate(text):
        if ch.isspace():
            if start is not None:
                bounds.append((start, i))
                start = None
        elif start is None:
            start = i
    if start is not None:
        bounds.append((start, len(text)))
    return bounds


def oracle_best_window(
    evidence: str, target: str, token_aligned: bool
) -> tuple[int, int, float]:
    """Exhaustive window enumeration; ties to earliest start then shortest.

    ``token_aligned=False`` enumerates every character start and length in
    bounds (the all-windows oracle); ``True`` restricts both edges to token
    boundaries, mirroring the library's candidate set.
    """
    m = len(evidence)
    if m == 0 or not target.strip():
        return (0, 0, 0.0)
    lo = max(1, math.floor(0.8 * m))
    hi = math.ceil(1.2 * m)
    if token_aligned:
        bounds = oracle_token_bounds(target)
        starts = [s for s, _ in bounds]
        end_set = {e for _, e in bounds}
    else:
        starts = list(range(len(target)))
        end_set = None
    best_sim, best_start, best_end = -1.0, 0, 0
    for s in starts:
        limit = min(len(target), s + hi)
        if limit - s < lo:
            continue
        dist = prefix_distances(evidence, target[s:limit])
        for length in range(lo, limit - s + 1):
            e = s + length
            if end_set is not None and e not in end_set:
                continue
            sim = 1.0 - dist[length] / max(m, length)
            if sim > best_sim:
                best_sim, best_start, best_end = sim, s, e
    if best_sim < 0:
        return (0, 0, 0.0)
    return (best_start, best_end, best_sim)


def oracle_levenshtein(a: str, b: str) -> int:
    """Plain quadratic DP, for spot checks of the vectorized version."""
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j - 1] + (ca != cb), prev[j] + 1, cur[-1] + 1))
        prev = cur
    return prev[-1]


# -- tree structure ----------------------------------------------------------


def oracle_parent_indices(blocks, title: str) -> tuple[list[int], list]:
    """Parent relation over non-reference blocks via a heading-level stack.

    Returns (parents, items): ``parents[i]`` is the index in ``items`` of
    block i's parent, or -1 for the synthetic root.  Mirrors the documented
    rule that a leading level-1 heading equal to the title is absorbed.
    """
    items = [b for b in blocks if b.kind != "reference"]
    if (
        items
        and items[0].kind == "heading"
        and items[0].level == 1
        and items[0].text.casefold() == title.casefold()
    ):
        items = items[1:]
    parents: list[int] = []
    stack: list[tuple[int, int]] = []  # (heading level, item index)
    for i, block in enumerate(items):
        if block.kind == "heading":
            while stack and stack[-1][0] >= block.level:
                stack.pop()
            parents.append(stack[-1][1] if stack else -1)
            stack.append((block.level, i))
        else:
            parents.append(stack[-1][1] if stack else -1)
    return parents, items


def oracle_subtree_figures(nodes: dict, node_id: str) -> list[str]:
    """Recursive DFS filter, independent of the library's traversal."""
    node = nodes[node_id]
    found = [node_id] if node.kind == "figure" else []
    for child in node.children:
        found.extend(oracle_subtree_figures(nodes, child))
    return found


def oracle_postorder(nodes: dict, root_id: str) -> list[str]:
    order: list[str] = []

    def walk(nid: str) -> None:
        for child in nodes[nid].children:
            walk(child)
        order.append(nid)

    walk(root_id)
    return order


def oracle_tree_check(nodes: dict, root_id: str) -> bool:
    """Brute-force tree validity: single parents, no cycles, all resolvable."""
    if root_id not in nodes:
        return False
    counts = {nid: 0 for nid in nodes}
    for node in nodes.values():
        for child in node.children:
            if child not in nodes:
                return False
            counts[child] += 1
        if node.kind != "section" and node.children:
            return False
        orders = [nodes[c].order_index for c in node.children if c in nodes]
        if any(b <= a for a, b in zip(orders, orders[1:])):
            return False
    if counts[root_id] != 0:
        return False
    if any(c != 1 for nid, c in counts.items() if nid != root_id):
        return False
    seen: set[str] = set()
    stack = [root_id]
    while stack:
        nid = stack.pop()
        if nid in seen:
            return False
        seen.add(nid)
        stack.extend(nodes[nid].children)
    return seen == set(nodes)


# -- summarization rules -----------------------------------------------------


def oracle_point_status(point_count: int, total_words: int) -> str:
    """The validate_points rule table; 'retry' marks the <2 signal."""
    if point_count > 5:
        return "point_count_repaired"
    if point_count < 2:
        return "retry"
    if total_words > 70:
        return "over_budget"
    return "ok"


def oracle_word_total(point_texts: list[str]) -> int:
    return sum(len(t.split()) for t in point_texts)


def oracle_extractive_selection(
    sentences: list[str], abstract: str
) -> list[int]:
    """Recompute the extractive backend's top-k selection independently."""
    import re

    def vocab(text: str) -> set[str]:
        return {w.casefold() for w in re.findall(r"[^\W\d_]{3,}", text)}

    av = vocab(abstract)
    scores = []
    for i, s in enumerate(sentences):
        pos = 1.0 if i == 0 else (0.5 if i == len(sentences) - 1 else 0.0)
        sv = vocab(s)
        scores.append((pos + len(sv & av) / max(1, len(sv)), i))
    k = min(len(sentences), min(5, max(2, len(sentences))))
    ranked = sorted(scores, key=lambda t: (-t[0], t[1]))[:k]
    return sorted(i for _, i in ranked)
