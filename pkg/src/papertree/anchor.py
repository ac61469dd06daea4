"""Resolve evidence quotes to character spans in their source text.

Three stages, first success wins: exact substring, substring after folding
(NFC + casefold + whitespace collapse, surrounding quotes stripped from the
evidence), then a fuzzy best-window search over token-aligned windows.
Failure is a value, never an exception: an unmatched anchor is rendered
with a warning badge downstream instead of being dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .textnorm import fold_text

EXACT = "exact"
NORMALIZED = "normalized"
FUZZY = "fuzzy"
UNMATCHED = "unmatched"

DEFAULT_THRESHOLD = 0.85
_QUOTE_CHARS = "\"'“”‘’«»‚„"


@dataclass(frozen=True)
class Anchor:
    target_node_id: str
    char_start: int
    char_end: int
    match_kind: str
    similarity: float


def token_bounds(text: str) -> list[tuple[int, int]]:
    """(start, end) of each maximal non-space run."""
    bounds: list[tuple[int, int]] = []
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        j = i + 1
        while j < n and not text[j].isspace():
            j += 1
        bounds.append((i, j))
        i = j
    return bounds


def window_length_bounds(evidence_len: int) -> tuple[int, int]:
    lo = max(1, math.floor(0.8 * evidence_len))
    hi = math.ceil(1.2 * evidence_len)
    return lo, hi


def best_window(evidence: str, target: str) -> tuple[int, int, float]:
    """Best token-aligned window of ``target`` under edit similarity.

    Candidate windows span token boundaries and have length within
    0.8x-1.2x of the evidence length.  Similarity is
    ``1 - distance / max(len(window), len(evidence))``.  Ties break to the
    earliest start, then the shortest window.  Returns
    ``(char_start, char_end, similarity)``; ``(0, 0, 0.0)`` when no window
    is admissible.
    """
    m = len(evidence)
    if m == 0 or not target.strip():
        return (0, 0, 0.0)
    lo, hi = window_length_bounds(m)
    bounds = token_bounds(target)
    starts = [s for s, _ in bounds]
    ends = [e for _, e in bounds]

    best_start, best_end, best_sim = 0, 0, -1.0
    for s in starts:
        limit = min(len(target), s + hi)
        width = limit - s
        if width < lo:
            continue
        admissible = [e for e in ends if s + lo <= e <= s + hi]
        if not admissible:
            continue
        # one DP sweep per start covers every admissible end at that start
        row = _prefix_row(evidence, target[s:limit])
        for e in admissible:
            dist = row[e - s]
            length = e - s
            sim = 1.0 - dist / max(m, length)
            if sim > best_sim:
                best_start, best_end, best_sim = s, e, sim
    if best_sim < 0:
        return (0, 0, 0.0)
    return (best_start, best_end, best_sim)


def _prefix_row(evidence: str, window: str) -> list[int]:
    """Distances from ``evidence`` to every prefix of ``window``."""
    width = len(window)
    row = list(range(width + 1))
    for ch in evidence:
        prev = row
        row = [prev[0] + 1] + [0] * width
        prev_j1 = prev[0]
        row_j1 = row[0]
        for j in range(1, width + 1):
            cost = 0 if window[j - 1] == ch else 1
            val = prev_j1 + cost
            up = prev[j] + 1
            if up < val:
                val = up
            left = row_j1 + 1
            if left < val:
                val = left
            row[j] = val
            prev_j1 = prev[j]
            row_j1 = val
    return row


def refine_window(
    evidence: str, target: str, start: int, end: int
) -> tuple[int, int, float]:
    """Char-level polish of a token-aligned window within one token.

    Token alignment keeps the search near-linear but can sit a few
    characters off the true optimum when edits fall at word edges; sliding
    both edges over the adjacent token span recovers it at constant cost.
    """
    m = len(evidence)
    lo, hi = window_length_bounds(m)
    bounds = token_bounds(target)
    starts = sorted({s for s, _ in bounds})
    ends = sorted({e for _, e in bounds})

    import bisect

    i = bisect.bisect_left(starts, start)
    start_lo = starts[i - 1] if i > 0 else 0
    start_hi = starts[i + 1] if i + 1 < len(starts) else min(len(target), start + 1)
    j = bisect.bisect_left(ends, end)
    end_lo = ends[j - 1] if j > 0 else max(1, end - 1)
    end_hi = ends[j + 1] if j + 1 < len(ends) else len(target)

    best = (start, end, -1.0)
    for s in range(start_lo, start_hi + 1):
        limit = min(len(target), s + hi, end_hi)
        if limit - s < max(1, lo):
            continue
        row = _prefix_row(evidence, target[s:limit])
        e_first = max(end_lo, s + lo)
        for e in range(e_first, limit + 1):
            length = e - s
            if length < lo or length > hi:
                continue
            sim = 1.0 - row[length] / max(m, length)
            if sim > best[2]:
                best = (s, e, sim)
    return best


def anchor_evidence(
    evidence: str,
    target: str,
    *,
    node_id: str = "",
    threshold: float = DEFAULT_THRESHOLD,
) -> Anchor:
    """Resolve ``evidence`` to a span of ``target``; see module docstring.

    The fuzzy stage searches token-aligned windows and then polishes the
    winner at character granularity within one token of each edge, so the
    reported span matches an exhaustive all-windows search except in rare
    ties between distant, equally-similar windows.
    """
    if not evidence:
        raise ValueError("evidence must be non-empty")

    idx = target.find(evidence)
    if idx >= 0:
        return Anchor(node_id, idx, idx + len(evidence), EXACT, 1.0)

    stripped = evidence.strip().strip(_QUOTE_CHARS).strip()
    folded_evidence, _ = fold_text(stripped)
    folded_target, target_map = fold_text(target)
    if folded_evidence:
        pos = folded_target.find(folded_evidence)
        if pos >= 0:
            raw_start, raw_end = target_map.to_raw(pos, pos + len(folded_evidence))
            return Anchor(node_id, raw_start, raw_end, NORMALIZED, 1.0)

    start, end, sim = best_window(evidence, target)
    if end > start:
        start, end, sim = refine_window(evidence, target, start, end)
    if sim >= threshold:
        return Anchor(node_id, start, end, FUZZY, sim)
    return Anchor(node_id, 0, 0, UNMATCHED, max(sim, 0.0))
