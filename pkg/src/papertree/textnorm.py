"""Text normalization with position maps, sentence splitting, word counting.

Normalization is the substrate for deterministic anchoring: every block of
text is stored in normalized form, and evidence matching may fold case and
whitespace.  Both directions need to recover spans in the original string,
so the normalizers return an OffsetMap alongside the normalized text.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

_BULLET_PREFIX = re.compile(r"^[-*•·]+\s+")
_SENT_END = re.compile(r"[.!?]+[\)\]\"'”’]*")
# Trailing tokens after which a period is not a sentence boundary.
_ABBREVIATIONS = {
    "e.g", "i.e", "cf", "vs", "al", "fig", "figs", "eq", "eqs", "no",
    "dr", "mr", "ms", "mrs", "prof", "sec", "ref", "refs", "ca", "etc",
}


@dataclass(frozen=True)
class OffsetMap:
    """Maps positions in a normalized string back to the string it came from.

    ``starts[i]``/``ends[i]`` bound the raw characters that produced
    normalized character ``i``; a normalized span ``(s, e)`` covers the raw
    span ``(starts[s], ends[e - 1])``.
    """

    starts: tuple[int, ...]
    ends: tuple[int, ...]
    raw_length: int

    def to_raw(self, start: int, end: int) -> tuple[int, int]:
        if not 0 <= start <= end <= len(self.starts):
            raise IndexError(f"span ({start}, {end}) outside normalized text")
        if start == end:
            pos = self.starts[start] if start < len(self.starts) else self.raw_length
            return (pos, pos)
        return (self.starts[start], self.ends[end - 1])


def _align_cluster(cluster: str, piece: str) -> tuple[list[int], list[int]] | None:
    """Per-character offsets of a normalized cluster into its raw cluster.

    ``piece[0]`` is the composed head; the remaining characters are leftover
    combining marks located by scanning the raw cluster.  Returns None when
    the marks were reordered, in which case the caller falls back to a
    cluster-granular map.
    """
    used = [False] * len(cluster)
    mark_positions: list[int] = []
    for mark in piece[1:]:
        found = -1
        for q in range(len(cluster)):
            if not used[q] and cluster[q] == mark:
                found = q
                break
        if found < 0:
            return None
        used[found] = True
        mark_positions.append(found)
    if mark_positions != sorted(mark_positions):
        return None
    head_end = mark_positions[0] if mark_positions else len(cluster)
    starts = [0] + mark_positions
    ends = [head_end] + [q + 1 for q in mark_positions]
    return starts, ends


def _nfc_offsets(token: str) -> tuple[str, list[int], list[int]]:
    """NFC of a whitespace-free token plus per-output-char raw offsets."""
    nfc_total = unicodedata.normalize("NFC", token)
    if nfc_total == token:
        idx = list(range(len(token)))
        return token, idx, [k + 1 for k in idx]

    pieces: list[str] = []
    starts: list[int] = []
    ends: list[int] = []
    i, n = 0, len(token)
    while i < n:
        j = i + 1
        while j < n and unicodedata.combining(token[j]) != 0:
            j += 1
        cluster = token[i:j]
        piece = unicodedata.normalize("NFC", cluster)
        pieces.append(piece)
        if len(piece) == 1:
            starts.append(i)
            ends.append(j)
        else:
            aligned = _align_cluster(cluster, piece)
            if aligned is None:
                starts.extend(i for _ in piece)
                ends.extend(j for _ in piece)
            else:
                starts.extend(i + s for s in aligned[0])
                ends.extend(i + e for e in aligned[1])
        i = j

    combined = "".join(pieces)
    if combined != nfc_total:
        # Composition crossed cluster boundaries (e.g. conjoining jamo):
        # fall back to a token-granular map.
        return nfc_total, [0] * len(nfc_total), [len(token)] * len(nfc_total)
    return combined, starts, ends


def _normalize_with_map(raw: str, casefold: bool) -> tuple[str, OffsetMap]:
    out: list[str] = []
    starts: list[int] = []
    ends: list[int] = []
    pending_ws: tuple[int, int] | None = None
    i, n = 0, len(raw)
    while i < n:
        if raw[i].isspace():
            j = i + 1
            while j < n and raw[j].isspace():
                j += 1
            if out:
                pending_ws = (i, j)
            i = j
            continue
        j = i + 1
        while j < n and not raw[j].isspace():
            j += 1
        if pending_ws is not None:
            out.append(" ")
            starts.append(pending_ws[0])
            ends.append(pending_ws[1])
            pending_ws = None
        token = raw[i:j]
        nfc, t_starts, t_ends = _nfc_offsets(token)
        for k, ch in enumerate(nfc):
            emitted = ch.casefold() if casefold else ch
            for folded in emitted:
                out.append(folded)
                starts.append(i + t_starts[k])
                ends.append(i + t_ends[k])
        i = j
    return "".join(out), OffsetMap(tuple(starts), tuple(ends), n)


def normalize_text(raw: str) -> tuple[str, OffsetMap]:
    """NFC, whitespace runs collapsed to one space, surrounding space trimmed.

    Returns the normalized text and an OffsetMap from normalized positions
    back into ``raw``.
    """
    return _normalize_with_map(raw, casefold=False)


def fold_text(raw: str) -> tuple[str, OffsetMap]:
    """Aggressive fold for quote matching: normalize_text plus casefolding."""
    return _normalize_with_map(raw, casefold=True)


def word_count(text: str) -> int:
    """Whitespace-separated token count; hyphenated compounds count once."""
    return len(text.split())


def split_sentences(text: str) -> list[tuple[int, int]]:
    """Sentence spans of ``text``, split at terminators and newlines.

    Each span is trimmed of surrounding whitespace and of a leading list
    marker, so ``text[start:end]`` is always a verbatim slice suitable as
    evidence.  Common abbreviations do not end a sentence.
    """
    boundaries: list[int] = []
    for match in _SENT_END.finditer(text):
        end = match.end()
        if end < len(text) and not text[end].isspace():
            continue
        before = text[: match.start()]
        last = before.rsplit(None, 1)[-1] if before.split() else ""
        word = last.rstrip(".").lstrip("([\"'“‘").casefold()
        if word in _ABBREVIATIONS or (len(word) == 1 and word.isalpha()):
            continue
        boundaries.append(end)
    for idx, ch in enumerate(text):
        if ch == "\n":
            boundaries.append(idx)
    boundaries.append(len(text))

    spans: list[tuple[int, int]] = []
    prev = 0
    for cut in sorted(set(boundaries)):
        start, end = prev, cut
        while start < end and text[start].isspace():
            start += 1
        while end > start and text[end - 1].isspace():
            end -= 1
        marker = _BULLET_PREFIX.match(text[start:end])
        if marker:
            start += marker.end()
        if end > start:
            spans.append((start, end))
        prev = cut
    return spans


def first_sentence(text: str) -> str:
    """The first sentence of ``text``, or the trimmed text if none."""
    spans = split_sentences(text)
    if not spans:
        return text.strip()
    start, end = spans[0]
    return text[start:end]
