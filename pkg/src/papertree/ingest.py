"""Publisher-style HTML and Markdown ingestion into an ordered block stream.

The mapping is deliberately narrow: headings, paragraphs, figures, tables
and reference-list items.  Inline markup is flattened to plain text so the
downstream summarizer and anchorer operate on one canonical string per
block.  ``source_span`` offsets index into the document's normalized source
text (the space-joined block texts, see :func:`document_source_text`).
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, replace
from html.parser import HTMLParser

from .errors import EmptyDocument, UnsupportedMarkup
from .textnorm import normalize_text

HEADING = "heading"
PARAGRAPH = "paragraph"
FIGURE = "figure"
TABLE = "table"
REFERENCE = "reference"

_REFERENCE_HEADINGS = {"references", "bibliography", "reference list", "literature cited"}
_TAG_RE = re.compile(r"<[a-zA-Z!/]")
_MD_HEADING = re.compile(r"^(#{1,6})\s+(.*?)\s*#*\s*$")
_MD_IMAGE_LINE = re.compile(r"^!\[([^\]]*)\]\([^)]*\)\s*$")
_MD_IMAGE_INLINE = re.compile(r"!\[([^\]]*)\]\([^)]*\)")
_MD_LINK = re.compile(r"\[([^\]]+)\]\([^)]*\)")


@dataclass(frozen=True)
class Block:
    """One ordered unit of document content.

    ``text`` is normalized display text; for figures and tables it equals
    the caption.  ``level`` is meaningful for headings only.
    """

    kind: str
    text: str
    level: int = 0
    caption: str | None = None
    source_span: tuple[int, int] = (0, 0)


@dataclass(frozen=True)
class RawDocument:
    title: str
    abstract_text: str
    blocks: tuple[Block, ...]
    source_id: str


def document_source_text(doc: RawDocument) -> str:
    """The normalized source the block source_spans index into."""
    return " ".join(block.text for block in doc.blocks)


def source_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class _BlockCollector(HTMLParser):
    """Event-driven collector tolerant of unclosed tags.

    Opening any block-level element implicitly closes a dangling paragraph
    or heading, so sloppy publisher markup still yields an ordered stream.
    """

    _HEADINGS = {f"h{n}": n for n in range(1, 7)}
    # nav/footer/aside are publisher chrome, not article content
    _SKIP = {"script", "style", "noscript", "template", "nav", "footer", "aside"}
    _BLOCK_STARTERS = {
        "p", "figure", "table", "ul", "ol", "li", "div", "section",
        "article", "blockquote", "main", "header", "pre",
    } | set(_HEADINGS)

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.raw_blocks: list[dict] = []
        self.title_parts: list[str] = []
        self._skip_depth = 0
        self._in_title = False
        self._mode: str | None = None  # heading | paragraph | li
        self._level = 0
        self._text: list[str] = []
        self._figure_depth = 0
        self._figure_caption: list[str] = []
        self._figure_alt: str | None = None
        self._in_figcaption = False
        self._table_depth = 0
        self._table_caption: list[str] = []
        self._in_caption = False

    # -- flushing ---------------------------------------------------------

    def _flush_text_block(self) -> None:
        if self._mode is None:
            return
        kind = HEADING if self._mode == "heading" else self._mode
        self.raw_blocks.append(
            {"kind": kind, "text": "".join(self._text), "level": self._level}
        )
        self._mode = None
        self._level = 0
        self._text = []

    def _open_text_block(self, mode: str, level: int = 0) -> None:
        self._flush_text_block()
        self._mode = mode
        self._level = level
        self._text = []

    def _flush_figure(self) -> None:
        if self._figure_depth <= 0:
            return
        caption = "".join(self._figure_caption)
        if not caption.strip() and self._figure_alt:
            caption = self._figure_alt
        self.raw_blocks.append({"kind": FIGURE, "text": caption, "level": 0})
        self._figure_depth = 0
        self._figure_caption = []
        self._figure_alt = None
        self._in_figcaption = False

    def _flush_table(self) -> None:
        caption = "".join(self._table_caption)
        self.raw_blocks.append({"kind": TABLE, "text": caption, "level": 0})
        self._table_depth = 0
        self._table_caption = []
        self._in_caption = False

    # -- parser events ----------------------------------------------------

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        if tag in self._SKIP:
            self._skip_depth += 1
            return
        if self._skip_depth:
            return
        if tag == "title":
            self._in_title = True
            return
        if tag == "img":
            alt = dict(attrs).get("alt") or ""
            if self._figure_depth > 0:
                if self._figure_alt is None and alt.strip():
                    self._figure_alt = alt
            elif self._mode in ("paragraph", "li", "heading"):
                self._text.append(f" {alt} ")
            else:
                self.raw_blocks.append({"kind": FIGURE, "text": alt, "level": 0})
            return
        if tag == "br":
            if self._mode is not None:
                self._text.append(" ")
            return
        if self._table_depth > 0:
            if tag == "caption":
                self._in_caption = True
            elif tag == "table":
                self._table_depth += 1
            return
        if tag == "figure":
            self._flush_text_block()
            self._flush_figure()
            self._figure_depth = 1
            return
        if self._figure_depth > 0:
            if tag == "figcaption":
                self._in_figcaption = True
            return
        if tag == "table":
            self._flush_text_block()
            self._table_depth = 1
            return
        if tag in self._HEADINGS:
            self._open_text_block("heading", self._HEADINGS[tag])
            return
        if tag == "p":
            self._open_text_block("paragraph")
            return
        if tag == "li":
            self._open_text_block("li")
            return
        if tag in self._BLOCK_STARTERS:
            self._flush_text_block()

    def handle_endtag(self, tag: str) -> None:
        if tag in self._SKIP:
            self._skip_depth = max(0, self._skip_depth - 1)
            return
        if self._skip_depth:
            return
        if tag == "title":
            self._in_title = False
            return
        if self._table_depth > 0:
            if tag == "caption":
                self._in_caption = False
            elif tag == "table":
                self._table_depth -= 1
                if self._table_depth == 0:
                    self._flush_table()
            return
        if self._figure_depth > 0:
            if tag == "figcaption":
                self._in_figcaption = False
            elif tag == "figure":
                self._flush_figure()
            return
        if tag in self._HEADINGS or tag in ("p", "li"):
            self._flush_text_block()

    def handle_data(self, data: str) -> None:
        if self._skip_depth:
            return
        if self._in_title:
            self.title_parts.append(data)
            return
        if self._table_depth > 0:
            if self._in_caption:
                self._table_caption.append(data)
            return
        if self._figure_depth > 0:
            if self._in_figcaption:
                self._figure_caption.append(data)
            return
        if self._mode is not None:
            self._text.append(data)

    def close(self) -> None:  # flush dangling structures at EOF
        super().close()
        self._flush_text_block()
        self._flush_figure()
        if self._table_depth > 0:
            self._flush_table()


def _finalize_blocks(raw_blocks: list[dict]) -> list[Block]:
    """Normalize texts, drop empties, assign uncaptioned placeholders."""
    blocks: list[Block] = []
    figure_no = 0
    table_no = 0
    for raw in raw_blocks:
        text, _ = normalize_text(raw["text"])
        kind = raw["kind"]
        if kind == FIGURE:
            figure_no += 1
            caption = text or f"(uncaptioned figure {figure_no})"
            blocks.append(Block(kind=FIGURE, text=caption, caption=caption))
        elif kind == TABLE:
            table_no += 1
            caption = text or f"(uncaptioned table {table_no})"
            blocks.append(Block(kind=TABLE, text=caption, caption=caption))
        elif text:
            blocks.append(Block(kind=kind, text=text, level=raw["level"]))
    return blocks


def _mark_references(blocks: list[Block]) -> list[Block]:
    """Re-kind list items and paragraphs under a references heading."""
    out: list[Block] = []
    ref_level: int | None = None
    for block in blocks:
        if block.kind == HEADING:
            if block.text.casefold() in _REFERENCE_HEADINGS:
                ref_level = block.level
            elif ref_level is not None and block.level <= ref_level:
                ref_level = None
            out.append(block)
        elif ref_level is not None and block.kind in (PARAGRAPH, "li"):
            out.append(replace(block, kind=REFERENCE))
        else:
            out.append(block)
    return [b if b.kind != "li" else replace(b, kind=PARAGRAPH) for b in out]


def _extract_abstract(blocks: list[Block]) -> tuple[str, list[Block]]:
    """Abstract section by heading, else the first pre-heading paragraph."""
    for idx, block in enumerate(blocks):
        if block.kind == HEADING and block.text.casefold() == "abstract":
            taken: list[int] = []
            j = idx + 1
            while j < len(blocks):
                nxt = blocks[j]
                if nxt.kind == HEADING and nxt.level <= block.level:
                    break
                if nxt.kind == PARAGRAPH:
                    taken.append(j)
                j += 1
            if taken:
                abstract = " ".join(blocks[k].text for k in taken)
                drop = {idx, *taken}
                return abstract, [b for k, b in enumerate(blocks) if k not in drop]
            break
    for idx, block in enumerate(blocks):
        if block.kind == HEADING:
            break
        if block.kind == PARAGRAPH:
            return block.text, blocks[:idx] + blocks[idx + 1 :]
    return "", blocks


def _assign_spans(blocks: list[Block]) -> list[Block]:
    placed: list[Block] = []
    offset = 0
    for block in blocks:
        start = offset
        end = start + len(block.text)
        placed.append(replace(block, source_span=(start, end)))
        offset = end + 1  # single joining space
    return placed


def _assemble(
    raw_blocks: list[dict], title_raw: str, source_text: str
) -> RawDocument:
    blocks = _mark_references(_finalize_blocks(raw_blocks))
    abstract, blocks = _extract_abstract(blocks)
    title, _ = normalize_text(title_raw)
    if not title:
        for block in blocks:
            if block.kind == HEADING and block.level == 1:
                title = block.text
                break
        else:
            for block in blocks:
                if block.kind == HEADING:
                    title = block.text
                    break
    if not blocks and not abstract:
        raise EmptyDocument("no text content")
    return RawDocument(
        title=title,
        abstract_text=abstract,
        blocks=tuple(_assign_spans(blocks)),
        source_id=source_digest(source_text),
    )


def parse_html(html_text: str) -> RawDocument:
    """Parse publisher-style HTML into an ordered block stream.

    Raises UnsupportedMarkup when the input carries no HTML tags at all and
    EmptyDocument when parsing yields no text content.
    """
    if not _TAG_RE.search(html_text):
        raise UnsupportedMarkup("input does not contain HTML tags")
    collector = _BlockCollector()
    collector.feed(html_text)
    collector.close()
    return _assemble(
        collector.raw_blocks, "".join(collector.title_parts), html_text
    )


def parse_markdown(md_text: str) -> RawDocument:
    """Parse Markdown: ATX headings, blank-line paragraphs, image figures."""
    raw_blocks: list[dict] = []
    para_lines: list[str] = []

    def flush_paragraph() -> None:
        if para_lines:
            joined = " ".join(para_lines)
            joined = _MD_IMAGE_INLINE.sub(lambda m: m.group(1), joined)
            joined = _MD_LINK.sub(lambda m: m.group(1), joined)
            joined = joined.replace("**", "").replace("`", "")
            raw_blocks.append({"kind": PARAGRAPH, "text": joined, "level": 0})
            para_lines.clear()

    title = ""
    for line in md_text.split("\n"):
        stripped = line.strip()
        if not stripped:
            flush_paragraph()
            continue
        heading = _MD_HEADING.match(stripped)
        if heading:
            flush_paragraph()
            level = len(heading.group(1))
            raw_blocks.append(
                {"kind": HEADING, "text": heading.group(2), "level": level}
            )
            if not title and level == 1:
                title = heading.group(2)
            continue
        image = _MD_IMAGE_LINE.match(stripped)
        if image:
            flush_paragraph()
            raw_blocks.append({"kind": FIGURE, "text": image.group(1), "level": 0})
            continue
        para_lines.append(stripped)
    flush_paragraph()
    return _assemble(raw_blocks, title, md_text)
