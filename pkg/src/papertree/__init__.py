"""papertree: section-tree reading engine with anchored key-point summaries."""

from .anchor import Anchor, anchor_evidence, best_window
from .backends import BackendRegistry, ExtractiveBackend, HttpChatBackend
from .ingest import Block, RawDocument, parse_html, parse_markdown
from .store import SummaryCache, TreeDocument, load_tree, save_tree
from .summarize import (
    KeyPoint,
    NodeSummary,
    SummaryRequest,
    summarize_leaf,
    summarize_section,
    summarize_tree,
)
from .textnorm import normalize_text
from .tree import (
    DocNode,
    NodeView,
    SectionTree,
    build_tree,
    node_view,
    subtree_figures,
    validate_tree,
)

__all__ = [
    "Anchor",
    "BackendRegistry",
    "Block",
    "DocNode",
    "ExtractiveBackend",
    "HttpChatBackend",
    "KeyPoint",
    "NodeSummary",
    "NodeView",
    "RawDocument",
    "SectionTree",
    "SummaryCache",
    "SummaryRequest",
    "TreeDocument",
    "anchor_evidence",
    "best_window",
    "build_tree",
    "load_tree",
    "node_view",
    "normalize_text",
    "parse_html",
    "parse_markdown",
    "save_tree",
    "subtree_figures",
    "summarize_leaf",
    "summarize_section",
    "summarize_tree",
    "validate_tree",
]

__version__ = "0.1.0"
