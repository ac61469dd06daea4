"""Batch front door: ingest a file into a tree document, export an outline,
or serve the HTTP API.

Exit codes: 0 success, 1 input error, 2 backend failure (partial degraded
output is still written), 64 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .backends import BackendRegistry
from .errors import PaperTreeError
from .ingest import FIGURE, PARAGRAPH, TABLE, parse_html, parse_markdown, source_digest
from .prompts import TEMPLATE_VERSION
from .store import (
    SummaryCache,
    TreeDocument,
    build_tree_document,
    save_tree,
    summary_map,
    tree_of,
)
from .summarize import summarize_tree
from .tree import SECTION, build_tree

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BACKEND = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 64, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="papertree", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="parse, summarize, and export")
    ingest.add_argument("input", nargs="?", help="input file (html or markdown)")
    ingest.add_argument("--input", dest="input_flag", help="alias for the positional input")
    ingest.add_argument("--format", choices=["html", "markdown"], help="override format sniffing")
    ingest.add_argument("--backend", default="extractive", help="summarizer backend id")
    ingest.add_argument("--out", required=True, help="output path")
    ingest.add_argument(
        "--mode",
        choices=["outline-markdown", "tree-file"],
        default="outline-markdown",
        help="output mode (default: outline-markdown)",
    )
    ingest.add_argument("--config", help="service/backend config file (json)")
    ingest.add_argument("--threshold", type=float, default=0.85, help="fuzzy anchor threshold")
    ingest.add_argument("--cache-dir", help="summary cache directory")
    ingest.add_argument("-v", "--verbose", action="count", default=0)

    serve = sub.add_parser("serve", help="run the HTTP API")
    serve.add_argument("--config", help="service config file (json)")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8601)
    return parser


def _sniff_format(path: Path, override: str | None) -> str:
    if override:
        return override
    if path.suffix.lower() in (".md", ".markdown"):
        return "markdown"
    return "html"


def render_outline(doc: TreeDocument) -> str:
    """Nested markdown outline: bold titles, plain bullets for key points.

    Lossless over key points: every summary point appears exactly once, as
    a plain ``- `` bullet.
    """
    tree = tree_of(doc)
    summaries = summary_map(doc)
    lines: list[str] = []

    def walk(node_id: str, depth: int) -> None:
        node = tree.nodes[node_id]
        pad = "  " * depth
        if node.kind == SECTION:
            lines.append(f"{pad}- **{node.title or '(untitled)'}**")
        elif node.kind == PARAGRAPH:
            lines.append(f"{pad}- **¶**")
        elif node.kind in (FIGURE, TABLE):
            lines.append(f"{pad}- *{node.caption or ''}*")
        summary = summaries.get(node_id)
        if summary is not None:
            for point in summary.points:
                lines.append(f"{pad}  - {point.point_text}")
        for child in node.children:
            walk(child, depth + 1)

    walk(tree.root_id, 0)
    return "\n".join(lines) + "\n"


def _run_ingest(args: argparse.Namespace) -> int:
    input_arg = args.input_flag or args.input
    if not input_arg:
        print("papertree: error: an input file is required", file=sys.stderr)
        return EXIT_USAGE
    path = Path(input_arg)
    try:
        source = path.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"papertree: cannot read {path}: {exc}", file=sys.stderr)
        return EXIT_INPUT

    backend_configs = {}
    if args.config:
        from .service import ServiceConfig

        backend_configs = ServiceConfig.from_file(args.config).backends
    registry = BackendRegistry.from_config(backend_configs)
    backend = registry.get(args.backend)
    if backend is None:
        print(f"papertree: unknown backend {args.backend!r}", file=sys.stderr)
        return EXIT_INPUT

    format = _sniff_format(path, args.format)
    try:
        raw = parse_html(source) if format == "html" else parse_markdown(source)
        tree = build_tree(raw)
    except PaperTreeError as exc:
        print(f"papertree: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT

    cache = SummaryCache(args.cache_dir) if args.cache_dir else None
    failures: list[tuple[str, Exception]] = []
    summaries = summarize_tree(
        tree,
        backend,
        cache,
        threshold=args.threshold,
        on_node_error=lambda nid, exc: failures.append((nid, exc)),
    )
    doc = build_tree_document(
        tree,
        summaries,
        source_format=format,
        content_digest=source_digest(source),
        title=raw.title,
        backend_id=backend.backend_id,
        template_version=TEMPLATE_VERSION,
    )

    out_path = Path(args.out)
    if args.mode == "tree-file":
        save_tree(doc, out_path)
    else:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(render_outline(doc), encoding="utf-8")

    if args.verbose:
        print(f"{len(doc.nodes)} nodes, {len(doc.summaries)} summaries -> {out_path}")
    if failures:
        for nid, exc in failures:
            print(f"papertree: degraded {nid}: {type(exc).__name__}", file=sys.stderr)
        return EXIT_BACKEND
    return EXIT_OK


def _run_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    config = ServiceConfig.from_file(args.config) if args.config else ServiceConfig()
    uvicorn.run(create_app(config), host=args.host, port=args.port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.command == "ingest":
        return _run_ingest(args)
    return _run_serve(args)


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
