"""Walk the whole offline pipeline on a committed fixture:

parse publisher HTML -> section tree -> bottom-up extractive summaries
-> anchored evidence, printing what each stage produced.

Run from the repository root:  python3 demos/demo_offline_pipeline.py
"""

from pathlib import Path

from papertree import build_tree, parse_html, summarize_tree
from papertree.backends import ExtractiveBackend

FIXTURE = Path(__file__).resolve().parent.parent / "tests/fixtures/springer_soil.html"


def main() -> None:
    doc = parse_html(FIXTURE.read_text(encoding="utf-8"))
    print(f"title     : {doc.title}")
    print(f"abstract  : {doc.abstract_text[:90]}...")
    print(f"blocks    : {len(doc.blocks)}")

    tree = build_tree(doc)
    print(f"tree nodes: {len(tree.nodes)}")

    summaries = summarize_tree(tree, ExtractiveBackend())
    root = tree.nodes[tree.root_id]
    print(f"\nWhole-paper summary ({len(summaries[root.id].points)} points):")
    for point in summaries[root.id].points:
        print(f"  - {point.point_text}")

    print("\nOne section, drilled down:")
    intro = next(n for n in tree.nodes.values() if n.title == "Introduction")
    for point in summaries[intro.id].points:
        anchor = point.anchor
        print(f"  - {point.point_text}")
        print(f"    evidence anchored [{anchor.match_kind}] at "
              f"chars {anchor.char_start}..{anchor.char_end}")


if __name__ == "__main__":
    main()
