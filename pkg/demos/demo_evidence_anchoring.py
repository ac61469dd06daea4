"""Show the three anchoring stages on progressively mangled quotes.

Run from the repository root:  python3 demos/demo_evidence_anchoring.py
"""

from papertree import anchor_evidence

TARGET = (
    "Network modularity increased with stand age across all four seasonal "
    "networks, and a small set of keystone fungi bridged otherwise "
    "disconnected bacterial modules."
)

QUOTES = [
    ("verbatim", "keystone fungi bridged otherwise disconnected bacterial modules"),
    ("case and quotes drift", "“Network Modularity increased with STAND AGE”"),
    ("two typos", "keystone fungi bridgd otherwse disconnected bacterial modules"),
    ("paraphrase (must fail)", "older forests have more modular communities"),
]


def main() -> None:
    print(f"target: {TARGET}\n")
    for label, quote in QUOTES:
        anchor = anchor_evidence(quote, TARGET)
        print(f"{label}:")
        print(f"  quote : {quote}")
        print(f"  kind  : {anchor.match_kind}  similarity={anchor.similarity:.3f}")
        if anchor.match_kind != "unmatched":
            print(f"  span  : {TARGET[anchor.char_start:anchor.char_end]!r}")
        print()


if __name__ == "__main__":
    main()
