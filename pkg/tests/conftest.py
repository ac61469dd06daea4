from __future__ import annotations

import json
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).resolve().parent
FIXTURES = TESTS_DIR / "fixtures"
GOLDEN = TESTS_DIR / "golden"
sys.path.insert(0, str(TESTS_DIR))

FIXTURE_PAGES = [
    "springer_soil.html",
    "openaccess_coral.html",
    "jats_traffic.html",
]


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def golden_json(name: str) -> dict:
    return json.loads((GOLDEN / name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def fixture_docs():
    from papertree import parse_html

    return {name: parse_html(fixture_text(name)) for name in FIXTURE_PAGES}


@pytest.fixture(scope="session")
def fixture_trees(fixture_docs):
    from papertree import build_tree

    return {name: build_tree(doc) for name, doc in fixture_docs.items()}


@dataclass
class MockBackend:
    """Returns scripted raw responses in order; repeats the last one."""

    responses: list[str]
    backend_id: str = "mock"
    calls: list = field(default_factory=list)

    def complete(self, request):
        self.calls.append(request)
        index = min(len(self.calls) - 1, len(self.responses) - 1)
        return self.responses[index]


@dataclass
class RecordingBackend:
    """Wraps a backend and logs every request it serves."""

    inner: object
    calls: list = field(default_factory=list)

    @property
    def backend_id(self) -> str:
        return self.inner.backend_id

    def complete(self, request):
        self.calls.append(request)
        return self.inner.complete(request)


@dataclass
class FailingBackend:
    backend_id: str = "failing"
    calls: int = 0

    def complete(self, request):
        from papertree.errors import BackendUnavailable

        self.calls += 1
        raise BackendUnavailable("scripted failure")


def points_response(texts: list[str]) -> str:
    return json.dumps(
        {"points": [{"point": t, "evidence": t} for t in texts]}
    )


def random_block_stream(rng: random.Random, max_nodes: int = 200, max_depth: int = 5):
    """Block list for build_tree: nested headings with unique titles and
    multi-sentence paragraphs with unique texts."""
    from papertree.ingest import Block

    blocks: list[Block] = []
    counter = [0]

    def uid() -> int:
        counter[0] += 1
        return counter[0]

    def emit_section(level: int, budget: int) -> int:
        n = uid()
        blocks.append(Block(kind="heading", text=f"Section S{n}", level=level))
        used = 1
        for _ in range(rng.randint(1, 3)):
            if used >= budget:
                break
            roll = rng.random()
            if roll < 0.5 or level >= max_depth:
                m = uid()
                blocks.append(
                    Block(
                        kind="paragraph",
                        text=f"Paragraph P{m} says one thing. It also says another thing T{m}.",
                    )
                )
                used += 1
            elif roll < 0.65:
                m = uid()
                caption = f"Figure F{m}: a plot of quantity Q{m}."
                blocks.append(Block(kind="figure", text=caption, caption=caption))
                used += 1
            else:
                used += emit_section(level + 1, budget - used)
        return used

    total = 0
    target = rng.randint(3, max_nodes)
    while total < target:
        total += emit_section(1 + rng.randint(1, 2) - 1, target - total)
        if counter[0] > max_nodes:
            break
    return blocks


def random_tree(rng: random.Random, max_nodes: int = 200, max_depth: int = 5):
    from papertree import build_tree
    from papertree.ingest import RawDocument

    blocks = random_block_stream(rng, max_nodes=max_nodes, max_depth=max_depth)
    doc = RawDocument(
        title=f"Random Paper {rng.randint(0, 10 ** 6)}",
        abstract_text="A generated paper about sections and paragraphs.",
        blocks=tuple(blocks),
        source_id="random",
    )
    return build_tree(doc)
