"""Drive the HTTP service end to end in-process: ingest a fixture, poll
until summaries are ready, then walk views and hover-evidence payloads the
way the reader UI does.

Run from the repository root:  python3 demos/demo_service_roundtrip.py
"""

import tempfile
import time
from pathlib import Path

from fastapi.testclient import TestClient

from papertree.service import ServiceConfig, create_app

FIXTURE = Path(__file__).resolve().parent.parent / "tests/fixtures/jats_traffic.html"


def main() -> None:
    app = create_app(ServiceConfig(data_dir=tempfile.mkdtemp(prefix="papertree-")))
    client = TestClient(app)

    handle = client.post(
        "/documents",
        json={"source": FIXTURE.read_text(encoding="utf-8"), "format": "html"},
    ).json()
    doc_id = handle["doc_id"]
    print(f"ingested {handle['title']!r} as {doc_id[:12]}... status={handle['status']}")

    while client.get(f"/documents/{doc_id}").json()["status"] == "summarizing":
        time.sleep(0.05)

    view = client.get(f"/documents/{doc_id}/view").json()
    print(f"\nroot view: {len(view['cards'])} cards")
    for card in view["cards"]:
        arrow = "->" if card["can_descend"] else "  "
        print(f"  {arrow} [{card['kind']}] {card['display_title']}")
        for point in card["key_points"][:2]:
            print(f"       * {point['point_text']}")

    first = view["cards"][0]
    evidence = client.get(
        f"/documents/{doc_id}/nodes/{first['child_id']}/evidence/0"
    ).json()
    print(f"\nhover payload for first point of {first['display_title']!r}:")
    print(f"  evidence : {evidence['evidence_text']}")
    print(f"  kind     : {evidence['anchor']['match_kind']}")
    print(f"  excerpt  : {evidence['source_excerpt'][:100]}...")


if __name__ == "__main__":
    main()
