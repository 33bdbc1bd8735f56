"""Record service responses into JSON fixtures for the frontend tests.

Run from the repository root after installing the Python package:

    python3 frontend/scripts/record_fixtures.py

The frontend tests replay these through a fetch stub, so they exercise the
exact payload shapes the live service produces.
"""

from __future__ import annotations

import json
import pathlib

from politeplan.service import Api, ServiceConfig, render_json

WORKED = "could you please proofread this article? thanks!"
IDENTITY = "thanks for the update ."

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def record() -> list[dict]:
    api = Api(ServiceConfig())
    fixtures: list[dict] = []

    def add(path: str, match: dict | None, payload: dict) -> None:
        fixtures.append({
            "path": path,
            "match": match or {},
            "response": json.loads(render_json(payload)),
        })

    add("/v1/profiles", None, api.profiles())

    for message, channel in ((WORKED, "mt-lossy"), (IDENTITY, "all-safe")):
        base = {"message": message, "sender": "average", "receiver": "average", "channel": channel}
        add("/v1/extract", {"message": message}, api.extract({"message": message}))
        add(
            "/v1/perceive",
            {"message": message, "model": "average"},
            api.perceive_level({"message": message, "model": "average"}),
        )
        add(
            "/v1/plan",
            {"message": message, "channel": channel, "method": "none"},
            api.plan({**base, "method": "none"}),
        )
        for method in ("ilp", "greedy"):
            paraphrased = api.paraphrase({**base, "method": method, "alternatives": 3})
            add(
                "/v1/paraphrase",
                {"message": message, "channel": channel, "method": method},
                paraphrased,
            )
            # adopting a suggestion re-analyzes it: record those calls too
            for alt in paraphrased["alternatives"]:
                text = alt["text"]
                if any(f["path"] == "/v1/extract" and f["match"].get("message") == text
                       for f in fixtures):
                    continue
                add("/v1/extract", {"message": text}, api.extract({"message": text}))
                add(
                    "/v1/perceive",
                    {"message": text, "model": "average"},
                    api.perceive_level({"message": text, "model": "average"}),
                )
                add(
                    "/v1/plan",
                    {"message": text, "channel": channel, "method": "none"},
                    api.plan({**base, "message": text, "method": "none"}),
                )
    return fixtures


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    fixtures = record()
    target = OUT / "service_fixtures.json"
    target.write_text(json.dumps(fixtures, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {target} ({len(fixtures)} fixtures)")


if __name__ == "__main__":
    main()
