"""Record service payloads used by the console test harness.

Runs the operator service in-process, replays the bundled closure
episode, and writes every payload the console consumes to
frontend/tests/fixtures/. Rerun after any wire-format change:

    python3 frontend/scripts/record_fixtures.py
"""
import asyncio
import json
from pathlib import Path

import httpx

from vertiops.service import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def dump(name, payload):
    path = FIXTURES / name
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path}")


async def record():
    app = create_app()
    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(transport=transport,
                                 base_url="http://record") as client:
        dump("network.json", (await client.get("/network")).json())
        dump("snapshot_initial.json", (await client.get("/state")).json())

        results = [
            (await client.post("/commands/close", json={"vp": 6})).json(),
            (await client.post("/commands/advance")).json(),
            (await client.post("/commands/landing-request", json={
                "agent": 4, "corridor": [7, 6], "waypoint": 17})).json(),
        ]
        dump("command_results.json", results)
        dump("deltas.json", app.state.deltas)
        dump("snapshot_final.json", (await client.get("/state")).json())

        explanation = await client.get(
            "/explanation", params={"atom": "target_change(1,2)"})
        dump("explanation_target_change_1_2.json", explanation.json())

        missing = await client.get(
            "/explanation", params={"atom": "target_change(9,9)"})
        dump("explanation_not_in_model.json",
             {"status": missing.status_code, "body": missing.json()})

        rejected = (await client.post("/commands/close",
                                      json={"vp": 99})).json()
        dump("rejected_close.json", rejected)


if __name__ == "__main__":
    FIXTURES.mkdir(parents=True, exist_ok=True)
    asyncio.run(record())
