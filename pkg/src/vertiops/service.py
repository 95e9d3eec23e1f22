"""HTTP facade over a single scenario session.

One in-memory session per service instance.  Commands are serialized
through an asyncio lock and each applied command broadcasts exactly one
state-delta record to every event-stream subscriber, in application
order.  Reads work against snapshots and need no lock.
"""
from __future__ import annotations

import asyncio
import json
from importlib.resources import files

import yaml
from fastapi import FastAPI, HTTPException
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from . import scenario
from .domain import load_config
from .engine import sorted_atoms
from .errors import NotInModel, ParseError, VertiopsError
from .explain import explain, tree_to_dict
from .grounding import GroundAtom
from .logic.ast import IntConst, SymConst
from .logic.parser import parse_program

SCHEMA = 1


class CloseBody(BaseModel):
    vp: int


class LandingBody(BaseModel):
    agent: int
    corridor: tuple
    waypoint: int


def _default_config() -> str:
    return files("vertiops.fixtures").joinpath("network.yaml").read_text()


def snapshot(session: scenario.Session) -> dict:
    pending = [
        {
            "to_uatm": m.to_uatm,
            "from_uatm": m.from_uatm,
            "kind": m.kind,
            "payload": list(m.payload),
            "enqueued_at_step": m.enqueued_at_step,
        }
        for u in sorted(session.relay_queues)
        for m in session.relay_queues[u]
    ]
    return {
        "schema": SCHEMA,
        "step": session.current_step,
        "vertiports": [
            {"id": vp, "closed": vp in session.closed_vertiports}
            for vp in sorted(session.network.vertiports)
        ],
        "agents": [
            {
                "id": a,
                "corridor": list(session.agents[a].corridor),
                "waypoint": session.agents[a].waypoint,
                "target": session.agents[a].target,
                "plan": [list(leg) for leg in session.agents[a].plan],
            }
            for a in sorted(session.agents)
        ],
        "pending_relays": pending,
        "last_verdict": (
            None if session.last_report is None
            else ("SATISFIABLE" if session.last_report.satisfiable
                  else "UNSATISFIABLE")
        ),
    }


def _parse_atom(text: str) -> GroundAtom:
    program = parse_program(text.strip().rstrip(".") + ".")
    rule = program.rules[0]
    if not rule.is_fact:
        raise ParseError("expected a ground atom", 1, 1)
    args = []
    for t in rule.head.args:
        if isinstance(t, IntConst):
            args.append(t.value)
        elif isinstance(t, SymConst):
            args.append(t.name)
        else:
            raise ParseError("expected a ground atom", 1, 1)
    return GroundAtom(rule.head.predicate, tuple(args))


def create_app(config_path=None) -> FastAPI:
    app = FastAPI(title="vertiops operator service")
    state = app.state
    if config_path is None:
        state.config_text = _default_config()
    else:
        with open(config_path) as f:
            state.config_text = f.read()
    state.config_doc = yaml.safe_load(state.config_text)
    state.lock = asyncio.Lock()
    state.subscribers = []
    state.delta_seq = 0
    state.deltas = []

    def reset_session():
        network, fleet = load_config(state.config_doc)
        state.session = scenario.new_session(network, fleet)

    reset_session()

    def broadcast(command: str, result: dict):
        session = state.session
        start = getattr(state, "transcript_mark", 0)
        stages = session.transcript[start:]
        state.transcript_mark = len(session.transcript)
        state.delta_seq += 1
        delta = {
            "schema": SCHEMA,
            "seq": state.delta_seq,
            "command": command,
            "result": result,
            "stages": stages,
            "snapshot": snapshot(session),
        }
        state.deltas.append(delta)
        for queue in list(state.subscribers):
            queue.put_nowait(delta)
        return delta

    def command_result(accepted: bool, outcome=None, diagnostics=()) -> dict:
        return {
            "schema": SCHEMA,
            "accepted": accepted,
            "outcome": outcome,
            "diagnostics": list(diagnostics),
        }

    async def apply(command: str, fn):
        async with state.lock:
            try:
                result = fn(state.session)
            except VertiopsError as exc:
                return command_result(False, diagnostics=[str(exc)])
            broadcast(command, result)
            return result

    @app.get("/network")
    def get_network():
        doc = dict(state.config_doc)
        doc.setdefault("schema", SCHEMA)
        return doc

    @app.get("/state")
    def get_state():
        return snapshot(state.session)

    @app.post("/commands/close")
    async def post_close(body: CloseBody):
        def run(session):
            outcome = scenario.close_vertiport(session, body.vp)
            return command_result(True, {
                "vp": outcome.vp,
                "already_closed": outcome.already_closed,
                "found_own": outcome.found_own,
                "found_other": outcome.found_other,
                "notices": scenario._notice_records(outcome.notices),
                "verdict": scenario._verdict(outcome.retarget_report),
            }, outcome.diagnostics)
        return await apply("close", run)

    @app.post("/commands/reopen")
    async def post_reopen(body: CloseBody):
        def run(session):
            scenario.reopen_vertiport(session, body.vp)
            return command_result(True, {"vp": body.vp})
        return await apply("reopen", run)

    @app.post("/commands/landing-request")
    async def post_landing(body: LandingBody):
        def run(session):
            outcome = scenario.inject_landing_request(
                session, body.agent, body.corridor, body.waypoint
            )
            return command_result(True, {
                "agent": outcome.agent,
                "requests": [list(r) for r in outcome.requests],
                "notices": scenario._notice_records(outcome.notices),
                "verdict": scenario._verdict(outcome.report),
            }, outcome.diagnostics)
        return await apply("landing-request", run)

    @app.post("/commands/advance")
    async def post_advance():
        def run(session):
            delivered = scenario.advance_step(session)
            return command_result(True, {
                "step": session.current_step,
                "delivered": [
                    {"to_uatm": m.to_uatm, "kind": m.kind,
                     "payload": list(m.payload)}
                    for m in delivered
                ],
            })
        return await apply("advance", run)

    @app.post("/commands/reset")
    async def post_reset():
        async with state.lock:
            reset_session()
            state.transcript_mark = 0
            result = command_result(True, {"reset": True})
            broadcast("reset", result)
            return result

    @app.get("/explanation")
    def get_explanation(atom: str):
        session = state.session
        if session.last_model is None or session.last_ground is None:
            raise HTTPException(status_code=409, detail="no model available")
        try:
            ground_atom = _parse_atom(atom)
        except VertiopsError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        try:
            tree = explain(ground_atom, session.last_model, session.last_ground)
        except NotInModel as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return {"schema": SCHEMA, "tree": tree_to_dict(tree)}

    @app.get("/model")
    def get_model():
        session = state.session
        if session.last_model is None:
            raise HTTPException(status_code=409, detail="no model available")
        return {
            "schema": SCHEMA,
            "shown": [str(a) for a in sorted_atoms(session.last_model.shown)],
        }

    @app.get("/transcript")
    def get_transcript():
        return StreamingResponse(
            iter([scenario.transcript_text(state.session)]),
            media_type="application/x-ndjson",
        )

    @app.get("/events")
    async def events(limit: int = 0, replay: bool = False):
        """Server-sent delta stream.  ``limit`` > 0 closes the stream
        after that many deltas (useful for polling clients and tests);
        ``replay`` first emits all deltas applied so far."""
        queue: asyncio.Queue = asyncio.Queue()
        if replay:
            for delta in state.deltas:
                queue.put_nowait(delta)
        state.subscribers.append(queue)

        async def stream():
            sent = 0
            try:
                while limit <= 0 or sent < limit:
                    delta = await queue.get()
                    yield f"data: {json.dumps(delta, sort_keys=True)}\n\n"
                    sent += 1
            finally:
                state.subscribers.remove(queue)

        return StreamingResponse(stream(), media_type="text/event-stream")

    return app
