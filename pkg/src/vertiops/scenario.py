"""Stepped closure episodes: build query programs, solve, relay, apply.

A closure opens an *episode*: the session snapshots its agents as a base
fact program, runs the find query (which agents head to the closed
vertiport, and under whose coverage), then the retarget query (reroute
them to the candidate vertiport).  Later landing requests extend the
same episode program, so an agent whose target was already changed no
longer triggers a request.  Relay messages between UATMs travel through
per-UATM FIFO queues with a one-step delivery latency.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from string import Template
from typing import Optional

from .domain import (
    AgentState,
    Fleet,
    Network,
    TargetChangeNotice,
    emit_facts_text,
    read_notices,
    validate_agent,
)
from .engine import SolveReport, answer_sets, sorted_atoms
from .errors import (
    HorizonExceeded,
    NoEpisode,
    UnknownAgent,
    UnknownVertiport,
    ValidationError,
    WaypointOutOfRange,
)
from .grounding import ground
from .logic.parser import parse_program

RELAY_LATENCY = 1

FIND_TEMPLATE = Template("""\
covered_agent(A, TM) :- loc(A, T, U, V, WP), covered_wp(U, V, TM, WP), target(A, T, V1), V1 == $vp.
covered_by_uatm$u(A) :- covered_agent(A, $u).
covered_by_other(A) :- loc(A, T, U, V, _), covered_agent(A, TM), TM != $u.

trigger_query :- covered_agent(A, TM).
covered :- 1 <= #count{A: covered_by_uatm$u(A); A:covered_by_other(A)}.
:- trigger_query, not covered.

#show loc/5.
#show covered_by_uatm$u/1.
#show covered_by_other/1.
""")

RETARGET_TEMPLATE = Template("""\
relayed(A) :- covered_by_uatm$u(A).
relayed(A) :- covered_by_other(A).

new_plan(A, T+1, V, V1) :- plan(A, T, U, V), target(A, T, V), V == $vp, relayed(A), candidate_vp(V, V1), step(T+1), not new_plan(A, T, V, V1).
target_change_request(A, T) :- relayed(A), new_plan(A, T, V, V1).

plan(A, T+1, V, V1) :- plan(A, T, U, V), target(A, T, V), new_plan(A, T+1, V, V1), step(T+1).
plan(A, T+1, U, V) :- plan(A, T, U, V), step(T+1).

target_change(A, T) :- plan(A, T, U, V), new_plan(A, T, U, V), target_change_request(A, T).
:- not target_change(A, T), new_plan(A, T, U, V), target_change_request(A, T).
:- relayed(A), not target_change(A, _).

#show relayed/1.
#show new_plan/4.
#show target_change_request/2.
#show target_change/2.
""")

LANDING_TEMPLATE = Template("""\
vp${vp}_heading_agent_number(N) :- N = #count{A:target(A, T, V), V==$vp}.

loc($agent, $locstep, $cu, $cv, $wp).
landing_request(A, T+1, V) :- not target(A, T+1, _), target(A, T, V), loc(A, T+1, U, V, WP), V == $vp, covered_wp(U, V, TM, WP).

new_plan(A, T+1, V, V1) :- plan(A, T, U, V), landing_request(A, T, V), candidate_vp(V, V1), step(T+1), not new_plan(A, T, V, V1).
plan(A, T+1, V, V1) :- plan(A, T, U, V), landing_request(A, T, V), new_plan(A, T+1, V, V1), step(T+1).

target_change_request(A, T+1) :- landing_request(A, T, V), new_plan(A, T+1, V, V1).
plan(A, T+1, V, V1) :- plan(A, T, U, V), landing_request(A, T, V), new_plan(A, T+1, V, V1), target_change_request(A, T+1), step(T+1).
:- not target_change(A, T+1), landing_request(A, T, V), step(T+1).

#show vp${vp}_heading_agent_number/1.
#show target_change_request/2.
#show target_change/2.
#show landing_request/3.
""")

RETARGET_SHOWS = [
    ("relayed", 1),
    ("new_plan", 4),
    ("target_change_request", 2),
    ("target_change", 2),
]


@dataclass(frozen=True)
class RelayMessage:
    from_uatm: int
    to_uatm: int
    kind: str  # target_change_request | closure_notice | manager_reply
    payload: tuple
    enqueued_at_step: int


@dataclass
class Episode:
    """One closure and everything solved against its base snapshot."""

    vp: int
    uatm: int
    base_step: int
    program_text: str  # accumulated facts + queries
    materialized: list  # target facts asserted once notices are applied
    shows: list  # (predicate, arity) projection for the current stage


@dataclass
class ClosureOutcome:
    vp: int
    already_closed: bool
    found_own: list  # agents covered by the closing uatm itself
    found_other: list  # agents found through other uatms
    notices: list  # TargetChangeNotice
    find_report: SolveReport
    retarget_report: SolveReport
    diagnostics: list = field(default_factory=list)

    @property
    def satisfiable(self) -> bool:
        return self.retarget_report.satisfiable


@dataclass
class LandingOutcome:
    agent: int
    requests: list  # (agent, step, vp)
    notices: list
    report: SolveReport
    diagnostics: list = field(default_factory=list)


@dataclass
class Session:
    network: Network
    agents: dict  # agent-id -> AgentState
    declared: frozenset
    current_step: int = 1
    closed_vertiports: set = field(default_factory=set)
    relay_queues: dict = field(default_factory=dict)  # uatm -> [RelayMessage]
    event_log: list = field(default_factory=list)
    episode: Optional[Episode] = None
    last_report: Optional[SolveReport] = None
    last_ground: object = None
    last_model: object = None
    transcript: list = field(default_factory=list)

    @property
    def fleet(self) -> Fleet:
        return Fleet(self.declared,
                     [self.agents[a] for a in sorted(self.agents)])

    def log(self, kind: str, **data):
        record = {"kind": kind, "step": self.current_step}
        record.update(data)
        self.event_log.append(record)
        return record


def new_session(network: Network, fleet: Fleet) -> Session:
    problems = []
    for state in fleet.active:
        problems.extend(validate_agent(state, network))
    if problems:
        raise ValidationError(problems)
    return Session(
        network=network,
        agents={s.agent: s for s in fleet.active},
        declared=fleet.declared,
        relay_queues={u: [] for u in sorted(network.uatms)},
    )


def _solve(session: Session, text: str, shows=None) -> SolveReport:
    gp = ground(parse_program(text))
    report = answer_sets(gp, limit=1, shows_override=shows)
    session.last_report = report
    session.last_ground = gp
    if report.models:
        session.last_model = report.models[0]
    return report


def _horizon(session: Session) -> int:
    # Auto-extend the step range when events run past the configured one.
    return max(session.network.step_horizon, session.current_step + 1)


def _apply_notice(session: Session, notice: TargetChangeNotice):
    state = session.agents.get(notice.agent)
    if state is None:
        return
    old_target, new_target = notice.appended_leg
    if state.plan and state.plan[-1][1] == old_target:
        state.plan.append((old_target, new_target))
    if session.episode is not None:
        session.episode.materialized.append(
            f"target({notice.agent}, {notice.step}, {notice.new_target})."
        )


def close_vertiport(session: Session, vp: int) -> ClosureOutcome:
    if vp not in session.network.vertiports:
        raise UnknownVertiport(f"unknown vertiport {vp}")
    already_closed = vp in session.closed_vertiports
    session.closed_vertiports.add(vp)
    uatm = session.network.owning_uatm(vp)
    if uatm is None:
        uatm = min(session.network.uatms)
    base_step = session.current_step

    facts = emit_facts_text(
        session.network, session.fleet, step=base_step,
        step_horizon=_horizon(session),
    )
    find_text = FIND_TEMPLATE.substitute(vp=vp, u=uatm)
    find_report = _solve(session, facts + find_text)

    found_own, found_other = [], []
    if find_report.models:
        for atom in find_report.models[0].shown:
            if atom.predicate == f"covered_by_uatm{uatm}":
                found_own.append(atom.args[0])
            elif atom.predicate == "covered_by_other":
                found_other.append(atom.args[0])
    found_own.sort()
    found_other.sort()

    retarget_text = RETARGET_TEMPLATE.substitute(vp=vp, u=uatm)
    session.episode = Episode(
        vp=vp, uatm=uatm, base_step=base_step,
        program_text=facts + find_text + retarget_text,
        materialized=[], shows=list(RETARGET_SHOWS),
    )
    retarget_report = _solve(session, session.episode.program_text,
                             shows=session.episode.shows)

    diagnostics = []
    if already_closed:
        diagnostics.append(f"vertiport {vp} was already closed")
    if vp not in session.network.candidates:
        diagnostics.append(f"no candidate vertiport for {vp}")
    notices = []
    if retarget_report.models:
        notices = read_notices(retarget_report.models[0].shown).notices
    else:
        diagnostics.extend(
            f"violated: {text}" for text in retarget_report.violated_constraints
        )
    for notice in notices:
        _apply_notice(session, notice)

    # Found agents outside the closing UATM's own coverage need their
    # change requests relayed to the UATMs actually covering them.
    for agent in found_other:
        state = session.agents[agent]
        covering = session.network.covering_uatms(state.corridor, state.waypoint)
        to_uatm = covering[0] if covering else uatm
        session.relay_queues[to_uatm].append(RelayMessage(
            from_uatm=uatm, to_uatm=to_uatm, kind="target_change_request",
            payload=(agent, base_step + 1), enqueued_at_step=base_step,
        ))

    outcome = ClosureOutcome(
        vp=vp, already_closed=already_closed,
        found_own=found_own, found_other=found_other, notices=notices,
        find_report=find_report, retarget_report=retarget_report,
        diagnostics=diagnostics,
    )
    reply = (
        f"uatm {uatm} to vertiport {vp} manager: "
        f"{len(notices)} agents rerouted"
        + (f" to vertiport {session.network.candidates[vp]}"
           if vp in session.network.candidates and notices else "")
    )
    session.log("close_vertiport", vp=vp, verdict=_verdict(retarget_report),
                found=sorted(found_own + found_other),
                notices=_notice_records(notices), reply=reply)
    session.transcript.append(_stage_record(session, "find", find_report))
    session.transcript.append(_stage_record(session, "retarget", retarget_report))
    return outcome


def inject_landing_request(session: Session, agent: int, corridor,
                           waypoint: int) -> LandingOutcome:
    if session.episode is None:
        raise NoEpisode("no closure episode is active")
    if agent not in session.declared:
        raise UnknownAgent(f"unknown agent {agent}")
    corridor = tuple(corridor)
    c = session.network.corridors.get(corridor)
    if c is None:
        raise UnknownVertiport(f"unknown corridor {corridor}")
    if not 1 <= waypoint <= c.length:
        raise WaypointOutOfRange(
            f"waypoint {waypoint} outside 1..{c.length} on corridor {corridor}"
        )

    episode = session.episode
    landing_text = LANDING_TEMPLATE.substitute(
        vp=episode.vp, agent=agent, locstep=episode.base_step + 1,
        cu=corridor[0], cv=corridor[1], wp=waypoint,
    )
    episode.program_text += landing_text
    episode.shows = episode.shows + [
        (f"vp{episode.vp}_heading_agent_number", 1),
        ("landing_request", 3),
    ]
    program = episode.program_text + "\n".join(episode.materialized)
    report = _solve(session, program, shows=episode.shows)

    requests, notices, diagnostics = [], [], []
    if report.models:
        back = read_notices(report.models[0].shown)
        requests = [r for r in back.landing_requests if r[0] == agent]
        # The shown set still carries the closure stage's notices; only
        # the ones this landing produced (one step past the request) are
        # new here.
        notices = [
            n for n in back.notices
            if n.agent == agent and n.step == episode.base_step + 2
        ]
    else:
        diagnostics.extend(
            f"violated: {text}" for text in report.violated_constraints
        )
    for notice in notices:
        _apply_notice(session, notice)
    if agent in session.agents:
        state = session.agents[agent]
        state.corridor = corridor
        state.waypoint = waypoint

    outcome = LandingOutcome(agent=agent, requests=requests, notices=notices,
                             report=report, diagnostics=diagnostics)
    session.log(
        "landing_request", agent=agent, corridor=list(corridor),
        waypoint=waypoint, verdict=_verdict(report),
        requests=[list(r) for r in requests],
        notices=_notice_records(notices),
        reply=f"vertiport {episode.vp} manager: closed again, "
              f"{len(notices)} late agents rerouted",
    )
    session.transcript.append(_stage_record(session, "landing", report))
    return outcome


def advance_step(session: Session) -> list:
    if session.current_step >= session.network.step_horizon:
        raise HorizonExceeded(
            f"step horizon {session.network.step_horizon} reached"
        )
    session.current_step += 1
    delivered = []
    for uatm in sorted(session.relay_queues):
        queue = session.relay_queues[uatm]
        keep = []
        for msg in queue:
            if msg.enqueued_at_step + RELAY_LATENCY <= session.current_step:
                delivered.append(msg)
            else:
                keep.append(msg)
        session.relay_queues[uatm] = keep
    session.log("advance", delivered=[
        {"to_uatm": m.to_uatm, "kind": m.kind, "payload": list(m.payload)}
        for m in delivered
    ])
    return delivered


def reopen_vertiport(session: Session, vp: int):
    if vp not in session.network.vertiports:
        raise UnknownVertiport(f"unknown vertiport {vp}")
    session.closed_vertiports.discard(vp)
    session.log("reopen", vp=vp)


def _verdict(report: SolveReport) -> str:
    return "SATISFIABLE" if report.satisfiable else "UNSATISFIABLE"


def _notice_records(notices) -> list:
    return [
        {"agent": n.agent, "step": n.step, "new_target": n.new_target,
         "appended_leg": list(n.appended_leg)}
        for n in notices
    ]


def _stage_record(session: Session, stage: str, report: SolveReport) -> dict:
    shown = []
    if report.models:
        shown = [str(a) for a in sorted_atoms(report.models[0].shown)]
    return {
        "stage": stage,
        "step": session.current_step,
        "verdict": _verdict(report),
        "shown": shown,
        "violated": list(report.violated_constraints),
    }


def transcript_text(session: Session) -> str:
    """Deterministic line-delimited export: one record per solve stage,
    no wall-clock data."""
    return "".join(
        json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n"
        for record in session.transcript
    )


def golden_scenario(network: Network, fleet: Fleet) -> Session:
    """The bundled episode: close vertiport 6, advance one step, then a
    late landing request from agent 4 high on corridor (7, 6)."""
    session = new_session(network, fleet)
    close_vertiport(session, 6)
    advance_step(session)
    inject_landing_request(session, 4, (7, 6), 17)
    return session
