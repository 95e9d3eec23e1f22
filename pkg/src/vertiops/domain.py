"""Typed model of the UATM network and agents.

Bridges the structured config document (YAML) and the logic layer: the
network and fleet are validated dataclasses, `emit_facts` lowers them to
the fact/rule program the engine consumes, `read_facts` lifts such a
program back, and `read_notices` types solver output.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import yaml

from .errors import ShapeError, ValidationError
from .grounding import GroundAtom, expand_intervals
from .logic.ast import Atom, Comparison, IntConst, PosLit, Program, Rule, Var
from .logic.parser import parse_program

PlanLeg = tuple  # (from vertiport, to vertiport)


@dataclass(frozen=True)
class Corridor:
    frm: int
    to: int
    length: int  # waypoints run 1..length

    @property
    def key(self) -> tuple:
        return (self.frm, self.to)


@dataclass(frozen=True)
class CoverageSegment:
    frm: int
    to: int
    uatm: int
    bound: tuple  # ('all', None) | ('max', k) | ('min', k)

    def covers(self, waypoint: int) -> bool:
        kind, k = self.bound
        if kind == "all":
            return True
        if kind == "max":
            return waypoint <= k
        return waypoint >= k


@dataclass
class Network:
    vertiports: frozenset
    uatms: frozenset
    corridors: dict  # (frm, to) -> Corridor
    coverage: list  # CoverageSegment
    vertiport_cover: dict  # uatm -> frozenset of vertiports
    candidates: dict  # vertiport -> fallback vertiport
    step_horizon: int

    def owning_uatm(self, vp: int) -> Optional[int]:
        owners = [u for u, vps in sorted(self.vertiport_cover.items()) if vp in vps]
        return owners[0] if owners else None

    def covering_uatms(self, corridor: tuple, waypoint: int) -> list:
        return sorted(
            {
                seg.uatm
                for seg in self.coverage
                if (seg.frm, seg.to) == tuple(corridor) and seg.covers(waypoint)
            }
        )


@dataclass
class AgentState:
    agent: int
    step: int
    corridor: tuple  # (frm, to)
    waypoint: int
    plan: list  # ordered PlanLegs

    @property
    def source(self) -> int:
        return self.plan[0][0]

    @property
    def target(self) -> int:
        return self.plan[-1][1]


@dataclass
class Fleet:
    declared: frozenset  # all registered agent ids
    active: list  # AgentStates with a location


@dataclass(frozen=True)
class TargetChangeNotice:
    agent: int
    step: int
    new_target: int
    appended_leg: tuple  # (old target, new target)


@dataclass
class ReadBack:
    """Typed view of a shown-atom set."""

    notices: list = field(default_factory=list)  # TargetChangeNotice
    landing_requests: list = field(default_factory=list)  # (agent, step, vp)
    covered: list = field(default_factory=list)  # (label, agent)
    residual: list = field(default_factory=list)  # unrecognized GroundAtoms


# ---------------------------------------------------------------------------
# Loading and validation
# ---------------------------------------------------------------------------

def _as_document(doc) -> dict:
    if isinstance(doc, str):
        doc = yaml.safe_load(doc)
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ValidationError(["config document must be a mapping"])
    return doc


def load_network(document) -> Network:
    doc = _as_document(document)
    problems = []

    vertiports = frozenset(doc.get("vertiports") or [])
    if not vertiports:
        problems.append("no vertiports defined")
    uatms = frozenset(doc.get("uatms") or [])
    if not uatms:
        problems.append("no uatms defined")

    corridors = {}
    for entry in doc.get("corridors") or []:
        c = Corridor(int(entry["from"]), int(entry["to"]), int(entry["length"]))
        if c.key in corridors:
            problems.append(f"duplicate corridor {c.key}")
        corridors[c.key] = c
        if c.frm not in vertiports or c.to not in vertiports:
            problems.append(f"corridor {c.key} references unknown vertiport")
        if c.length < 1:
            problems.append(f"corridor {c.key} has non-positive length")
    for key, c in corridors.items():
        rev = corridors.get((c.to, c.frm))
        if rev is None:
            problems.append(f"corridor {key} has no reverse pair")
        elif rev.length != c.length:
            problems.append(f"corridor {key} and its reverse differ in length")

    coverage = []
    for entry in doc.get("coverage") or []:
        bound_spec = entry.get("bound", "all")
        if bound_spec == "all":
            bound = ("all", None)
        elif isinstance(bound_spec, dict) and len(bound_spec) == 1:
            (kind, k), = bound_spec.items()
            if kind not in ("max", "min"):
                problems.append(f"coverage bound kind {kind!r} unknown")
                continue
            bound = (kind, int(k))
        else:
            problems.append(f"coverage bound {bound_spec!r} malformed")
            continue
        seg = CoverageSegment(int(entry["from"]), int(entry["to"]),
                              int(entry["uatm"]), bound)
        coverage.append(seg)
        corridor = corridors.get((seg.frm, seg.to))
        if corridor is None:
            problems.append(f"coverage references unknown corridor "
                            f"({seg.frm}, {seg.to})")
        elif bound[0] != "all" and not (1 <= bound[1] <= corridor.length):
            problems.append(f"coverage bound {bound[1]} outside corridor "
                            f"({seg.frm}, {seg.to}) range 1..{corridor.length}")
        if seg.uatm not in uatms:
            problems.append(f"coverage references unknown uatm {seg.uatm}")

    vertiport_cover = {}
    for u, vps in (doc.get("vertiport_cover") or {}).items():
        u = int(u)
        if u not in uatms:
            problems.append(f"vertiport_cover references unknown uatm {u}")
        bad = [v for v in vps if v not in vertiports]
        if bad:
            problems.append(f"vertiport_cover for uatm {u} references "
                            f"unknown vertiports {bad}")
        vertiport_cover[u] = frozenset(int(v) for v in vps)

    candidates = {}
    for src, dst in (doc.get("candidates") or {}).items():
        src, dst = int(src), int(dst)
        if src not in vertiports or dst not in vertiports:
            problems.append(f"candidate {src} -> {dst} references unknown vertiport")
        if src == dst:
            problems.append(f"candidate target equals source for vertiport {src}")
        candidates[src] = dst

    step_horizon = int(doc.get("step_horizon", 1))
    if step_horizon < 1:
        problems.append("step_horizon must be at least 1")

    if problems:
        raise ValidationError(problems)
    return Network(vertiports, uatms, corridors, coverage, vertiport_cover,
                   candidates, step_horizon)


def load_fleet(document, network: Network) -> Fleet:
    doc = _as_document(document)
    spec = doc.get("agents") or {}
    declared_spec = spec.get("declared", [])
    if isinstance(declared_spec, int):
        declared = frozenset(range(1, declared_spec + 1))
    else:
        declared = frozenset(int(a) for a in declared_spec)

    problems = []
    active = []
    for entry in spec.get("active") or []:
        state = AgentState(
            agent=int(entry["id"]),
            step=int(entry.get("step", 1)),
            corridor=tuple(int(x) for x in entry["corridor"]),
            waypoint=int(entry["waypoint"]),
            plan=[tuple(int(x) for x in leg) for leg in entry["plan"]],
        )
        problems.extend(validate_agent(state, network))
        if state.agent not in declared:
            problems.append(f"agent {state.agent} is active but not declared")
        active.append(state)
    if problems:
        raise ValidationError(problems)
    return Fleet(declared, active)


def validate_agent(state: AgentState, network: Network) -> list:
    problems = []
    corridor = network.corridors.get(tuple(state.corridor))
    if corridor is None:
        problems.append(f"agent {state.agent}: unknown corridor {state.corridor}")
    elif not 1 <= state.waypoint <= corridor.length:
        problems.append(
            f"agent {state.agent}: waypoint {state.waypoint} outside "
            f"1..{corridor.length}"
        )
    if not state.plan:
        problems.append(f"agent {state.agent}: empty plan")
        return problems
    for a, b in zip(state.plan, state.plan[1:]):
        if a[1] != b[0]:
            problems.append(f"agent {state.agent}: plan legs {a} and {b} do not chain")
    if tuple(state.corridor) not in {tuple(l) for l in state.plan}:
        problems.append(
            f"agent {state.agent}: located on corridor {state.corridor} "
            f"which is not a plan leg"
        )
    for leg in state.plan:
        if tuple(leg) not in network.corridors:
            problems.append(f"agent {state.agent}: plan leg {leg} is not a corridor")
    return problems


def load_config(document) -> tuple:
    doc = _as_document(document)
    network = load_network(doc)
    fleet = load_fleet(doc, network)
    return network, fleet


# ---------------------------------------------------------------------------
# Emission to the logic layer
# ---------------------------------------------------------------------------

def _range_facts(pred: str, ids) -> list:
    """Compress a contiguous id set to one interval fact, else enumerate."""
    ids = sorted(ids)
    if not ids:
        return []
    if ids == list(range(ids[0], ids[-1] + 1)) and len(ids) > 1:
        return [f"{pred}({ids[0]}..{ids[-1]})."]
    return [f"{pred}({i})." for i in ids]


def emit_facts_text(network: Network, fleet: Fleet, step: int = 1,
                    step_horizon: Optional[int] = None,
                    extra_facts=()) -> str:
    lines = []
    lines += _range_facts("uatm", network.uatms)
    lines += _range_facts("agent", fleet.declared)
    lines += _range_facts("vp", network.vertiports)
    for key in sorted(network.corridors):
        lines.append(f"edge({key[0]}, {key[1]}).")
    for u in sorted(network.vertiport_cover):
        for v in sorted(network.vertiport_cover[u]):
            lines.append(f"cover({u}, {v}).")
    for key in sorted(network.corridors):
        c = network.corridors[key]
        lines.append(f"edge_range({c.frm}, {c.to}, 1..{c.length}).")
    for seg in network.coverage:
        head = f"covered_wp({seg.frm}, {seg.to}, {seg.uatm}, P)"
        body = f"edge_range({seg.frm}, {seg.to}, P)"
        kind, k = seg.bound
        if kind == "max":
            body += f", P <= {k}"
        elif kind == "min":
            body += f", P >= {k}"
        lines.append(f"{head} :- {body}.")
    for src in sorted(network.candidates):
        lines.append(f"candidate_vp({src}, {network.candidates[src]}).")
    horizon = step_horizon if step_horizon is not None else network.step_horizon
    lines.append(f"step(1..{horizon}).")
    for st in sorted(fleet.active, key=lambda s: s.agent):
        u, v = st.corridor
        lines.append(f"loc({st.agent}, {step}, {u}, {v}, {st.waypoint}).")
    for st in sorted(fleet.active, key=lambda s: s.agent):
        for u, v in st.plan:
            lines.append(f"plan({st.agent}, {step}, {u}, {v}).")
    lines.append(
        f"source(A, {step}, U) :- agent(A), plan(A, {step}, U, V), "
        f"not plan(A, {step}, _, U)."
    )
    lines.append(
        f"target(A, {step}, V) :- agent(A), plan(A, {step}, U, V), "
        f"not plan(A, {step}, V, _)."
    )
    lines.extend(extra_facts)
    return "\n".join(lines) + "\n"


def emit_facts(network: Network, fleet: Fleet, step: int = 1,
               step_horizon: Optional[int] = None, extra_facts=()) -> Program:
    return parse_program(
        emit_facts_text(network, fleet, step, step_horizon, extra_facts)
    )


# ---------------------------------------------------------------------------
# Lifting facts back into the typed layer
# ---------------------------------------------------------------------------

def read_facts(program: Program) -> tuple:
    """Inverse of emit_facts: rebuild (Network, Fleet) from a program of
    environment/agent facts and coverage rules."""
    by_pred = {}
    coverage = []
    for rule in program.rules:
        if rule.is_fact:
            for fact in expand_intervals(rule):
                args = tuple(
                    t.value if isinstance(t, IntConst) else t.name
                    for t in fact.head.args
                )
                by_pred.setdefault(fact.head.predicate, set()).add(args)
        elif rule.head is not None and rule.head.predicate == "covered_wp":
            seg = _segment_of_rule(rule)
            if seg is not None:
                coverage.append(seg)

    def col(pred, pos=0):
        return {args[pos] for args in by_pred.get(pred, ())}

    corridors = {
        (u, v): Corridor(u, v, max(p for (eu, ev, p) in by_pred.get("edge_range", ())
                                   if (eu, ev) == (u, v)))
        for (u, v, _p) in by_pred.get("edge_range", ())
    }
    network = Network(
        vertiports=frozenset(col("vp")),
        uatms=frozenset(col("uatm")),
        corridors=corridors,
        coverage=coverage,
        vertiport_cover=_group(by_pred.get("cover", ())),
        candidates={u: v for (u, v) in by_pred.get("candidate_vp", ())},
        step_horizon=max(col("step"), default=1),
    )

    locs = {a: (u, v, wp, t) for (a, t, u, v, wp) in by_pred.get("loc", ())}
    legs_by_agent = {}
    for (a, _t, u, v) in by_pred.get("plan", ()):
        legs_by_agent.setdefault(a, set()).add((u, v))
    active = []
    for a in sorted(locs):
        u, v, wp, t = locs[a]
        active.append(AgentState(
            agent=a, step=t, corridor=(u, v), waypoint=wp,
            plan=_chain_legs(legs_by_agent.get(a, set())),
        ))
    fleet = Fleet(frozenset(col("agent")), active)
    return network, fleet


def _segment_of_rule(rule: Rule) -> Optional[CoverageSegment]:
    head = rule.head
    if len(head.args) != 4:
        return None
    frm, to, uatm = (t.value for t in head.args[:3] if isinstance(t, IntConst))
    bound = ("all", None)
    for el in rule.body:
        if isinstance(el, Comparison) and isinstance(el.right, IntConst):
            kind = {"<=": "max", ">=": "min"}.get(el.op)
            if kind is None:
                return None
            bound = (kind, el.right.value)
    return CoverageSegment(frm, to, uatm, bound)


def _group(pairs) -> dict:
    out = {}
    for u, v in pairs:
        out.setdefault(u, set()).add(v)
    return {u: frozenset(vs) for u, vs in out.items()}


def _chain_legs(legs: set) -> list:
    """Order corridor legs into the unique chain they form."""
    if not legs:
        return []
    froms = {u for (u, _v) in legs}
    tos = {v for (_u, v) in legs}
    starts = froms - tos
    start = min(starts) if starts else min(froms)
    by_from = {u: (u, v) for (u, v) in legs}
    ordered, cur = [], start
    while cur in by_from and len(ordered) < len(legs):
        leg = by_from[cur]
        ordered.append(leg)
        cur = leg[1]
    return ordered


# ---------------------------------------------------------------------------
# Diagnostics and solver-output typing
# ---------------------------------------------------------------------------

def coverage_gaps(network: Network) -> list:
    """Maximal waypoint sub-ranges covered by no segment, per corridor."""
    gaps = []
    for key in sorted(network.corridors):
        corridor = network.corridors[key]
        segs = [s for s in network.coverage if (s.frm, s.to) == key]
        uncovered = [
            wp for wp in range(1, corridor.length + 1)
            if not any(s.covers(wp) for s in segs)
        ]
        run_start = None
        prev = None
        for wp in uncovered + [None]:
            if wp is not None and prev is not None and wp == prev + 1:
                prev = wp
                continue
            if run_start is not None:
                gaps.append((key, (run_start, prev)))
            run_start, prev = wp, wp
    return gaps


_INT_PREDS = {
    ("target_change", 2),
    ("new_plan", 4),
    ("landing_request", 3),
}


def read_notices(shown) -> ReadBack:
    """Lift shown atoms into typed values; unrecognized atoms are
    returned unparsed in `residual`."""
    back = ReadBack()
    changes = {}
    plans = {}
    for atom in sorted(shown, key=lambda a: a.sort_key):
        key = (atom.predicate, len(atom.args))
        if key in _INT_PREDS or (
            atom.predicate.startswith("covered_by_") and len(atom.args) == 1
        ):
            if not all(isinstance(a, int) for a in atom.args):
                raise ShapeError(f"non-integer argument in {atom}")
        if key == ("target_change", 2):
            changes[(atom.args[0], atom.args[1])] = atom
        elif key == ("new_plan", 4):
            a, t, v, v1 = atom.args
            plans[(a, t)] = (v, v1)
        elif key == ("landing_request", 3):
            back.landing_requests.append(tuple(atom.args))
        elif atom.predicate.startswith("covered_by_") and len(atom.args) == 1:
            label = atom.predicate[len("covered_by_"):]
            back.covered.append((label, atom.args[0]))
        else:
            back.residual.append(atom)
    for (a, t), atom in sorted(changes.items()):
        leg = plans.get((a, t))
        if leg is None:
            back.residual.append(atom)
            continue
        back.notices.append(
            TargetChangeNotice(agent=a, step=t, new_target=leg[1], appended_leg=leg)
        )
    return back
