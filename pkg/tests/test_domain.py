import copy

import pytest
import yaml

from vertiops.domain import (
    coverage_gaps,
    emit_facts,
    emit_facts_text,
    load_config,
    load_network,
    read_facts,
    read_notices,
)
from vertiops.engine import well_founded
from vertiops.errors import ShapeError, ValidationError
from vertiops.grounding import GroundAtom, ground
from vertiops.logic.parser import parse_program


@pytest.fixture()
def doc(config_text):
    return yaml.safe_load(config_text)


@pytest.fixture()
def loaded(config_text):
    return load_config(config_text)


# -- loading and validation --------------------------------------------------

def test_fixture_shape(loaded):
    network, fleet = loaded
    assert network.vertiports == frozenset(range(1, 8))
    assert network.uatms == frozenset({1, 2, 3})
    assert len(network.corridors) == 12
    assert len(network.coverage) == 20
    assert len(network.candidates) == 5
    assert network.step_horizon == 3
    assert fleet.declared == frozenset(range(1, 21))
    assert len(fleet.active) == 6


def test_empty_document():
    with pytest.raises(ValidationError) as err:
        load_network({})
    assert any("vertiport" in p for p in err.value.problems)


def test_unpaired_corridor(doc):
    doc["corridors"] = [
        c for c in doc["corridors"] if (c["from"], c["to"]) != (7, 6)
    ]
    with pytest.raises(ValidationError) as err:
        load_network(doc)
    assert any("reverse" in p for p in err.value.problems)


def test_all_problems_reported(doc):
    doc["candidates"][6] = 6
    doc["coverage"][0]["bound"] = {"max": 99}
    with pytest.raises(ValidationError) as err:
        load_network(doc)
    assert len(err.value.problems) >= 2


def test_broken_plan_chain(doc):
    doc["agents"]["active"][0]["plan"] = [[4, 3], [7, 6]]
    with pytest.raises(ValidationError) as err:
        load_config(doc)
    assert any("chain" in p for p in err.value.problems)


def test_waypoint_out_of_range(doc):
    doc["agents"]["active"][0]["waypoint"] = 99
    with pytest.raises(ValidationError):
        load_config(doc)


def test_agent_derived_source_target(loaded):
    _network, fleet = loaded
    four = next(s for s in fleet.active if s.agent == 4)
    assert four.source == 4
    assert four.target == 6


# -- emission ----------------------------------------------------------------

def test_emit_contains_expected_facts(loaded):
    text = emit_facts_text(*loaded)
    assert "candidate_vp(6, 5)." in text
    assert "loc(6, 1, 7, 6, 3)." in text
    assert "plan(6, 1, 7, 6)." in text
    assert "uatm(1..3)." in text
    assert "step(1..3)." in text


def test_emit_statement_census(loaded):
    # 58 environment statements plus 6 loc, 13 plan legs and the two
    # source/target derivation rules.
    program = parse_program(emit_facts_text(*loaded))
    assert len(program.rules) == 79


def test_emit_empty_fleet(loaded):
    network, fleet = loaded
    fleet.active = []
    text = emit_facts_text(network, fleet)
    assert "loc(" not in text
    assert "plan(A" in text  # derivation rules still present
    assert "candidate_vp(6, 5)." in text


def test_typed_source_target_match_engine(loaded):
    network, fleet = loaded
    interp = well_founded(ground(emit_facts(network, fleet)))
    derived = {
        a.predicate: None for a in interp.true_set
    }
    sources = {
        a.args[0]: a.args[2]
        for a in interp.true_set if a.predicate == "source"
    }
    targets = {
        a.args[0]: a.args[2]
        for a in interp.true_set if a.predicate == "target"
    }
    assert "source" in derived and "target" in derived
    for state in fleet.active:
        assert sources[state.agent] == state.source
        assert targets[state.agent] == state.target


def test_round_trip(loaded):
    network, fleet = loaded
    program = parse_program(emit_facts_text(network, fleet))
    network2, fleet2 = read_facts(program)
    assert network2.vertiports == network.vertiports
    assert network2.corridors == network.corridors
    assert sorted(map(str, network2.coverage)) == sorted(map(str, network.coverage))
    assert network2.vertiport_cover == network.vertiport_cover
    assert network2.candidates == network.candidates
    assert network2.step_horizon == network.step_horizon
    assert fleet2.declared == fleet.declared
    for a, b in zip(fleet.active, fleet2.active):
        assert (a.agent, a.step, a.corridor, a.waypoint, a.plan) == \
            (b.agent, b.step, b.corridor, b.waypoint, b.plan)
    # Re-emission is a fixed point.
    assert emit_facts_text(network2, fleet2) == emit_facts_text(network, fleet)


# -- diagnostics -------------------------------------------------------------

def test_coverage_gaps(loaded):
    network, _fleet = loaded
    gaps = dict(coverage_gaps(network))
    assert gaps[(7, 6)] == (13, 16)
    assert gaps[(6, 7)] == (6, 9)
    assert gaps[(6, 5)] == (8, 9)
    assert gaps[(5, 6)] == (7, 8)
    assert (7, 5) not in gaps
    assert (5, 4) not in gaps


def test_gap_contains_agent_4(loaded):
    network, fleet = loaded
    four = next(s for s in fleet.active if s.agent == 4)
    lo, hi = dict(coverage_gaps(network))[four.corridor]
    assert lo <= four.waypoint <= hi
    assert network.covering_uatms(four.corridor, four.waypoint) == []


# -- reading solver output ---------------------------------------------------

def _atoms(strings):
    out = []
    for s in strings:
        name, rest = s.split("(", 1)
        args = tuple(int(x) for x in rest.rstrip(")").split(","))
        out.append(GroundAtom(name, args))
    return out


def test_read_notices_retarget_stage(goldens):
    stage = next(s for s in goldens["stages"] if s["name"] == "retarget")
    back = read_notices(_atoms(stage["shown"]))
    assert len(back.notices) == 5
    assert all(n.new_target == 5 for n in back.notices)
    assert {n.agent for n in back.notices} == {1, 2, 3, 5, 6}
    assert all(n.appended_leg == (6, 5) for n in back.notices)
    # relayed/1 and target_change_request/2 are not lifted predicates.
    assert {a.predicate for a in back.residual} == {
        "relayed", "target_change_request",
    }


def test_read_notices_landing_stage(goldens):
    stage = next(s for s in goldens["stages"] if s["name"] == "landing")
    back = read_notices(_atoms(stage["shown"]))
    assert len(back.notices) == 6
    assert any(n == (4, 3, 5) for n in
               ((n.agent, n.step, n.new_target) for n in back.notices))
    assert back.landing_requests == [(4, 2, 6)]
    assert "vp6_heading_agent_number(6)" in [str(a) for a in back.residual]


def test_read_notices_empty():
    back = read_notices([])
    assert back.notices == [] and back.residual == []


def test_read_notices_covered_labels(goldens):
    stage = next(s for s in goldens["stages"] if s["name"] == "find")
    back = read_notices(_atoms(stage["shown"]))
    assert ("uatm2", 1) in back.covered
    assert ("other", 3) in back.covered


def test_read_notices_shape_error():
    with pytest.raises(ShapeError):
        read_notices([GroundAtom("target_change", (1, "x"))])
