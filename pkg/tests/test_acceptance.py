"""Acceptance suite: one check per release criterion, each printing a
single pass/fail line so a plain `pytest -s tests/test_acceptance.py`
reads as a checklist."""
import random
import time

import pytest
import yaml

from vertiops.domain import coverage_gaps, load_config
from vertiops.engine import answer_sets
from vertiops.grounding import ground
from vertiops.logic.parser import parse_program
from vertiops.logic.printer import render
from vertiops.grounding import check_safety
from vertiops.oracle import brute_force_answer_sets
from vertiops.scenario import close_vertiport, golden_scenario, new_session, \
    transcript_text
from tests.test_oracle import random_ground_program

RETARGET_SHOWS = [("relayed", 1), ("new_plan", 4),
                  ("target_change_request", 2), ("target_change", 2)]
LANDING_SHOWS = RETARGET_SHOWS + [("vp6_heading_agent_number", 1),
                                  ("landing_request", 3)]


def check(name, ok):
    print(f"{'PASS' if ok else 'FAIL'}  {name}")
    assert ok, name


def solve(text, shows=None, limit=1):
    return answer_sets(ground(parse_program(text)), limit=limit,
                       shows_override=shows)


def shown_strs(report):
    return {str(a) for a in report.models[0].shown}


def test_golden_result_1(env_text, agent_text, query_texts, goldens):
    t0 = time.perf_counter()
    report = solve(env_text + agent_text + query_texts[0], limit=0)
    elapsed = time.perf_counter() - t0
    stage = next(s for s in goldens["stages"] if s["name"] == "find")
    ok = (
        len(report.models) == 1
        and shown_strs(report) == set(stage["shown"])
        and len(stage["shown"]) == 11
        and elapsed < 5.0
    )
    check("golden stage 1: single model, 11-atom shown set, under 5 s", ok)


def test_golden_result_2(env_text, agent_text, query_texts):
    report = solve(env_text + agent_text + query_texts[0] + query_texts[1],
                   shows=RETARGET_SHOWS)
    shown = shown_strs(report)
    agents = {1, 2, 3, 5, 6}
    ok = shown == (
        {f"relayed({a})" for a in agents}
        | {f"new_plan({a},2,6,5)" for a in agents}
        | {f"target_change_request({a},2)" for a in agents}
        | {f"target_change({a},2)" for a in agents}
    )
    check("golden stage 2: agents 1,2,3,5,6 rerouted to vertiport 5", ok)


def test_golden_result_3(env_text, agent_text, query_texts, goldens):
    report = solve(env_text + agent_text + "".join(query_texts),
                   shows=LANDING_SHOWS)
    shown = shown_strs(report)
    stage2 = solve(env_text + agent_text + query_texts[0] + query_texts[1],
                   shows=RETARGET_SHOWS)
    stage = next(s for s in goldens["stages"] if s["name"] == "landing")
    # The recorded fixture pins the full 25-atom shown set.
    ok = (
        {"landing_request(4,2,6)", "new_plan(4,3,6,5)", "target_change(4,3)",
         "vp6_heading_agent_number(6)"} <= shown
        and shown_strs(stage2) <= shown
        and shown == set(stage["shown"])
        and len(shown) == 25
    )
    check("golden stage 3: late landing request retargets agent 4", ok)


def test_oracle_equivalence():
    rng = random.Random(1234)
    divergences = 0
    for _ in range(200):
        gp = random_ground_program(rng)
        engine = {frozenset(m.atoms)
                  for m in answer_sets(gp, limit=0).models}
        if engine != set(brute_force_answer_sets(gp)):
            divergences += 1
    check("oracle equivalence on 200 randomized ground programs", divergences == 0)


def test_stability_of_golden_models(env_text, agent_text, query_texts):
    # Independent reduct / minimal-model verification of each stage's
    # model, written against the raw ground rules.
    ok = True
    for upto in (1, 2, 3):
        text = env_text + agent_text + "".join(query_texts[:upto])
        gp = ground(parse_program(text))
        model = answer_sets(gp).models[0]
        truths = model.atoms | model.hidden

        def agg_ok(agg):
            tuples = {
                el.terms for el in agg.elements
                if all(a in truths for a in el.pos)
                and not any(a in truths for a in el.neg)
            }
            return (len(tuples) == agg.guard if agg.relation == "=="
                    else agg.guard <= len(tuples))

        least = set()
        changed = True
        while changed:
            changed = False
            for rule in gp.rules:
                if rule.head is None or rule.head in least:
                    continue
                if any(a in truths for a in rule.neg):
                    continue
                if not all(agg_ok(agg) for agg in rule.aggs):
                    continue
                if all(a in least for a in rule.pos):
                    least.add(rule.head)
                    changed = True
        violated = any(
            rule.head is None
            and all(a in truths for a in rule.pos)
            and not any(a in truths for a in rule.neg)
            and all(agg_ok(agg) for agg in rule.aggs)
            for rule in gp.rules
        )
        ok = ok and least == truths and not violated
    check("stability: golden models pass independent reduct checks", ok)


def test_nonmonotonic_retraction(env_text, agent_text, query_texts):
    base = env_text + agent_text + "".join(query_texts)
    before = solve(base, shows=LANDING_SHOWS)
    after = solve(base + "\ntarget(4, 2, 5).\n", shows=LANDING_SHOWS)
    ok = (
        "landing_request(4,2,6)" in shown_strs(before)
        and "landing_request(4,2,6)" not in shown_strs(after)
    )
    check("nonmonotonicity: added target fact retracts the landing request", ok)


def test_unsat_path(config_text):
    doc = yaml.safe_load(config_text)
    del doc["candidates"][6]
    network, fleet = load_config(doc)
    session = new_session(network, fleet)
    outcome = close_vertiport(session, 6)
    report = outcome.retarget_report
    ok = (
        not report.satisfiable
        and any("target_change" in text
                for text in report.violated_constraints)
    )
    check("unsat path: missing candidate yields a named violated constraint", ok)


def test_coverage_gap_diagnostic(config_text, goldens):
    network, fleet = load_config(config_text)
    gaps = dict(coverage_gaps(network))
    stage = next(s for s in goldens["stages"] if s["name"] == "find")
    covered = {
        int(s.split("(")[1].rstrip(")"))
        for s in stage["shown"] if s.startswith("covered_by")
    }
    heading_to_6 = {s.agent for s in fleet.active if s.target == 6}
    ok = (
        gaps.get((7, 6)) == (13, 16)
        and heading_to_6 - covered == {4}
        and next(s for s in fleet.active if s.agent == 4).waypoint == 14
    )
    check("coverage gap 13..16 on corridor (7,6) explains the missed agent", ok)


def test_scenario_determinism(config_text):
    texts = set()
    for _ in range(10):
        network, fleet = load_config(config_text)
        texts.add(transcript_text(golden_scenario(network, fleet)))
    check("scenario determinism: 10 runs, byte-identical transcripts",
          len(texts) == 1)


def test_parser_corpus(corpus):
    ok = True
    for text in corpus:
        program = parse_program(text)
        reparsed = parse_program(render(program))
        ok = ok and reparsed.rules == program.rules \
            and reparsed.shows == program.shows
        ok = ok and all(check_safety(rule).ok for rule in program.rules)
    check("parser corpus: round-trip equality and rule safety", ok)
