import itertools

import pytest

from vertiops.errors import (
    ArithmeticOnSymbol,
    GroundingError,
    NonGroundInterval,
    UnsafeRule,
)
from vertiops.grounding import (
    GroundAtom,
    GroundProgram,
    GroundRule,
    check_safety,
    eval_comparison,
    eval_term,
    expand_intervals,
    ground,
    ground_atom,
)
from vertiops.logic.ast import Comparison, NegLit, PosLit, Var, atom_vars
from vertiops.logic.parser import parse_program
from vertiops.logic.printer import render_atom
from vertiops.oracle import brute_force_answer_sets
from vertiops.engine import answer_sets


def facts_of(text):
    rule = parse_program(text).rules[0]
    return [render_atom(r.head) for r in expand_intervals(rule)]


def test_interval_expansion_basic():
    assert facts_of("uatm(1..3).") == ["uatm(1)", "uatm(2)", "uatm(3)"]


def test_interval_singleton():
    assert facts_of("p(2..2).") == ["p(2)"]


def test_interval_empty():
    assert facts_of("p(3..1).") == []


def test_interval_corridor_length():
    assert len(facts_of("edge_range(7, 6, 1..22).")) == 22


def test_interval_cross_product():
    assert len(facts_of("p(1..2, 1..3).")) == 6


def test_interval_with_variable_bound():
    with pytest.raises(NonGroundInterval):
        expand_intervals(parse_program("p(1..N).").rules[0])


def test_interval_outside_fact():
    with pytest.raises(GroundingError):
        expand_intervals(parse_program("q(X) :- p(1..3, X).").rules[0])


def test_unsafe_negation():
    result = check_safety(parse_program("q(X) :- not p(X).").rules[0])
    assert not result.ok
    assert result.unsafe == frozenset({"X"})


def test_unsafe_head():
    result = check_safety(parse_program("q(X, Y) :- p(X).").rules[0])
    assert result.unsafe == frozenset({"Y"})


def test_projected_negation_is_safe():
    text = ("landing_request(A, T+1, V) :- not target(A, T+1, _), "
            "target(A, T, V), loc(A, T+1, U, V, WP), V == 6, "
            "covered_wp(U, V, TM, WP).")
    assert check_safety(parse_program(text).rules[0]).ok


def test_assignment_guard_binds_variable():
    text = "n(N) :- N = #count{A: p(A)}."
    assert check_safety(parse_program(text).rules[0]).ok


def test_corpus_is_safe(corpus):
    for text in corpus:
        for rule in parse_program(text).rules:
            assert check_safety(rule).ok, str(rule)


def test_ground_single_substitution():
    gp = ground(parse_program("p(1). q(X) :- p(X)."))
    nonfacts = [r for r in gp.rules if r.pos]
    assert len(nonfacts) == 1
    assert str(nonfacts[0]) == "q(1) :- p(1)."


def test_ground_unsafe_rule_raises():
    with pytest.raises(UnsafeRule):
        ground(parse_program("q(X) :- not p(X)."))


def test_ground_arithmetic_chain():
    gp = ground(parse_program("step(1..3). s(1). s(T+1) :- s(T), step(T+1)."))
    chained = [r for r in gp.rules if r.pos]
    heads = sorted(str(r.head) for r in chained)
    assert heads == ["s(2)", "s(3)"]


def test_ground_arithmetic_on_symbol():
    with pytest.raises(ArithmeticOnSymbol):
        ground(parse_program("p(a). q(X+1) :- p(X)."))


def test_comparisons_resolved_away():
    gp = ground(parse_program("p(1..5). q(X) :- p(X), X <= 2."))
    q_rules = [r for r in gp.rules if r.head.predicate == "q"]
    assert sorted(str(r.head) for r in q_rules) == ["q(1)", "q(2)"]
    assert gp.stats["comparison_rejected"] == 3


def test_comparison_accounting():
    gp = ground(parse_program("p(1..4). r(X, Y) :- p(X), p(Y), X < Y."))
    r_rules = [r for r in gp.rules if r.head.predicate == "r"]
    assert len(r_rules) == 6
    # Every tried substitution either survived or was rejected by the
    # comparison; nothing else filtered this rule.
    assert gp.stats["comparison_rejected"] + len(r_rules) >= 16 - 10


def test_upper_bound_prunes_underivable():
    gp = ground(parse_program("p(1). q(X) :- p(X), r(X)."))
    assert all(r.head.predicate != "q" for r in gp.rules)


def test_covered_agent_instances(env_text, agent_text, query_texts):
    gp = ground(parse_program(env_text + agent_text + query_texts[0]))
    agents = {
        r.head.args[0]
        for r in gp.rules
        if r.head is not None and r.head.predicate == "covered_agent"
    }
    # Agent 4 sits at waypoint 14 of corridor (7, 6), inside the
    # coverage gap, so no instance mentions it.
    assert agents == {1, 2, 3, 5, 6}


def test_deterministic_rule_order(env_text, agent_text, query_texts):
    text = env_text + agent_text + query_texts[0]
    first = ground(parse_program(text))
    second = ground(parse_program(text))
    assert [str(r) for r in first.rules] == [str(r) for r in second.rules]
    assert first.atoms == second.atoms


def _naive_ground(text):
    """Cross-product grounding over every constant in the program, with
    no derivability pruning.  Small inputs only."""
    program = parse_program(text)
    constants = set()
    rules = []
    for rule in program.rules:
        for expanded in expand_intervals(rule):
            rules.append(expanded)
            if expanded.is_fact:
                constants.update(
                    eval_term(t, {}) for t in expanded.head.args
                )
    ground_rules = []
    atoms = set()
    for idx, rule in enumerate(rules):
        names = sorted({
            v.name
            for el in ([PosLit(rule.head)] if rule.head else []) + list(rule.body)
            for v in (
                atom_vars(el.atom) if isinstance(el, (PosLit, NegLit))
                else []
            )
        })
        for combo in itertools.product(sorted(constants, key=repr),
                                       repeat=len(names)):
            subst = dict(zip(names, combo))
            ok = True
            pos, neg = [], []
            for el in rule.body:
                if isinstance(el, Comparison):
                    if not eval_comparison(el, subst):
                        ok = False
                        break
                elif isinstance(el, PosLit):
                    pos.append(ground_atom(el.atom, subst))
                else:
                    neg.append(ground_atom(el.atom, subst))
            if not ok:
                continue
            head = ground_atom(rule.head, subst) if rule.head else None
            ground_rules.append(GroundRule(head, tuple(pos), tuple(neg),
                                           (), (idx, ())))
            atoms.update(pos + neg + ([head] if head else []))
    universe = sorted(atoms, key=lambda a: a.sort_key)
    return GroundProgram(ground_rules, universe, [],
                         [None] * len(ground_rules))


@pytest.mark.parametrize("text", [
    "p(1). q(X) :- p(X), not r(X).",
    "p(1..2). r(2). q(X) :- p(X), not r(X). :- q(1), q(2).",
    "a :- not b. b :- not a. p(1). q(X) :- p(X), a.",
    "p(1..3). q(X) :- p(X), X != 2. r(X) :- q(X), not s(X). s(1).",
])
def test_grounding_matches_naive_cross_product(text):
    engine_models = {
        frozenset(m.atoms) for m in answer_sets(ground(parse_program(text)),
                                                limit=0).models
    }
    naive_models = set(brute_force_answer_sets(_naive_ground(text)))
    assert engine_models == naive_models
