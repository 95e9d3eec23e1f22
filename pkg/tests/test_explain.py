import pytest

from vertiops.engine import answer_sets
from vertiops.errors import NotInModel
from vertiops.explain import explain, render_tree, tree_to_dict
from vertiops.grounding import GroundAtom, ground
from vertiops.logic.parser import parse_program


@pytest.fixture(scope="module")
def closure_solution(request):
    env = request.getfixturevalue("env_text")
    agent = request.getfixturevalue("agent_text")
    queries = request.getfixturevalue("query_texts")
    gp = ground(parse_program(env + agent + queries[0] + queries[1]))
    return gp, answer_sets(gp).models[0]


@pytest.fixture(scope="module")
def full_solution(request):
    env = request.getfixturevalue("env_text")
    agent = request.getfixturevalue("agent_text")
    queries = request.getfixturevalue("query_texts")
    gp = ground(parse_program(env + agent + "".join(queries)))
    return gp, answer_sets(gp).models[0]


def leaves(tree):
    if tree.is_fact:
        yield tree
    for child in tree.children:
        yield from leaves(child)


def all_nodes(tree):
    yield tree
    for child in tree.children:
        yield from all_nodes(child)


def test_target_change_root(closure_solution):
    gp, model = closure_solution
    tree = explain(GroundAtom("target_change", (1, 2)), model, gp)
    assert "target_change(A, T) :-" in tree.rule_text
    assert [str(c.root) for c in tree.children] == [
        "plan(1,2,6,5)", "new_plan(1,2,6,5)", "target_change_request(1,2)",
    ]


def test_every_leaf_is_fact_or_absence(closure_solution):
    gp, model = closure_solution
    tree = explain(GroundAtom("target_change", (1, 2)), model, gp)
    for leaf in leaves(tree):
        assert not leaf.children
        assert leaf.rule_text.endswith(".")
    # Every node's cited rule body is satisfied by the model.
    truths = model.atoms | model.hidden
    for node in all_nodes(tree):
        assert all(a in truths for a in node.rule.pos)
        assert not any(a in truths for a in node.rule.neg)


def test_absence_leaf():
    gp = ground(parse_program("f. e :- not f. q :- not e."))
    model = answer_sets(gp).models[0]
    tree = explain(GroundAtom("q"), model, gp)
    assert tree.neg_leaves == ["e absent from answer set"]


def test_fact_is_single_leaf(closure_solution):
    gp, model = closure_solution
    tree = explain(GroundAtom("candidate_vp", (6, 5)), model, gp)
    assert tree.is_fact
    assert tree.rule_text == "candidate_vp(6, 5)."


def test_not_in_model(closure_solution):
    gp, model = closure_solution
    with pytest.raises(NotInModel):
        explain(GroundAtom("target_change", (4, 2)), model, gp)


def test_absence_leaf_folds_projection():
    # p(1,2) is derivable in principle but false in the model, so the
    # projected negation survives grounding and folds back to the
    # source predicate with a hole.
    gp = ground(parse_program(
        "f. e :- not f. p(1, 2) :- e. r(1). q(X) :- r(X), not p(X, _)."
    ))
    model = answer_sets(gp).models[0]
    tree = explain(GroundAtom("q", (1,)), model, gp)
    assert tree.neg_leaves == [
        "no instance of p(1,_) (absent from answer set)"
    ]


def test_landing_request_tree(full_solution):
    gp, model = full_solution
    tree = explain(GroundAtom("landing_request", (4, 2, 6)), model, gp)
    roots = [str(c.root) for c in tree.children]
    assert "loc(4,2,7,6,17)" in roots
    assert "covered_wp(7,6,2,17)" in roots


def test_aggregate_leaf(full_solution):
    gp, model = full_solution
    tree = explain(GroundAtom("vp6_heading_agent_number", (6,)), model, gp)
    (leaf,) = tree.agg_leaves
    assert leaf.count == 6
    assert len(leaf.witnesses) == 6


def test_depth_minimal_choice():
    gp = ground(parse_program("a. b :- a. c :- b. c :- a."))
    model = answer_sets(gp).models[0]
    tree = explain(GroundAtom("c"), model, gp)
    # The shallower derivation (straight from the fact) wins.
    assert tree.rule_text == "c :- a."


def test_tree_to_dict_shape(closure_solution):
    gp, model = closure_solution
    doc = tree_to_dict(explain(GroundAtom("target_change", (1, 2)), model, gp))
    assert doc["atom"] == "target_change(1,2)"
    assert len(doc["children"]) == 3
    assert set(doc) == {"atom", "rule", "children", "absent", "aggregates"}


def test_render_tree_indents(closure_solution):
    gp, model = closure_solution
    text = render_tree(explain(GroundAtom("target_change", (1, 2)), model, gp))
    lines = text.splitlines()
    assert lines[0].startswith("target_change(1,2)")
    assert lines[1].startswith("  ")
