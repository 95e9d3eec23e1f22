import random

import pytest

from vertiops.engine import answer_sets
from vertiops.errors import TooLarge
from vertiops.grounding import GroundAtom, GroundProgram, GroundRule, ground
from vertiops.logic.parser import parse_program
from vertiops.oracle import brute_force_answer_sets


def solve_all(text):
    return {
        frozenset(m.atoms)
        for m in answer_sets(ground(parse_program(text)), limit=0).models
    }


def oracle_all(text):
    return set(brute_force_answer_sets(ground(parse_program(text))))


def test_constraint_kills_candidate():
    assert oracle_all("a :- not b. b :- not a. :- a.") == {frozenset({GroundAtom("b")})}


def test_unfounded_loop():
    # p never enters the universe, so the only model is empty.
    assert oracle_all("p :- p.") == {frozenset()}


def test_too_large():
    facts = " ".join(f"p({i})." for i in range(25))
    with pytest.raises(TooLarge):
        brute_force_answer_sets(ground(parse_program(facts)))


def random_ground_program(rng):
    n_atoms = rng.randint(2, 12)
    atoms = [GroundAtom(f"a{i}") for i in range(n_atoms)]
    rules = []
    for _ in range(rng.randint(1, 25)):
        body_pool = rng.sample(atoms, rng.randint(0, min(3, n_atoms)))
        split = rng.randint(0, len(body_pool))
        pos = tuple(body_pool[:split])
        neg = tuple(body_pool[split:])
        head = None if rng.random() < 0.15 else rng.choice(atoms)
        rules.append(GroundRule(head, pos, neg, (), (len(rules), ())))
    return GroundProgram(rules, atoms, [], [None] * len(rules))


def test_oracle_equivalence_randomized():
    rng = random.Random(7)
    for trial in range(250):
        gp = random_ground_program(rng)
        engine = {
            frozenset(m.atoms) for m in answer_sets(gp, limit=0).models
        }
        brute = set(brute_force_answer_sets(gp))
        assert engine == brute, f"divergence on trial {trial}"


def test_oracle_equivalence_structured():
    texts = [
        "a :- not b. b :- not a.",
        "a :- not b. b :- not a. c :- a. c :- b. :- not c.",
        "p(1..3). q(X) :- p(X), not r(X). r(2).",
        "a :- b. b :- not c. c :- not b. :- a, c.",
        "x :- not y. y :- not z. z :- not x.",
    ]
    for text in texts:
        assert solve_all(text) == oracle_all(text), text
