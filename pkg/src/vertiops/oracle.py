"""Brute-force answer-set enumeration, used as a testing oracle.

Deliberately independent of the engine: it enumerates every subset of
the atom universe and keeps exactly those that are the least model of
their own reduct and violate no integrity constraint.
"""
from __future__ import annotations

from .errors import TooLarge
from .grounding import GroundProgram

_MAX_ATOMS = 20


def brute_force_answer_sets(gp: GroundProgram) -> list:
    """All stable models of gp, as frozensets of GroundAtom, in subset
    bitmask order.  Limited to universes of at most 20 atoms."""
    atoms = gp.atoms
    n = len(atoms)
    if n > _MAX_ATOMS:
        raise TooLarge(f"{n} atoms exceeds the brute-force bound of {_MAX_ATOMS}")
    index = {a: i for i, a in enumerate(atoms)}

    def agg_ok(agg, member) -> bool:
        tuples = set()
        for el in agg.elements:
            if all(member[index[a]] for a in el.pos) and not any(
                member[index[a]] for a in el.neg
            ):
                tuples.add(el.terms)
        if agg.relation == "==":
            return len(tuples) == agg.guard
        return agg.guard <= len(tuples)

    models = []
    for mask in range(1 << n):
        member = [(mask >> i) & 1 for i in range(n)]
        # Build the reduct: drop rules blocked by negation or by a false
        # aggregate, strip the remaining negative parts.
        reduct = []
        violated = False
        for rule in gp.rules:
            if any(member[index[a]] for a in rule.neg):
                continue
            if not all(agg_ok(agg, member) for agg in rule.aggs):
                continue
            if rule.head is None:
                if all(member[index[a]] for a in rule.pos):
                    violated = True
                    break
                continue
            reduct.append((index[rule.head], [index[a] for a in rule.pos]))
        if violated:
            continue
        # Least model of the positive reduct.
        least = [False] * n
        changed = True
        while changed:
            changed = False
            for head, pos in reduct:
                if not least[head] and all(least[p] for p in pos):
                    least[head] = True
                    changed = True
        if least == [bool(b) for b in member]:
            models.append(frozenset(a for a in atoms if member[index[a]]))
    return models
