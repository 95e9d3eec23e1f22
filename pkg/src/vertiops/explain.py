"""Derivation trees: justify why an atom belongs to an answer set.

Each node cites a ground rule whose head is the node atom and whose body
is satisfied by the model; positive body atoms are explained recursively,
negative body atoms become absence leaves, aggregates become leaves
carrying their witnessing tuples.  Rule choice is depth-minimal with a
deterministic tie-break on the origin rule index.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .engine import AnswerSet
from .errors import NotInModel
from .grounding import GroundAtom, GroundProgram, GroundRule


@dataclass
class AggregateLeaf:
    guard: int
    relation: str
    count: int
    witnesses: list  # distinct element tuples whose conditions hold


@dataclass
class DerivationTree:
    root: GroundAtom
    rule: GroundRule
    rule_text: str
    children: list = field(default_factory=list)
    neg_leaves: list = field(default_factory=list)  # absence descriptions
    agg_leaves: list = field(default_factory=list)

    @property
    def is_fact(self) -> bool:
        return not self.children and not self.neg_leaves and not self.agg_leaves


def absence_text(gp: GroundProgram, atom: GroundAtom) -> str:
    """Human-readable description of a negative leaf.  Projection helper
    atoms are folded back to the source predicate with `_` holes."""
    info = gp.aux_info.get(atom.predicate)
    if info is not None:
        pred, arity, kept = info
        args = ["_"] * arity
        for slot, value in zip(kept, atom.args):
            args[slot] = str(value)
        rendered = f"{pred}({','.join(args)})" if arity else pred
        return f"no instance of {rendered} (absent from answer set)"
    return f"{atom} absent from answer set"


def _agg_holds(agg, truths: frozenset) -> tuple:
    witnesses = set()
    for el in agg.elements:
        if all(a in truths for a in el.pos) and not any(a in truths for a in el.neg):
            witnesses.add(el.terms)
    count = len(witnesses)
    ok = count == agg.guard if agg.relation == "==" else agg.guard <= count
    return ok, count, sorted(witnesses)


def explain(atom: GroundAtom, model: AnswerSet, gp: GroundProgram) -> DerivationTree:
    if atom not in model.atoms and atom not in model.hidden:
        raise NotInModel(f"{atom} is not in the answer set")
    truths = frozenset(model.atoms | model.hidden)

    # Rules whose body is satisfied by the model, grouped by head.
    satisfied = {}
    for rule in gp.rules:
        if rule.head is None:
            continue
        if any(a not in truths for a in rule.pos):
            continue
        if any(a in truths for a in rule.neg):
            continue
        if not all(_agg_holds(agg, truths)[0] for agg in rule.aggs):
            continue
        satisfied.setdefault(rule.head, []).append(rule)

    # Depth of the shallowest proof per atom, by fixpoint iteration.
    depth = {}
    changed = True
    while changed:
        changed = False
        for head, rules in satisfied.items():
            for rule in rules:
                if all(a in depth for a in rule.pos):
                    d = 1 + max((depth[a] for a in rule.pos), default=-1)
                    if head not in depth or d < depth[head]:
                        depth[head] = d
                        changed = True

    def best_rule(a: GroundAtom) -> GroundRule:
        candidates = [
            r
            for r in satisfied.get(a, ())
            if all(p in depth and depth[p] < depth[a] for p in r.pos)
        ]
        if not candidates:  # depth-consistent rule always exists for model atoms
            candidates = satisfied.get(a, ())
        return min(candidates, key=lambda r: r.origin)

    def build(a: GroundAtom) -> DerivationTree:
        rule = best_rule(a)
        node = DerivationTree(root=a, rule=rule, rule_text=gp.origin_text(rule))
        node.children = [build(p) for p in rule.pos]
        node.neg_leaves = [absence_text(gp, n) for n in rule.neg]
        for agg in rule.aggs:
            _ok, count, witnesses = _agg_holds(agg, truths)
            node.agg_leaves.append(
                AggregateLeaf(agg.guard, agg.relation, count, witnesses)
            )
        return node

    if atom not in depth:
        raise NotInModel(f"{atom} has no supporting rule in the answer set")
    return build(atom)


def tree_to_dict(tree: DerivationTree) -> dict:
    return {
        "atom": str(tree.root),
        "rule": tree.rule_text,
        "children": [tree_to_dict(c) for c in tree.children],
        "absent": list(tree.neg_leaves),
        "aggregates": [
            {
                "guard": leaf.guard,
                "relation": leaf.relation,
                "count": leaf.count,
                "witnesses": [list(w) for w in leaf.witnesses],
            }
            for leaf in tree.agg_leaves
        ],
    }


def render_tree(tree: DerivationTree, indent: str = "") -> str:
    lines = [f"{indent}{tree.root}  [{tree.rule_text}]"]
    child_indent = indent + "  "
    for c in tree.children:
        lines.append(render_tree(c, child_indent))
    for n in tree.neg_leaves:
        lines.append(f"{child_indent}({n})")
    for leaf in tree.agg_leaves:
        rel = "=" if leaf.relation == "==" else leaf.relation
        lines.append(
            f"{child_indent}(count {rel} {leaf.guard}: {leaf.count} witnesses "
            f"{leaf.witnesses})"
        )
    return "\n".join(lines)
