"""Instantiate a Program into a variable-free GroundProgram.

The pipeline is: interval expansion on facts, safety checking, rewriting
of projected negation (``not p(..., _)``) into auxiliary existence
predicates, then rule instantiation over a derivable-atom upper bound
computed by an iterated positive-closure pass.  Comparisons and
arithmetic are evaluated during instantiation; negative literals whose
atom can never be derived are dropped as trivially true.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import (
    ArithmeticOnSymbol,
    GroundingError,
    NonGroundInterval,
    UnsafeRule,
)
from .logic.ast import (
    Aggregate,
    AggregateElement,
    Arith,
    Atom,
    Comparison,
    IntConst,
    Interval,
    NegLit,
    PosLit,
    Program,
    Rule,
    SymConst,
    Var,
    term_vars,
)
from .logic.printer import render_rule

Constant = int | str


@dataclass(frozen=True)
class GroundAtom:
    predicate: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(str(a) for a in self.args)})"

    @property
    def sort_key(self):
        return (
            self.predicate,
            len(self.args),
            tuple((0, a) if isinstance(a, int) else (1, a) for a in self.args),
        )


@dataclass(frozen=True)
class GroundAggregateElement:
    terms: tuple  # constants
    pos: tuple  # GroundAtom
    neg: tuple  # GroundAtom


@dataclass(frozen=True)
class GroundAggregate:
    guard: int
    relation: str  # '==' or '<='
    elements: tuple  # GroundAggregateElement


@dataclass(frozen=True)
class GroundRule:
    head: Optional[GroundAtom]
    pos: tuple = ()
    neg: tuple = ()
    aggs: tuple = ()
    origin: tuple = (0, ())  # (source rule index, sorted substitution items)

    def __str__(self):
        parts = [str(a) for a in self.pos]
        parts += [f"not {a}" for a in self.neg]
        for agg in self.aggs:
            rel = "=" if agg.relation == "==" else agg.relation
            parts.append(f"{agg.guard} {rel} #count{{...}}")
        body = ", ".join(parts)
        if self.head is None:
            return f":- {body}."
        if not body:
            return f"{self.head}."
        return f"{self.head} :- {body}."


@dataclass
class GroundProgram:
    rules: list
    atoms: list  # sorted universe of GroundAtom
    shows: list  # (predicate, arity) pairs
    source_rules: list  # rewritten Rules; GroundRule.origin indexes this
    aux_info: dict = field(default_factory=dict)  # aux pred -> (pred, arity, kept)
    internal_preds: frozenset = frozenset()
    stats: dict = field(default_factory=dict)

    @property
    def atom_index(self) -> dict:
        idx = getattr(self, "_atom_index", None)
        if idx is None:
            idx = {a: i for i, a in enumerate(self.atoms)}
            object.__setattr__(self, "_atom_index", idx)
        return idx

    def origin_rule(self, ground_rule: GroundRule) -> Rule:
        return self.source_rules[ground_rule.origin[0]]

    def origin_text(self, ground_rule: GroundRule) -> str:
        idx = ground_rule.origin[0]
        if 0 <= idx < len(self.source_rules):
            rule = self.source_rules[idx]
            if rule is not None:
                return render_rule(self._fold_aux(rule))
        return str(ground_rule)

    def _fold_aux(self, rule: Rule) -> Rule:
        """Render projection helper literals back in their source form,
        with `_` in the projected-away argument positions."""
        changed = False
        body = []
        for el in rule.body:
            if isinstance(el, NegLit) and el.atom.predicate in self.aux_info:
                pred, arity, kept = self.aux_info[el.atom.predicate]
                args = [Var("_", projected=True)] * arity
                for slot, term in zip(kept, el.atom.args):
                    args[slot] = term
                body.append(NegLit(Atom(pred, tuple(args))))
                changed = True
            else:
                body.append(el)
        return Rule(rule.head, tuple(body)) if changed else rule


# ---------------------------------------------------------------------------
# Interval expansion
# ---------------------------------------------------------------------------

def _interval_bound(term) -> int:
    if isinstance(term, IntConst):
        return term.value
    raise NonGroundInterval(f"interval bound {term!r} is not an integer constant")


def expand_intervals(rule: Rule) -> list:
    """Expand ``lo..hi`` arguments of a fact into the cross product of facts.

    Non-fact rules pass through unchanged; intervals are only part of the
    fragment at fact positions.
    """
    if not rule.is_fact:
        for v in _rule_terms(rule):
            if isinstance(v, Interval):
                raise GroundingError(
                    f"interval outside a fact: {render_rule(rule)}"
                )
        return [rule]
    ranges = []
    for arg in rule.head.args:
        if isinstance(arg, Interval):
            lo, hi = _interval_bound(arg.lo), _interval_bound(arg.hi)
            ranges.append([IntConst(v) for v in range(lo, hi + 1)])
        else:
            ranges.append([arg])
    out = [[]]
    for choices in ranges:
        out = [prefix + [c] for prefix in out for c in choices]
    return [Rule(Atom(rule.head.predicate, tuple(args)), ()) for args in out]


def _rule_terms(rule: Rule):
    if rule.head is not None:
        yield from rule.head.args
    for el in rule.body:
        if isinstance(el, (PosLit, NegLit)):
            yield from el.atom.args
        elif isinstance(el, Comparison):
            yield el.left
            yield el.right
        elif isinstance(el, Aggregate):
            yield el.guard
            for e in el.elements:
                yield from e.terms
                for c in e.condition:
                    if isinstance(c, (PosLit, NegLit)):
                        yield from c.atom.args
                    elif isinstance(c, Comparison):
                        yield c.left
                        yield c.right


# ---------------------------------------------------------------------------
# Safety
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SafetyResult:
    ok: bool
    unsafe: frozenset = frozenset()


def check_safety(rule: Rule) -> SafetyResult:
    """Every head / negative / comparison / guard variable must be bound by
    a positive literal of its scope.  Projected (``_``-derived) variables
    under negation are exempt; an assignment-aggregate guard binds its
    variable.  Aggregate element conditions are their own scope with the
    outer positive bindings visible.
    """
    unsafe = set()

    def scope(elements, outer_bound):
        bound = set(outer_bound)
        need = set()
        for el in elements:
            if isinstance(el, PosLit):
                bound.update(v.name for v in term_vars_of_atom(el.atom))
            elif isinstance(el, Aggregate):
                if isinstance(el.guard, Var) and el.relation == "==":
                    bound.add(el.guard.name)
        for el in elements:
            if isinstance(el, NegLit):
                need.update(
                    v.name
                    for v in term_vars_of_atom(el.atom)
                    if not v.projected
                )
            elif isinstance(el, Comparison):
                need.update(v.name for v in term_vars(el.left))
                need.update(v.name for v in term_vars(el.right))
            elif isinstance(el, Aggregate):
                if isinstance(el.guard, Var) and el.relation != "==":
                    need.add(el.guard.name)
                for elem in el.elements:
                    elem_bound, elem_need = scope(elem.condition, bound)
                    for t in elem.terms:
                        elem_need.update(v.name for v in term_vars(t))
                    unsafe.update(elem_need - elem_bound)
        return bound, need

    bound, need = scope(rule.body, set())
    if rule.head is not None:
        need.update(v.name for v in term_vars_of_atom(rule.head))
    unsafe.update(need - bound)
    if unsafe:
        return SafetyResult(False, frozenset(unsafe))
    return SafetyResult(True)


def term_vars_of_atom(atom: Atom):
    for t in atom.args:
        yield from term_vars(t)


# ---------------------------------------------------------------------------
# Projected-negation rewrite
# ---------------------------------------------------------------------------

def rewrite_projections(rules: list):
    """Replace ``not p(t, _, u)`` by ``not proj_p_101(t, u)`` with an
    auxiliary rule ``proj_p_101(X0, X2) :- p(X0, X1, X2).``

    The aux predicate asserts "some instance of p with these fixed
    arguments exists"; its negation is the projection semantics.
    """
    aux_defs = {}
    aux_rules = []
    out = []

    def aux_for(atom: Atom):
        kept = tuple(
            i
            for i, t in enumerate(atom.args)
            if not (isinstance(t, Var) and t.projected)
        )
        key = (atom.predicate, len(atom.args), kept)
        if key not in aux_defs:
            mask = "".join("1" if i in kept else "0" for i in range(len(atom.args)))
            name = f"proj_{atom.predicate}_{mask}"
            aux_defs[key] = name
            full_vars = tuple(Var(f"X{i}") for i in range(len(atom.args)))
            aux_rules.append(
                Rule(
                    Atom(name, tuple(full_vars[i] for i in kept)),
                    (PosLit(Atom(atom.predicate, full_vars)),),
                )
            )
        name = aux_defs[key]
        return Atom(name, tuple(atom.args[i] for i in kept))

    for rule in rules:
        body = []
        for el in rule.body:
            if isinstance(el, NegLit) and any(
                isinstance(t, Var) and t.projected for t in el.atom.args
            ):
                body.append(NegLit(aux_for(el.atom)))
            else:
                body.append(el)
        out.append(Rule(rule.head, tuple(body)))

    aux_info = {
        name: (pred, arity, kept)
        for (pred, arity, kept), name in aux_defs.items()
    }
    return out, aux_rules, aux_info


# ---------------------------------------------------------------------------
# Term evaluation and matching
# ---------------------------------------------------------------------------

def eval_term(t, subst) -> Constant:
    if isinstance(t, IntConst):
        return t.value
    if isinstance(t, SymConst):
        return t.name
    if isinstance(t, Var):
        return subst[t.name]
    if isinstance(t, Arith):
        left = eval_term(t.left, subst)
        right = eval_term(t.right, subst)
        if not (isinstance(left, int) and isinstance(right, int)):
            raise ArithmeticOnSymbol(
                f"arithmetic on symbolic constant: {left!r} {t.op} {right!r}"
            )
        if t.op == "+":
            return left + right
        if t.op == "-":
            return left - right
        if t.op == "*":
            return left * right
        raise GroundingError(f"unsupported arithmetic operator {t.op!r}")
    raise GroundingError(f"cannot evaluate term {t!r}")


def _term_ready(t, subst) -> bool:
    """A term can be evaluated eagerly (before matching) iff its variables
    are bound; plain unbound Vars are instead bound by matching."""
    if isinstance(t, Arith):
        return all(v.name in subst for v in term_vars(t))
    return True


_CMP = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
}


def eval_comparison(cmp: Comparison, subst) -> bool:
    return _CMP[cmp.op](eval_term(cmp.left, subst), eval_term(cmp.right, subst))


def match_atom(atom: Atom, fact_args: tuple, subst: dict):
    """Extend subst so atom instantiates to fact_args, or return None."""
    out = subst
    copied = False
    for t, val in zip(atom.args, fact_args):
        if isinstance(t, Var):
            bound = out.get(t.name, _UNSET)
            if bound is _UNSET:
                if not copied:
                    out = dict(out)
                    copied = True
                out[t.name] = val
            elif bound != val:
                return None
        elif isinstance(t, IntConst):
            if t.value != val:
                return None
        elif isinstance(t, SymConst):
            if t.name != val:
                return None
        elif isinstance(t, Arith):
            if eval_term(t, out) != val:
                return None
        else:
            raise GroundingError(f"cannot match term {t!r}")
    return out


_UNSET = object()


def ground_atom(atom: Atom, subst) -> GroundAtom:
    return GroundAtom(atom.predicate, tuple(eval_term(t, subst) for t in atom.args))


# ---------------------------------------------------------------------------
# The grounder
# ---------------------------------------------------------------------------

class _Grounder:
    def __init__(self, program: Program):
        for rule in program.rules:
            if not rule.is_fact:
                result = check_safety(rule)
                if not result.ok:
                    raise UnsafeRule(render_rule(rule), result.unsafe)

        rewritten, aux_rules, self.aux_info = rewrite_projections(program.rules)
        self.source_rules = rewritten + aux_rules
        self.shows = list(program.shows)
        self.stats = {"substitutions": 0, "comparison_rejected": 0}

        self.facts = []  # (origin index, GroundAtom)
        self.nonfacts = []  # (origin index, Rule)
        for idx, rule in enumerate(self.source_rules):
            for expanded in expand_intervals(rule):
                if expanded.is_fact:
                    self.facts.append((idx, ground_atom(expanded.head, {})))
                else:
                    self.nonfacts.append((idx, expanded))

        # Upper bound: pred key -> set of args tuples.
        self.ub = {}
        for _, ga in self.facts:
            self.ub.setdefault((ga.predicate, len(ga.args)), set()).add(ga.args)

    # -- joins ----------------------------------------------------------
    def _matches(self, atom: Atom, subst):
        for args in self.ub.get((atom.predicate, len(atom.args)), ()):
            extended = match_atom(atom, args, subst)
            if extended is not None:
                yield extended

    def _join(self, elements, subst, counting=False):
        """Yield substitutions satisfying all positive literals and
        comparisons among elements (negation and aggregates are handled
        by the caller)."""
        remaining = [
            el for el in elements if isinstance(el, (PosLit, Comparison))
        ]

        def rec(todo, subst):
            if not todo:
                if counting:
                    self.stats["substitutions"] += 1
                yield subst
                return
            # Prefer a ready comparison (cheap pruning), else the first
            # positive literal whose arithmetic arguments are bound.
            pick = None
            for i, el in enumerate(todo):
                if isinstance(el, Comparison) and all(
                    v.name in subst
                    for t in (el.left, el.right)
                    for v in term_vars(t)
                ):
                    pick = i
                    break
            if pick is None:
                for i, el in enumerate(todo):
                    if isinstance(el, PosLit) and all(
                        _term_ready(t, subst) for t in el.atom.args
                    ):
                        pick = i
                        break
            if pick is None:
                raise GroundingError(
                    "cannot order body literals: arithmetic over unbound variables"
                )
            el = todo[pick]
            rest = todo[:pick] + todo[pick + 1:]
            if isinstance(el, Comparison):
                if eval_comparison(el, subst):
                    yield from rec(rest, subst)
                elif counting:
                    self.stats["comparison_rejected"] += 1
                return
            for extended in self._matches(el.atom, subst):
                yield from rec(rest, extended)

        yield from rec(remaining, subst)

    def _ground_aggregate(self, agg: Aggregate, subst):
        """Instantiate one aggregate under subst.

        Returns (elements, guard_var_name or None).  Elements are the
        de-duplicated ground element instances whose conditions are
        instantiable over the upper bound.
        """
        seen = {}
        for element in agg.elements:
            for local in self._join(element.condition, subst):
                terms = tuple(eval_term(t, local) for t in element.terms)
                pos = tuple(
                    ground_atom(c.atom, local)
                    for c in element.condition
                    if isinstance(c, PosLit)
                )
                neg = tuple(
                    ga
                    for c in element.condition
                    if isinstance(c, NegLit)
                    for ga in [ground_atom(c.atom, local)]
                    if ga.args in self.ub.get((ga.predicate, len(ga.args)), ())
                )
                seen.setdefault((terms, pos, neg), None)
        elements = tuple(
            GroundAggregateElement(t, p, n) for (t, p, n) in sorted(
                seen, key=lambda k: (
                    tuple((0, x) if isinstance(x, int) else (1, x) for x in k[0]),
                    tuple(a.sort_key for a in k[1]),
                    tuple(a.sort_key for a in k[2]),
                )
            )
        )
        guard_var = None
        if isinstance(agg.guard, Var) and agg.guard.name not in subst:
            guard_var = agg.guard.name
        return elements, guard_var

    def _full_substitutions(self, rule: Rule, counting=False):
        """Yield (subst, ground aggregates) pairs for one rule.

        Assignment aggregates with an unbound guard variable contribute
        one substitution per feasible count value 0..|distinct tuples|.
        """
        aggs = [el for el in rule.body if isinstance(el, Aggregate)]
        for subst in self._join(rule.body, {}, counting=counting):
            results = [(subst, [])]
            for agg in aggs:
                elements, guard_var = self._ground_aggregate(agg, subst)
                expanded = []
                for s, done in results:
                    if guard_var is None:
                        guard = eval_term(agg.guard, s)
                        if not isinstance(guard, int):
                            raise GroundingError("aggregate guard must be integer")
                        expanded.append(
                            (s, done + [GroundAggregate(guard, agg.relation, elements)])
                        )
                    else:
                        distinct = len({e.terms for e in elements})
                        for n in range(distinct + 1):
                            s2 = dict(s)
                            s2[guard_var] = n
                            expanded.append(
                                (s2, done + [GroundAggregate(n, agg.relation, elements)])
                            )
                results = expanded
            for s, done in results:
                yield s, tuple(done)

    # -- fixpoint and emission ------------------------------------------
    def compute_upper_bound(self):
        changed = True
        while changed:
            changed = False
            for _, rule in self.nonfacts:
                if rule.head is None:
                    continue
                pending = [
                    ground_atom(rule.head, subst)
                    for subst, _aggs in self._full_substitutions(rule)
                ]
                for ga in pending:
                    bucket = self.ub.setdefault(
                        (ga.predicate, len(ga.args)), set()
                    )
                    if ga.args not in bucket:
                        bucket.add(ga.args)
                        changed = True

    def emit(self) -> GroundProgram:
        self.compute_upper_bound()
        instances = {}
        for idx, ga in self.facts:
            key = (idx, (), ga.sort_key)
            instances.setdefault(key, GroundRule(ga, (), (), (), origin=(idx, ())))
        for idx, rule in self.nonfacts:
            for subst, aggs in self._full_substitutions(rule, counting=True):
                neg = tuple(
                    ga
                    for el in rule.body
                    if isinstance(el, NegLit)
                    for ga in [ground_atom(el.atom, subst)]
                    if ga.args in self.ub.get((ga.predicate, len(ga.args)), ())
                )
                pos = tuple(
                    ground_atom(el.atom, subst)
                    for el in rule.body
                    if isinstance(el, PosLit)
                )
                head = ground_atom(rule.head, subst) if rule.head else None
                key = (idx, _subst_key(subst), ())
                instances.setdefault(
                    key, GroundRule(head, pos, neg, aggs, origin=key[:2])
                )
        rules = [instances[k] for k in sorted(instances)]
        atoms = sorted(
            (
                GroundAtom(pred, args)
                for (pred, _arity), argset in self.ub.items()
                for args in argset
            ),
            key=lambda a: a.sort_key,
        )
        internal = frozenset(self.aux_info)
        self.stats["rules"] = len(rules)
        self.stats["atoms"] = len(atoms)
        return GroundProgram(
            rules=rules,
            atoms=atoms,
            shows=self.shows,
            source_rules=self.source_rules,
            aux_info=self.aux_info,
            internal_preds=internal,
            stats=self.stats,
        )


def _subst_key(subst: dict) -> tuple:
    return tuple(
        (name, (0, val) if isinstance(val, int) else (1, val))
        for name, val in sorted(subst.items())
    )


def ground(program: Program) -> GroundProgram:
    return _Grounder(program).emit()


def render_ground_program(gp: GroundProgram) -> str:
    """Debug dump of a ground program in the ``.lp`` text format."""
    lines = [str(r) for r in gp.rules]
    lines.extend(f"#show {name}/{arity}." for name, arity in gp.shows)
    return "\n".join(lines) + ("\n" if lines else "")
