"""Stable-model evaluation of ground programs.

Two-phase semantics: an alternating-fixpoint well-founded model decides
as much as possible (with stratified aggregates resolved once their
condition atoms are decided), then a deterministic branch-and-check
search handles any residual unknowns, verifying each total candidate by
the reduct / minimal-model test.  Integrity constraints are compiled to
reserved marker atoms that must stay false, which lets UNSAT reports
name the violated constraint.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .errors import UndecidedDependency, UnstratifiedAggregate
from .grounding import GroundAggregate, GroundAtom, GroundProgram, GroundRule


@dataclass
class Interpretation:
    true_set: frozenset
    false_set: frozenset
    unknown_set: frozenset

    @property
    def total(self) -> bool:
        return not self.unknown_set


@dataclass(frozen=True)
class AnswerSet:
    atoms: frozenset  # public atoms true in the model
    shown: frozenset  # atoms selected by the show directives
    hidden: frozenset = frozenset()  # internal (projection helper) atoms


@dataclass
class SolveStats:
    ground_rules: int = 0
    atoms: int = 0
    branch_count: int = 0
    wall_time: float = 0.0


@dataclass
class SolveReport:
    models: list
    satisfiable: bool
    stats: SolveStats
    violated_constraints: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# Indexed program
# ---------------------------------------------------------------------------

class _Indexed:
    """Bitmask representation: real atoms get bits 0..n-1, integrity
    constraints get marker bits n..n+m-1 that are asserted false."""

    def __init__(self, gp: GroundProgram):
        self.gp = gp
        self.atoms = gp.atoms
        self.index = {a: i for i, a in enumerate(self.atoms)}
        self.n = len(self.atoms)

        self.normal = []  # (head_bit, pos_mask, neg_mask, rule_idx)
        self.with_aggs = []  # (head_bit, pos_mask, neg_mask, aggs, rule_idx)
        self.constraint_rules = {}  # marker bit position -> rule_idx
        marker = self.n
        for ri, rule in enumerate(gp.rules):
            if rule.head is None:
                head_bit = 1 << marker
                self.constraint_rules[marker] = ri
                marker += 1
            else:
                head_bit = 1 << self.index[rule.head]
            pos = self._mask(rule.pos)
            neg = self._mask(rule.neg)
            if rule.aggs:
                aggs = tuple(self._index_agg(a) for a in rule.aggs)
                self.with_aggs.append((head_bit, pos, neg, aggs, ri))
            else:
                self.normal.append((head_bit, pos, neg, ri))
        self.nbits = marker
        self.real_mask = (1 << self.n) - 1
        self.marker_mask = ((1 << self.nbits) - 1) & ~self.real_mask

    def _mask(self, atoms) -> int:
        m = 0
        for a in atoms:
            m |= 1 << self.index[a]
        return m

    def _index_agg(self, agg: GroundAggregate):
        by_terms = {}
        for el in agg.elements:
            by_terms.setdefault(el.terms, []).append(
                (self._mask(el.pos), self._mask(el.neg))
            )
        return (agg.guard, agg.relation, tuple(by_terms.values()))

    def agg_true(self, agg, model_mask: int) -> bool:
        guard, relation, groups = agg
        count = sum(
            1
            for conds in groups
            if any(
                pos & ~model_mask == 0 and neg & model_mask == 0
                for pos, neg in conds
            )
        )
        if relation == "==":
            return count == guard
        return guard <= count

    def agg_atom_mask(self, agg) -> int:
        _, _, groups = agg
        m = 0
        for conds in groups:
            for pos, neg in conds:
                m |= pos | neg
        return m

    def check_aggregate_stratification(self):
        # Predicate dependency graph: head -> every predicate in the body.
        deps = {}
        for rule in self.gp.rules:
            if rule.head is None:
                continue
            tgt = deps.setdefault(rule.head.predicate, set())
            for a in rule.pos + rule.neg:
                tgt.add(a.predicate)
            for agg in rule.aggs:
                for el in agg.elements:
                    for a in el.pos + el.neg:
                        tgt.add(a.predicate)

        def reaches(src: str, goal: str) -> bool:
            seen, stack = set(), [src]
            while stack:
                p = stack.pop()
                if p == goal:
                    return True
                if p in seen:
                    continue
                seen.add(p)
                stack.extend(deps.get(p, ()))
            return False

        for rule in self.gp.rules:
            if rule.head is None or not rule.aggs:
                continue
            for agg in rule.aggs:
                for el in agg.elements:
                    for a in el.pos + el.neg:
                        if reaches(a.predicate, rule.head.predicate):
                            raise UnstratifiedAggregate(
                                f"aggregate in rule for {rule.head.predicate} "
                                f"depends on {rule.head.predicate} via {a.predicate}"
                            )


# ---------------------------------------------------------------------------
# Well-founded model with deferred aggregates
# ---------------------------------------------------------------------------

def _lfp(rules, context: int, optimistic=()) -> int:
    """Least model of the reduct w.r.t. context.  Rules in `optimistic`
    carry aggregates that are assumed satisfiable (used only for the
    over-approximating operator)."""
    derived = 0
    changed = True
    while changed:
        changed = False
        for head, pos, neg, _ri in rules:
            if head & derived:
                continue
            if neg & context:
                continue
            if pos & ~derived:
                continue
            derived |= head
            changed = True
        for head, pos, neg, _aggs, _ri in optimistic:
            if head & derived:
                continue
            if neg & context:
                continue
            if pos & ~derived:
                continue
            derived |= head
            changed = True
    return derived


def _alternating_fixpoint(rules, pending, nbits: int):
    """Returns (true mask K, possible mask U)."""
    all_mask = (1 << nbits) - 1
    upper = all_mask
    lower = 0
    while True:
        new_lower = _lfp(rules, upper)
        new_upper = _lfp(rules, new_lower, optimistic=pending)
        if new_lower == lower and new_upper == upper:
            return lower, upper
        lower, upper = new_lower, new_upper


class _Solver:
    def __init__(self, gp: GroundProgram):
        self.ix = _Indexed(gp)
        self.ix.check_aggregate_stratification()

    def well_founded_masks(self):
        """Alternating fixpoint, resolving stratified aggregates as soon
        as their condition atoms are decided."""
        ix = self.ix
        rules = list(ix.normal)
        pending = list(ix.with_aggs)
        while True:
            lower, upper = _alternating_fixpoint(rules, pending, ix.nbits)
            decided = lower | ~upper
            progressed = False
            for entry in list(pending):
                head, pos, neg, aggs, ri = entry
                dep = 0
                for agg in aggs:
                    dep |= ix.agg_atom_mask(agg)
                if dep & ~decided:
                    continue
                pending.remove(entry)
                progressed = True
                if all(ix.agg_true(agg, lower) for agg in aggs):
                    rules.append((head, pos, neg, ri))
            if not progressed:
                return lower, upper, rules, pending

    def stable(self, candidate: int, violated: set) -> bool:
        """Reduct / minimal-model check of a total candidate (mask over
        real atoms).  Constraint markers derived by the reduct disqualify
        the candidate and are recorded for diagnostics."""
        ix = self.ix
        derived = 0
        changed = True
        while changed:
            changed = False
            for head, pos, neg, _ri in ix.normal:
                if head & derived:
                    continue
                if neg & candidate:
                    continue
                if pos & ~derived:
                    continue
                derived |= head
                changed = True
            for head, pos, neg, aggs, _ri in ix.with_aggs:
                if head & derived:
                    continue
                if neg & candidate:
                    continue
                if pos & ~derived:
                    continue
                if not all(ix.agg_true(agg, candidate) for agg in aggs):
                    continue
                derived |= head
                changed = True
        if derived & ix.marker_mask:
            violated.update(_marker_rules(ix, derived))
            return False
        return (derived & ix.real_mask) == candidate


def _marker_rules(ix: _Indexed, mask: int):
    """Ground-rule indices of the constraint markers set in mask."""
    bits = (mask & ix.marker_mask) >> ix.n
    pos = ix.n
    while bits:
        if bits & 1:
            yield ix.constraint_rules[pos]
        bits >>= 1
        pos += 1


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def well_founded(gp: GroundProgram) -> Interpretation:
    solver = _Solver(gp)
    lower, upper, _rules, _pending = solver.well_founded_masks()
    ix = solver.ix
    true_atoms, false_atoms, unknown = [], [], []
    for i, atom in enumerate(ix.atoms):
        bit = 1 << i
        if lower & bit:
            true_atoms.append(atom)
        elif not (upper & bit):
            false_atoms.append(atom)
        else:
            unknown.append(atom)
    return Interpretation(
        frozenset(true_atoms), frozenset(false_atoms), frozenset(unknown)
    )


def eval_aggregate(agg: GroundAggregate, interp: Interpretation) -> int:
    """Count of distinct element tuples whose conditions hold.  Raises
    UndecidedDependency when a condition atom is neither true nor false."""
    for el in agg.elements:
        for a in el.pos + el.neg:
            if a in interp.unknown_set:
                raise UndecidedDependency(f"aggregate condition atom {a} is unknown")
            if a not in interp.true_set and a not in interp.false_set:
                raise UndecidedDependency(f"aggregate condition atom {a} is undecided")
    holds = set()
    for el in agg.elements:
        if all(a in interp.true_set for a in el.pos) and all(
            a in interp.false_set for a in el.neg
        ):
            holds.add(el.terms)
    return len(holds)


def aggregate_holds(agg: GroundAggregate, interp: Interpretation) -> bool:
    count = eval_aggregate(agg, interp)
    if agg.relation == "==":
        return count == agg.guard
    return agg.guard <= count


def project_shown(model: AnswerSet, shows) -> frozenset:
    """Filter model atoms by (predicate, arity); an empty show list means
    everything (public) is shown."""
    if not shows:
        return frozenset(model.atoms)
    keys = {tuple(s) for s in shows}
    return frozenset(
        a for a in model.atoms if (a.predicate, len(a.args)) in keys
    )


def answer_sets(gp: GroundProgram, limit: int = 1, shows_override=None) -> SolveReport:
    """Enumerate stable models.  ``limit`` caps the number of returned
    models; 0 enumerates all.  Branching is deterministic: smallest
    unknown atom first, false branch before true."""
    t0 = time.perf_counter()
    solver = _Solver(gp)
    ix = solver.ix
    stats = SolveStats(ground_rules=len(gp.rules), atoms=len(gp.atoms))
    shows = gp.shows if shows_override is None else shows_override

    lower, upper, _rules, _pending = solver.well_founded_masks()
    violated_indices: set = set()
    models = []

    if lower & ix.marker_mask:
        violated_indices.update(_marker_rules(ix, lower))
    else:
        unknown_ids = [
            i
            for i in range(ix.n)
            if (upper >> i) & 1 and not (lower >> i) & 1
        ]
        base = lower & ix.real_mask

        def emit(candidate: int) -> bool:
            if solver.stable(candidate, violated_indices):
                models.append(_make_answer_set(gp, ix, candidate, shows))
                return limit > 0 and len(models) >= limit
            return False

        def search(pos: int, assigned_true: int) -> bool:
            if pos == len(unknown_ids):
                return emit(base | assigned_true)
            stats.branch_count += 1
            atom_bit = 1 << unknown_ids[pos]
            if search(pos + 1, assigned_true):  # false branch first
                return True
            return search(pos + 1, assigned_true | atom_bit)

        search(0, 0)

    report = SolveReport(
        models=models,
        satisfiable=bool(models),
        stats=stats,
        violated_constraints=sorted(
            {gp.origin_text(gp.rules[ri]) for ri in violated_indices}
        ),
    )
    stats.wall_time = time.perf_counter() - t0
    return report


def _make_answer_set(gp, ix, candidate: int, shows) -> AnswerSet:
    true_atoms = [ix.atoms[i] for i in range(ix.n) if (candidate >> i) & 1]
    public = frozenset(
        a for a in true_atoms if a.predicate not in gp.internal_preds
    )
    hidden = frozenset(
        a for a in true_atoms if a.predicate in gp.internal_preds
    )
    model = AnswerSet(atoms=public, shown=frozenset(), hidden=hidden)
    return AnswerSet(
        atoms=public, shown=project_shown(model, shows), hidden=hidden
    )


# ---------------------------------------------------------------------------
# Report rendering
# ---------------------------------------------------------------------------

def sorted_atoms(atoms) -> list:
    return sorted(atoms, key=lambda a: a.sort_key)


def render_report(report: SolveReport) -> str:
    lines = []
    for i, model in enumerate(report.models, start=1):
        lines.append(f"Answer: {i}")
        lines.append(" ".join(str(a) for a in sorted_atoms(model.shown)))
    lines.append("SATISFIABLE" if report.satisfiable else "UNSATISFIABLE")
    if not report.satisfiable:
        for text in report.violated_constraints:
            lines.append(f"% violated: {text}")
    lines.append("")
    t = report.stats.wall_time
    lines.append(f"Models       : {len(report.models)}")
    lines.append("Calls        : 1")
    lines.append(
        f"Time         : {t:.3f}s (Solving: 0.00s 1st Model: 0.00s Unsat: 0.00s)"
    )
    lines.append(f"CPU Time     : {t:.3f}s")
    return "\n".join(lines) + "\n"
