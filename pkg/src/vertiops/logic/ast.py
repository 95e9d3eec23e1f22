"""Abstract syntax for the logic-program fragment.

Terms, atoms, body elements, rules and programs are immutable dataclasses
with structural equality, so parsed programs can be compared directly in
round-trip tests and used as dict keys.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class IntConst:
    value: int


@dataclass(frozen=True)
class SymConst:
    name: str


@dataclass(frozen=True)
class Var:
    name: str
    # True for variables minted from an anonymous `_` occurrence; they are
    # exempt from the safety requirement when they occur under negation.
    projected: bool = False


@dataclass(frozen=True)
class Anon:
    """A bare `_`; replaced by a fresh projected Var right after parsing."""


@dataclass(frozen=True)
class Arith:
    op: str  # one of + - *
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Interval:
    lo: "Term"
    hi: "Term"


Term = Union[IntConst, SymConst, Var, Anon, Arith, Interval]
# Values a term evaluates to once ground.
Constant = Union[int, str]


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def key(self) -> tuple:
        """Predicates are identified by (name, arity)."""
        return (self.predicate, len(self.args))


@dataclass(frozen=True)
class PosLit:
    atom: Atom


@dataclass(frozen=True)
class NegLit:
    atom: Atom


@dataclass(frozen=True)
class Comparison:
    op: str  # one of == != <= >= < >
    left: Term
    right: Term


@dataclass(frozen=True)
class AggregateElement:
    terms: tuple  # tuple of Term
    condition: tuple  # tuple of BodyElement (no nested aggregates)


@dataclass(frozen=True)
class Aggregate:
    """A #count atom: ``guard == #count{...}`` or ``guard <= #count{...}``.

    A Var guard with relation ``==`` is an assignment form and binds the
    guard variable; an IntConst guard with ``<=`` is a lower-bound test.
    """

    guard: Term
    relation: str  # '==' or '<='
    elements: tuple  # tuple of AggregateElement


BodyElement = Union[PosLit, NegLit, Comparison, Aggregate]


@dataclass(frozen=True)
class Rule:
    head: Optional[Atom]  # None = integrity constraint
    body: tuple = ()  # tuple of BodyElement

    @property
    def is_fact(self) -> bool:
        return self.head is not None and not self.body


@dataclass
class Program:
    rules: list = field(default_factory=list)
    shows: list = field(default_factory=list)  # list of (predicate, arity)

    def __add__(self, other: "Program") -> "Program":
        return Program(list(self.rules) + list(other.rules),
                       list(self.shows) + list(other.shows))


def term_vars(t: Term):
    """Yield every Var occurring in a term."""
    if isinstance(t, Var):
        yield t
    elif isinstance(t, Arith):
        yield from term_vars(t.left)
        yield from term_vars(t.right)
    elif isinstance(t, Interval):
        yield from term_vars(t.lo)
        yield from term_vars(t.hi)


def atom_vars(a: Atom):
    for t in a.args:
        yield from term_vars(t)


def rule_vars(rule: Rule):
    """Yield every Var occurring anywhere in a rule (with repetition)."""
    if rule.head is not None:
        yield from atom_vars(rule.head)
    for el in rule.body:
        yield from element_vars(el)


def element_vars(el: BodyElement):
    if isinstance(el, (PosLit, NegLit)):
        yield from atom_vars(el.atom)
    elif isinstance(el, Comparison):
        yield from term_vars(el.left)
        yield from term_vars(el.right)
    elif isinstance(el, Aggregate):
        yield from term_vars(el.guard)
        for e in el.elements:
            for t in e.terms:
                yield from term_vars(t)
            for c in e.condition:
                yield from element_vars(c)
