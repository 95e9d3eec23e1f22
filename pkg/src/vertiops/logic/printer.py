"""Render programs back to ``.lp`` text.

Rendering is cosmetic-free round-trip safe: ``parse(render(parse(p)))``
is structurally equal to ``parse(p)``.  Projected variables minted from
``_`` are printed back as ``_``.
"""
from __future__ import annotations

from .ast import (
    Aggregate,
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
)


def render_term(t) -> str:
    if isinstance(t, IntConst):
        return str(t.value)
    if isinstance(t, SymConst):
        return t.name
    if isinstance(t, Var):
        return "_" if t.projected else t.name
    if isinstance(t, Arith):
        return f"{render_term(t.left)}{t.op}{render_term(t.right)}"
    if isinstance(t, Interval):
        return f"{render_term(t.lo)}..{render_term(t.hi)}"
    raise TypeError(f"not a term: {t!r}")


def render_atom(atom: Atom) -> str:
    if not atom.args:
        return atom.predicate
    return f"{atom.predicate}({', '.join(render_term(t) for t in atom.args)})"


def render_element(el) -> str:
    if isinstance(el, PosLit):
        return render_atom(el.atom)
    if isinstance(el, NegLit):
        return f"not {render_atom(el.atom)}"
    if isinstance(el, Comparison):
        return f"{render_term(el.left)} {el.op} {render_term(el.right)}"
    if isinstance(el, Aggregate):
        parts = []
        for e in el.elements:
            terms = ", ".join(render_term(t) for t in e.terms)
            if e.condition:
                cond = ", ".join(render_element(c) for c in e.condition)
                parts.append(f"{terms}: {cond}")
            else:
                parts.append(terms)
        rel = "=" if el.relation == "==" else el.relation
        return f"{render_term(el.guard)} {rel} #count{{{'; '.join(parts)}}}"
    raise TypeError(f"not a body element: {el!r}")


def render_rule(rule: Rule) -> str:
    body = ", ".join(render_element(el) for el in rule.body)
    if rule.head is None:
        return f":- {body}."
    if not rule.body:
        return f"{render_atom(rule.head)}."
    return f"{render_atom(rule.head)} :- {body}."


def render(program: Program) -> str:
    lines = [render_rule(r) for r in program.rules]
    lines.extend(f"#show {name}/{arity}." for name, arity in program.shows)
    return "\n".join(lines) + ("\n" if lines else "")
