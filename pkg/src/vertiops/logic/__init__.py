from .ast import (
    Aggregate,
    AggregateElement,
    Anon,
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
from .lexer import Token, tokenize
from .parser import parse_program
from .printer import render, render_atom, render_rule, render_term

__all__ = [
    "Aggregate",
    "AggregateElement",
    "Anon",
    "Arith",
    "Atom",
    "Comparison",
    "IntConst",
    "Interval",
    "NegLit",
    "PosLit",
    "Program",
    "Rule",
    "SymConst",
    "Var",
    "Token",
    "tokenize",
    "parse_program",
    "render",
    "render_atom",
    "render_rule",
    "render_term",
]
