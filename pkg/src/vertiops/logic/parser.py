"""Recursive-descent parser for the logic-program fragment.

The accepted language covers facts (with ``lo..hi`` intervals), normal
rules with negation as failure, comparisons, ``#count`` aggregates,
integrity constraints and ``#show pred/arity.`` directives.  Choice rules,
disjunction, classical negation, function terms and other directives are
outside the fragment and rejected with a ParseError.
"""
from __future__ import annotations

from .lexer import Token, tokenize
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
    rule_vars,
)
from ..errors import ParseError

_CMP_TOKENS = {"EQ": "==", "NEQ": "!=", "LE": "<=", "GE": ">=", "LT": "<", "GT": ">"}
_NOT_IN_FRAGMENT = "feature not in supported fragment"


class _Parser:
    def __init__(self, text: str):
        toks = tokenize(text)
        if toks:
            last = toks[-1]
            eof = Token("EOF", "", last.line, last.column + len(last.value))
        else:
            eof = Token("EOF", "", 1, 1)
        self.toks = toks + [eof]
        self.pos = 0
        self.anon_counter = 0

    # -- token helpers ---------------------------------------------------
    @property
    def cur(self) -> Token:
        return self.toks[self.pos]

    def peek(self, ahead: int = 1) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def advance(self) -> Token:
        tok = self.cur
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.cur
        if tok.kind != kind:
            self.fail(f"expected {kind}, found {tok.value!r}", expected=(kind,))
        return self.advance()

    def fail(self, message: str, expected=()):
        tok = self.cur
        raise ParseError(message, tok.line, tok.column, expected)

    # -- grammar ---------------------------------------------------------
    def program(self) -> Program:
        prog = Program()
        while self.cur.kind != "EOF":
            if self.cur.kind == "SHOW":
                prog.shows.append(self.show_directive())
            else:
                rule = self.rule()
                prog.rules.append(self.rename_anon(rule))
        return prog

    def show_directive(self):
        self.expect("SHOW")
        if self.cur.kind == "PERIOD":
            self.fail("#show without arguments is not supported: "
                      + _NOT_IN_FRAGMENT)
        name = self.expect("IDENT").value
        self.expect("SLASH")
        arity = int(self.expect("INT").value)
        self.expect("PERIOD")
        return (name, arity)

    def rule(self) -> Rule:
        if self.cur.kind in ("LBRACE", "MINUS"):
            self.fail(f"{self.cur.value!r} cannot start a statement: "
                      + _NOT_IN_FRAGMENT)
        if self.cur.kind == "IMPLIES":  # integrity constraint
            self.advance()
            body = self.body()
            self.expect("PERIOD")
            return Rule(None, tuple(body))
        head = self.atom()
        if self.cur.kind in ("SEMI", "COMMA"):
            self.fail("disjunctive heads are not supported: " + _NOT_IN_FRAGMENT)
        if self.cur.kind == "PERIOD":
            self.advance()
            return Rule(head, ())
        self.expect("IMPLIES")
        body = self.body()
        self.expect("PERIOD")
        return Rule(head, tuple(body))

    def body(self) -> list:
        elements = [self.body_element(allow_aggregate=True)]
        while self.cur.kind == "COMMA":
            self.advance()
            elements.append(self.body_element(allow_aggregate=True))
        return elements

    def body_element(self, allow_aggregate: bool):
        tok = self.cur
        if tok.kind == "NOT":
            self.advance()
            return NegLit(self.atom())
        if tok.kind == "MINUS":
            self.fail("classical negation is not supported: " + _NOT_IN_FRAGMENT)
        if tok.kind == "COUNT":
            self.fail("#count requires a guard (N = #count{..} or k <= #count{..})")
        if tok.kind == "IDENT":
            return PosLit(self.atom())
        if tok.kind in ("VAR", "INT"):
            left = self.addterm()
            op_tok = self.cur
            if op_tok.kind == "ASSIGN" or (
                op_tok.kind in _CMP_TOKENS and self.peek().kind == "COUNT"
            ):
                if not allow_aggregate:
                    self.fail("nested aggregates are not supported")
                relation = "==" if op_tok.kind == "ASSIGN" else _CMP_TOKENS[op_tok.kind]
                if relation not in ("==", "<="):
                    self.fail("aggregate guard relation must be = or <=")
                self.advance()
                return self.aggregate(left, relation)
            if op_tok.kind in _CMP_TOKENS:
                self.advance()
                right = self.addterm()
                return Comparison(_CMP_TOKENS[op_tok.kind], left, right)
            self.fail("expected comparison operator or aggregate after term",
                      expected=tuple(_CMP_TOKENS))
        self.fail(f"unexpected {tok.value!r} in rule body")

    def aggregate(self, guard, relation: str) -> Aggregate:
        self.expect("COUNT")
        self.expect("LBRACE")
        elements = [self.aggregate_element()]
        while self.cur.kind == "SEMI":
            self.advance()
            elements.append(self.aggregate_element())
        self.expect("RBRACE")
        return Aggregate(guard, relation, tuple(elements))

    def aggregate_element(self) -> AggregateElement:
        terms = [self.addterm()]
        while self.cur.kind == "COMMA":
            self.advance()
            terms.append(self.addterm())
        condition = []
        if self.cur.kind == "COLON":
            self.advance()
            condition.append(self.body_element(allow_aggregate=False))
            while self.cur.kind == "COMMA":
                self.advance()
                condition.append(self.body_element(allow_aggregate=False))
        return AggregateElement(tuple(terms), tuple(condition))

    def atom(self) -> Atom:
        name = self.expect("IDENT").value
        args = ()
        if self.cur.kind == "LPAREN":
            self.advance()
            parts = [self.term()]
            while self.cur.kind == "COMMA":
                self.advance()
                parts.append(self.term())
            self.expect("RPAREN")
            args = tuple(parts)
        return Atom(name, args)

    def term(self):
        lo = self.addterm()
        if self.cur.kind == "DOTS":
            self.advance()
            hi = self.addterm()
            return Interval(lo, hi)
        return lo

    def addterm(self):
        left = self.multerm()
        while self.cur.kind in ("PLUS", "MINUS"):
            op = self.advance().value
            left = Arith(op, left, self.multerm())
        return left

    def multerm(self):
        left = self.primary()
        while self.cur.kind == "STAR":
            self.advance()
            left = Arith("*", left, self.primary())
        return left

    def primary(self):
        tok = self.cur
        if tok.kind == "INT":
            self.advance()
            return IntConst(int(tok.value))
        if tok.kind == "VAR":
            self.advance()
            return Var(tok.value)
        if tok.kind == "ANON":
            self.advance()
            return Anon()
        if tok.kind == "IDENT":
            if self.peek().kind == "LPAREN":
                self.fail("function terms are not supported: " + _NOT_IN_FRAGMENT)
            self.advance()
            return SymConst(tok.value)
        self.fail(f"expected a term, found {tok.value!r}",
                  expected=("INT", "VAR", "IDENT", "ANON"))

    # -- anonymous-variable renaming ------------------------------------
    def rename_anon(self, rule: Rule) -> Rule:
        used = {v.name for v in rule_vars(rule)}

        def fresh() -> Var:
            while True:
                name = f"_Anon{self.anon_counter}"
                self.anon_counter += 1
                if name not in used:
                    used.add(name)
                    return Var(name, projected=True)

        def on_term(t):
            if isinstance(t, Anon):
                return fresh()
            if isinstance(t, Arith):
                return Arith(t.op, on_term(t.left), on_term(t.right))
            if isinstance(t, Interval):
                return Interval(on_term(t.lo), on_term(t.hi))
            return t

        def on_atom(a: Atom) -> Atom:
            return Atom(a.predicate, tuple(on_term(t) for t in a.args))

        def on_element(el):
            if isinstance(el, PosLit):
                return PosLit(on_atom(el.atom))
            if isinstance(el, NegLit):
                return NegLit(on_atom(el.atom))
            if isinstance(el, Comparison):
                return Comparison(el.op, on_term(el.left), on_term(el.right))
            assert isinstance(el, Aggregate)
            return Aggregate(
                on_term(el.guard),
                el.relation,
                tuple(
                    AggregateElement(
                        tuple(on_term(t) for t in e.terms),
                        tuple(on_element(c) for c in e.condition),
                    )
                    for e in el.elements
                ),
            )

        head = on_atom(rule.head) if rule.head is not None else None
        return Rule(head, tuple(on_element(el) for el in rule.body))


def parse_program(text: str) -> Program:
    return _Parser(text).program()
