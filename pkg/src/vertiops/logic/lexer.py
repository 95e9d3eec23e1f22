"""Tokenizer for the logic-program text format (``.lp`` files)."""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import IllegalCharacter

# Multi-character symbols first so '<=' wins over '<', '..' over '.'.
_SYMBOLS = [
    (":-", "IMPLIES"),
    ("..", "DOTS"),
    ("==", "EQ"),
    ("!=", "NEQ"),
    ("<=", "LE"),
    (">=", "GE"),
    ("<", "LT"),
    (">", "GT"),
    ("=", "ASSIGN"),
    (".", "PERIOD"),
    (",", "COMMA"),
    (";", "SEMI"),
    (":", "COLON"),
    ("(", "LPAREN"),
    (")", "RPAREN"),
    ("{", "LBRACE"),
    ("}", "RBRACE"),
    ("+", "PLUS"),
    ("-", "MINUS"),
    ("*", "STAR"),
    ("/", "SLASH"),
]

_KEYWORDS = {"not": "NOT"}
_DIRECTIVES = {"#count": "COUNT", "#show": "SHOW"}


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    column: int

    def __repr__(self):
        return f"{self.kind}({self.value!r}@{self.line}:{self.column})"


def tokenize(text: str) -> list:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "%":  # comment to end of line
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("INT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word in _KEYWORDS:
                kind = _KEYWORDS[word]
            elif word == "_":
                kind = "ANON"
            elif word[0].isupper() or word[0] == "_":
                kind = "VAR"
            else:
                kind = "IDENT"
            tokens.append(Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        if c == "#":
            j = i + 1
            while j < n and text[j].isalpha():
                j += 1
            word = text[i:j]
            if word in _DIRECTIVES:
                tokens.append(Token(_DIRECTIVES[word], word, line, col))
                col += j - i
                i = j
                continue
            raise IllegalCharacter(word, line, col)
        for sym, kind in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token(kind, sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise IllegalCharacter(c, line, col)
    return tokens
