"""Recursive-descent parser for the polynomial expression grammar.

Grammar (whitespace is insignificant)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom (("^" | "**") INTEGER)?
    atom   := NUMBER | NAME | "(" expr ")"

``NUMBER`` is an integer or decimal literal (``p/q`` parses as a quotient);
``NAME`` must belong to the arena (``x<i>``, ``f<j>``, ``eps``).  Division is
only allowed by nonzero constants.
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..errors import ParseError, UnknownVariableError
from .poly import Arena, Poly

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?|\.\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", bad, text)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), start))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), start))
        else:
            tokens.append(("op", m.group(3), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, arena):
        self.text = text
        self.arena = arena
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2], self.text)
        return tok

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0, self.text)
        p = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected token {tok[1]!r}", tok[2], self.text)
        return p

    def expr(self):
        p = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            _, op, pos = self.take()
            q = self.unary()
            if op == "*":
                p = p * q
            else:
                if not q.is_constant() or q.is_zero():
                    raise ParseError("division is only allowed by nonzero constants", pos, self.text)
                p = p / q.constant_term()
        return p

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            inner = self.unary()
            return -inner if tok[1] == "-" else inner
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("^", "**"):
            self.take()
            exp_tok = self.take()
            if exp_tok[0] != "num" or not exp_tok[1].isdigit():
                raise ParseError("exponent must be a nonnegative integer", exp_tok[2], self.text)
            return base ** int(exp_tok[1])
        return base

    def atom(self):
        kind, value, pos = self.take()
        if kind == "num":
            return Poly.constant(self.arena, Fraction(value))
        if kind == "name":
            if value not in self.arena:
                raise UnknownVariableError(
                    f"unknown variable {value!r} (arena: {', '.join(self.arena.names) or 'empty'})",
                    pos, self.text)
            return Poly.var(self.arena, value)
        if value == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected token {value or 'end of input'!r}", pos, self.text)


def poly_parse(text: str, arena: Arena) -> Poly:
    """Parse ``text`` into a canonical :class:`Poly` over ``arena``.

    >>> str(poly_parse("(x1+1)^3", Arena.chain(1)))
    'x1^3 + 3*x1^2 + 3*x1 + 1'
    """
    return _Parser(text, arena).parse()


def poly_print(p: Poly) -> str:
    return str(p)
