"""Recursive-descent parser for polynomial expressions.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" INT)?
    atom   := INT | NAME | "(" expr ")"
"""

from __future__ import annotations

import re

from .poly import Poly, VarContext

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class ParseError(ValueError):
    """Malformed input; ``line`` and ``col`` are 1-based."""

    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


def _tokenize(text: str, line: int, col0: int):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex)
        kind = {1: "int", 2: "name", 3: "op"}[m.lastindex]
        val = m.group(m.lastindex)
        if kind == "op" and val not in "+-*^()":
            raise ParseError(f"unexpected character {val!r}", line, col0 + start)
        toks.append((kind, val, col0 + start))
        pos = m.end()
    toks.append(("end", "", col0 + len(text.rstrip())))
    return toks


class _Parser:
    def __init__(self, text: str, ctx: VarContext, line: int, col0: int):
        self.ctx = ctx
        self.line = line
        self.toks = _tokenize(text, line, col0)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok[2])

    def expr(self) -> Poly:
        out = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> Poly:
        out = self.unary()
        while self.peek() == ("op", "*", self.peek()[2]):
            self.take()
            out = out * self.unary()
        return out

    def unary(self) -> Poly:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            inner = self.unary()
            return inner if tok[1] == "+" else -inner
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            exp = self.take()
            if exp[0] != "int":
                self.fail("exponent must be a non-negative integer", exp)
            return base ** int(exp[1])
        return base

    def atom(self) -> Poly:
        tok = self.take()
        kind, val, _ = tok
        if kind == "int":
            return Poly.const(self.ctx, int(val))
        if kind == "name":
            if val not in self.ctx.names:
                self.fail(f"unknown variable {val!r}", tok)
            return Poly.var(self.ctx, val)
        if kind == "op" and val == "(":
            inner = self.expr()
            close = self.take()
            if close[1] != ")":
                self.fail("expected ')'", close)
            return inner
        self.fail("unexpected end of input" if kind == "end" else f"unexpected {val!r}", tok)


def parse_poly(text: str, ctx: VarContext, line: int = 1, col: int = 1) -> Poly:
    """Parse ``text`` into a polynomial over ``ctx``; errors report line/column."""
    p = _Parser(text, ctx, line, col)
    if p.peek()[0] == "end":
        p.fail("empty expression")
    out = p.expr()
    if p.peek()[0] != "end":
        p.fail(f"unexpected {p.peek()[1]!r}")
    return out
