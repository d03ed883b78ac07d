"""Expression grammar for rational functions and derivations.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' INTEGER)?
    atom   := INTEGER | NAME | 'd/d' NAME | '(' expr ')'

An expression evaluates either to a rational function or to a derivation;
``d/dx2`` is the partial derivative by ``x2`` and names bound in the
environment stand for previously defined derivations.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from derlie.derivation import Derivation
from derlie.errors import DerlieError
from derlie.ratfield import RationalFunction, VarContext


class ParseError(DerlieError):
    def __init__(self, msg, line=1, col=1):
        super().__init__(f"{line}:{col}: {msg}")
        self.msg = msg
        self.line = line
        self.col = col


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<dvar>d/d[A-Za-z_]\w*)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)
_XVAR = re.compile(r"x(\d+)$")


@dataclass
class Token:
    kind: str
    text: str
    col: int


def tokenize(text, line=1, col0=1):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = len(text) - len(text[pos:].lstrip()) if m is None else pos
            raise ParseError(f"unexpected character {text[bad]!r}", line, col0 + bad)
        kind = m.lastgroup
        out.append(Token(kind, m.group(kind), col0 + m.start(kind)))
        pos = m.end()
    out.append(Token("end", "", col0 + len(text)))
    return out


class _Parser:
    def __init__(self, text, ctx: VarContext, env=None, line=1, col0=1):
        self.ctx = ctx
        self.env = env or {}
        self.line = line
        self.toks = tokenize(text, line, col0)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, self.line, tok.col)

    def expect_end(self):
        t = self.peek()
        if t.kind != "end":
            raise self.error(f"unexpected {t.text!r}")

    def expr(self):
        left = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            tok = self.take()
            right = self.term()
            left = self._combine(left, right, tok)
        return left

    def _combine(self, left, right, tok):
        if isinstance(left, Derivation) != isinstance(right, Derivation):
            raise self.error("cannot add a function and a derivation", tok)
        return left + right if tok.text == "+" else left - right

    def term(self):
        left = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            tok = self.take()
            right = self.unary()
            if isinstance(right, Derivation):
                if tok.text == "/" or isinstance(left, Derivation):
                    raise self.error("derivations can only be scaled by functions", tok)
                left = right * left
            elif tok.text == "*":
                left = left * right
            else:
                if right.is_zero():
                    raise self.error("division by zero in R", tok)
                left = left / right
        return left

    def unary(self):
        t = self.peek()
        if t.kind == "op" and t.text in "+-":
            self.take()
            v = self.unary()
            return -v if t.text == "-" else v
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            tok = self.take()
            e = self.peek()
            if e.kind != "num":
                raise self.error("'^' needs a nonnegative integer literal", e)
            self.take()
            if isinstance(base, Derivation):
                raise self.error("cannot raise a derivation to a power", tok)
            base = base ** int(e.text)
        return base

    def _var_index(self, name, tok):
        if name in self.ctx.names:
            return self.ctx.names.index(name)
        m = _XVAR.match(name)
        if m:
            raise self.error("variable index out of range", tok)
        return None

    def atom(self):
        t = self.take()
        n = self.ctx.n
        if t.kind == "num":
            return RationalFunction.constant(n, Fraction(int(t.text)))
        if t.kind == "dvar":
            k = self._var_index(t.text[3:], t)
            if k is None:
                raise self.error(f"unknown variable {t.text[3:]!r}", t)
            return Derivation.partial(self.ctx, k + 1)
        if t.kind == "name":
            if t.text in self.env:
                return self.env[t.text]
            k = self._var_index(t.text, t)
            if k is None:
                raise self.error(f"unknown name {t.text!r}", t)
            return RationalFunction.var(n, k)
        if t.kind == "op" and t.text == "(":
            v = self.expr()
            if self.peek().text != ")":
                raise self.error("expected ')'")
            self.take()
            return v
        raise self.error(f"unexpected {t.text or 'end of input'!r}", t)


def parse_expression(text, ctx, env=None, line=1, col0=1):
    p = _Parser(text, ctx, env, line, col0)
    v = p.expr()
    p.expect_end()
    return v


def parse_rational(text, ctx, line=1, col0=1) -> RationalFunction:
    v = parse_expression(text, ctx, None, line, col0)
    if isinstance(v, Derivation):
        raise ParseError("expected a function, got a derivation", line, col0)
    return v


def parse_derivation(text, ctx, env=None, line=1, col0=1) -> Derivation:
    v = parse_expression(text, ctx, env, line, col0)
    if isinstance(v, RationalFunction):
        if v.is_zero():
            return Derivation.zero(ctx)
        raise ParseError("expected a derivation, got a function", line, col0)
    return v
