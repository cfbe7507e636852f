"""Minimal arithmetic grammar for coefficient expressions.

Operators + - * / ^, functions sin cos exp, constant pi, variable t.
Compiles to a vectorized evaluator.
"""

from __future__ import annotations

import math
import re

import numpy as np

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+)|([A-Za-z_]\w*)|(.))")

_FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp}


class ExprError(ValueError):
    pass


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExprError(f"bad character at position {pos}: {text[pos:]!r}")
        num, name, op = m.groups()
        if num is not None:
            tokens.append(("num", float(num)))
        elif name is not None:
            tokens.append(("name", name))
        elif op.strip():
            if op not in "+-*/^()":
                raise ExprError(f"unsupported operator {op!r}")
            tokens.append(("op", op))
        pos = m.end()
    tokens.append(("end", None))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None, value=None):
        tok = self.tokens[self.i]
        if kind and tok[0] != kind or value is not None and tok[1] != value:
            raise ExprError(f"unexpected token {tok}")
        self.i += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            node = _binop(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            node = _binop(op, node, self.unary())
        return node

    def unary(self):
        neg = False
        while self.peek() == ("op", "-"):
            self.take()
            neg = not neg
        while self.peek() == ("op", "+"):
            self.take()
        node = self.power()
        if neg:
            inner = node
            node = lambda t: -inner(t)
        return node

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            exponent = self.unary()
            return lambda t: base(t) ** exponent(t)
        return base

    def atom(self):
        kind, value = self.peek()
        if kind == "num":
            self.take()
            return lambda t, v=value: np.full_like(np.asarray(t, float), v)
        if kind == "name":
            self.take()
            if value == "pi":
                return lambda t: np.full_like(np.asarray(t, float), math.pi)
            if value == "t":
                return lambda t: np.asarray(t, dtype=float)
            if value in _FUNCS:
                self.take("op", "(")
                inner = self.expr()
                self.take("op", ")")
                fn = _FUNCS[value]
                return lambda t: fn(inner(t))
            raise ExprError(f"unknown name {value!r}")
        if (kind, value) == ("op", "("):
            self.take()
            inner = self.expr()
            self.take("op", ")")
            return inner
        raise ExprError(f"unexpected token {(kind, value)}")


def _binop(op, a, b):
    if op == "+":
        return lambda t: a(t) + b(t)
    if op == "-":
        return lambda t: a(t) - b(t)
    if op == "*":
        return lambda t: a(t) * b(t)
    if op == "/":
        return lambda t: a(t) / b(t)
    raise ExprError(f"bad operator {op}")


def compile_expression(text):
    """Compile an expression in the variable t to a vectorized callable."""
    parser = _Parser(_tokenize(text))
    fn = parser.expr()
    if parser.peek()[0] != "end":
        raise ExprError(f"trailing input near token {parser.i}")
    fn(np.asarray([0.0]))   # force an early failure on malformed trees
    return fn
