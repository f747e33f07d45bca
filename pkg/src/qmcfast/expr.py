"""A small arithmetic language for user integrands, parsed by recursive descent.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | "pi" | "e" | "x" INT | FUNC "(" expr ")" | "(" expr ")"

``x1 .. xd`` are the coordinates.  Nothing is passed to ``eval``; the parse
tree is compiled into numpy closures.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import e, pi
from typing import Callable

import numpy as np

from .integrands import Integrand

__all__ = ["ExprError", "parse_expression", "expression_integrand", "FUNCTIONS"]

FUNCTIONS: dict[str, Callable] = {
    "exp": np.exp, "cos": np.cos, "sin": np.sin, "abs": np.abs, "sqrt": np.sqrt, "log": np.log,
}
_CONSTANTS = {"pi": pi, "e": e}
_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*)|(\S))")

Node = Callable[[np.ndarray], np.ndarray]


class ExprError(ValueError):
    """Syntax error; ``pos`` is the 0-based offset and ``caret`` points at it."""

    def __init__(self, text: str, pos: int, msg: str):
        self.text, self.pos = text, pos
        self.caret = f"{text}\n{' ' * pos}^"
        super().__init__(f"{msg} at position {pos}\n{self.caret}")


@dataclass
class _Tok:
    kind: str  # num, name, op, end
    value: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks, pos = [], 0
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if mt is None:  # only trailing whitespace remains
            break
        start = mt.start(mt.lastindex)
        kind = {1: "num", 2: "name", 3: "op"}[mt.lastindex]
        if kind == "op" and mt.group(3) not in "+-*/^()":
            raise ExprError(text, start, f"unexpected character {mt.group(3)!r}")
        toks.append(_Tok(kind, mt.group(mt.lastindex), start))
        pos = mt.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, d: int | None):
        self.text, self.d = text, d
        self.toks = _tokenize(text)
        self.i = 0
        self.max_var = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        tok = self.take()
        if tok.value != value:
            raise ExprError(self.text, tok.pos, f"expected {value!r}")

    def expr(self) -> Node:
        node = self.term()
        while self.peek().value in ("+", "-") and self.peek().kind == "op":
            op, lhs = self.take().value, node
            rhs = self.term()
            node = (lambda a, b: lambda x: a(x) + b(x))(lhs, rhs) if op == "+" else \
                (lambda a, b: lambda x: a(x) - b(x))(lhs, rhs)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek().value in ("*", "/") and self.peek().kind == "op":
            op, lhs = self.take().value, node
            rhs = self.unary()
            node = (lambda a, b: lambda x: a(x) * b(x))(lhs, rhs) if op == "*" else \
                (lambda a, b: lambda x: a(x) / b(x))(lhs, rhs)
        return node

    def unary(self) -> Node:
        tok = self.peek()
        if tok.kind == "op" and tok.value in ("+", "-"):
            self.take()
            inner = self.unary()
            return inner if tok.value == "+" else (lambda a: lambda x: -a(x))(inner)
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek().value == "^" and self.peek().kind == "op":
            self.take()
            exp_ = self.unary()
            return (lambda a, b: lambda x: np.power(a(x), b(x)))(base, exp_)
        return base

    def atom(self) -> Node:
        tok = self.take()
        if tok.kind == "num":
            v = float(tok.value)
            return lambda x: np.full(x.shape[:-1], v)
        if tok.kind == "name":
            name = tok.value
            if name in _CONSTANTS:
                v = _CONSTANTS[name]
                return lambda x: np.full(x.shape[:-1], v)
            if name in FUNCTIONS:
                fn = FUNCTIONS[name]
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return lambda x: fn(arg(x))
            mt = re.fullmatch(r"x_?(\d+)", name)
            if mt:
                j = int(mt.group(1))
                if j < 1 or (self.d is not None and j > self.d):
                    raise ExprError(self.text, tok.pos, f"coordinate {name} outside x1..x{self.d}")
                self.max_var = max(self.max_var, j)
                return lambda x: x[..., j - 1]
            raise ExprError(self.text, tok.pos, f"unknown name {name!r}")
        if tok.value == "(":
            node = self.expr()
            self.expect(")")
            return node
        what = "end of input" if tok.kind == "end" else repr(tok.value)
        raise ExprError(self.text, tok.pos, f"unexpected {what}")

    def parse(self) -> Node:
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ExprError(self.text, tok.pos, f"unexpected {tok.value!r}")
        return node


def parse_expression(text: str, d: int | None = None) -> tuple[Node, int]:
    """Compile ``text``; returns the evaluator and the highest coordinate used."""
    p = _Parser(text, d)
    node = p.parse()
    return node, p.max_var


def expression_integrand(text: str, d: int | None = None, mean: float | None = None) -> Integrand:
    node, used = parse_expression(text, d)
    d = max(used, 1) if d is None else d
    return Integrand(f"expr:{text}", d, node, mean, {"expression": text})
