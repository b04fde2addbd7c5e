"""A small arithmetic grammar for coefficient strings such as ``"-tanh(x)"``.

Grammar (``^`` is right associative and binds tighter than unary minus)::

    expr  := term (("+" | "-") term)*
    term  := unary (("*" | "/") unary)*
    unary := ("+" | "-") unary | power
    power := atom ("^" unary)?
    atom  := NUMBER | "x" | "pi" | "e" | FUNC "(" expr ")" | "(" expr ")"

Parsed expressions compile to numpy-vectorised callables.  Expressions
built only from numbers, ``x``, ``+``, ``-``, ``*``, division by constants
and non-negative integer powers also convert to exact polynomials.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial import Polynomial

from .errors import InputError

FUNCTIONS = {
    "exp": np.exp, "log": np.log, "sin": np.sin, "cos": np.cos, "sinh": np.sinh,
    "cosh": np.cosh, "tanh": np.tanh, "abs": np.abs, "sqrt": np.sqrt,
}
CONSTANTS = {"pi": math.pi, "e": math.e}
MAX_POLY_POWER = 64

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*)|(\*\*|[-+*/^()]))")


class ExprError(InputError):
    """Parse failure; ``position`` is the 0-based offset in the source string."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position + 1}")
        self.position = position
        self.reason = message


# ---------------------------------------------------------------------------
# syntax tree

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Unary:
    op: str
    arg: object


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str
    arg: object


def _tokenize(src: str) -> list:
    tokens, pos = [], 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if m is None:
            bad = pos + len(src[pos:]) - len(src[pos:].lstrip())
            raise ExprError(f"unexpected character {src[bad]!r}", bad)
        start = m.start(m.lastindex)
        kind = ("num", "name", "op")[m.lastindex - 1]
        text = m.group(m.lastindex)
        tokens.append((kind, "^" if text == "**" else text, start))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str):
        kind, val, pos = self.take()
        if val != text or kind != "op":
            raise ExprError(f"expected {text!r}, found {val or 'end of input'!r}", pos)

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprError(f"unexpected {val!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in ("+", "-"):
            self.take()
            arg = self.unary()
            return arg if val == "+" else Unary("-", arg)
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return Binary("^", base, self.unary())
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if val == "x":
                return Var()
            if val in CONSTANTS:
                return Num(CONSTANTS[val])
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            raise ExprError(f"unknown name {val!r}", pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExprError(f"unexpected {val or 'end of input'!r}", pos)


# ---------------------------------------------------------------------------
# evaluation

def _eval(node, x):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Unary):
        return -_eval(node.arg, x)
    if isinstance(node, Call):
        return FUNCTIONS[node.name](_eval(node.arg, x))
    a, b = _eval(node.left, x), _eval(node.right, x)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        return a / b
    return np.power(a, b)


def _poly(node) -> Optional[Polynomial]:
    if isinstance(node, Num):
        return Polynomial([node.value])
    if isinstance(node, Var):
        return Polynomial([0.0, 1.0])
    if isinstance(node, Unary):
        p = _poly(node.arg)
        return None if p is None else -p
    if isinstance(node, Call):
        return None
    a = _poly(node.left)
    if a is None:
        return None
    if node.op == "^":
        if not isinstance(node.right, Num):
            r = _poly(node.right)
            if r is None or r.degree() > 0:
                return None
            k = r.coef[0]
        else:
            k = node.right.value
        if k < 0 or k != int(k) or k > MAX_POLY_POWER:
            return None
        return a ** int(k)
    b = _poly(node.right)
    if b is None:
        return None
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    # division only by nonzero constants
    if b.trim().degree() > 0 or b.coef[0] == 0:
        return None
    return a / b.coef[0]


class Expression:
    """A parsed expression in the single variable ``x``.

    Calling it evaluates elementwise on arrays; results always have the
    shape of the input, even for constant expressions.
    """

    def __init__(self, source: str):
        if not isinstance(source, str):
            raise InputError("expression must be a string")
        self.source = source
        self.tree = _Parser(source).parse()
        self._poly = _poly(self.tree)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            out = np.asarray(_eval(self.tree, x), dtype=float)
        return np.broadcast_to(out, x.shape).copy() if out.shape != x.shape else out

    def as_polynomial(self) -> Optional[Polynomial]:
        """Exact polynomial form, or None if the expression is not polynomial."""
        return None if self._poly is None else Polynomial(self._poly.trim(tol=0).coef)

    @property
    def is_constant(self) -> bool:
        p = self.as_polynomial()
        return p is not None and p.degree() == 0

    def __repr__(self):
        return f"Expression({self.source!r})"


def parse(source: str) -> Expression:
    return Expression(source)


def to_coefficient(expr: Expression):
    """:class:`symcrit.coef.Coefficient` for a scalar 1-d coefficient string."""
    from .coef import Coefficient
    p = expr.as_polynomial()
    if p is not None:
        return Coefficient.constant(p.coef[0]) if p.degree() == 0 else Coefficient.polynomial(p)
    return Coefficient(expr, 1, (), vectorized=True)
