"""Expression language for metric components.

Scalar expressions in the chart variables ``x1..xn`` and ``y1..yn`` with the
usual precedence (``^`` above unary minus above ``*``/``/`` above ``+``/``-``),
left-associative binaries, right-associative ``^``, and the analytic functions
sqrt, exp, log, sin, cos. Whitespace is insignificant. Non-smooth primitives
(abs, max, ...) are deliberately absent: fundamental functions must be smooth
on the slit bundle, and one-sided metrics are expressed through sqrt of even
expressions or asymmetric linear terms instead.

The same AST is evaluated in two mutually independent ways: over jets (the
engine's differentiation path) and over plain floats/arrays (used by the
finite-difference oracle, which must not share differentiation code).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import jets
from .errors import EvaluationDomainError, ExpressionError


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    kind: str  # 'x' or 'y'
    index: int  # 0-based


@dataclass(frozen=True)
class Binary:
    op: str  # '+', '-', '*', '/', '^'
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Unary:
    op: str  # 'neg'
    arg: object


@dataclass(frozen=True)
class Call:
    fn: str  # 'sqrt', 'exp', 'log', 'sin', 'cos'
    arg: object


FUNCTIONS = ("sqrt", "exp", "log", "sin", "cos")

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            # skip leading whitespace before reporting
            at = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExpressionError(f"unexpected character {text[at]!r}", at)
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), m.start("name")))
        elif m.group("op") is not None:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


_VAR = re.compile(r"^([xy])([1-9]\d*)$")


class _Parser:
    def __init__(self, text, dim):
        self.text = text
        self.dim = dim
        self.tokens = _tokenize(text)
        self.at = 0

    def peek(self):
        return self.tokens[self.at]

    def advance(self):
        tok = self.tokens[self.at]
        self.at += 1
        return tok

    def expect_op(self, symbol):
        kind, value, pos = self.peek()
        if kind != "op" or value != symbol:
            raise ExpressionError(f"expected {symbol!r}", pos)
        return self.advance()

    # expr := term (('+'|'-') term)*
    def expr(self):
        node = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                node = Binary(value, node, self.term())
            else:
                return node

    # term := factor (('*'|'/') factor)*
    def term(self):
        node = self.factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                node = Binary(value, node, self.factor())
            else:
                return node

    # factor := '-' factor | power      (so ^ binds tighter than unary minus)
    def factor(self):
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return Unary("neg", self.factor())
        return self.power()

    # power := atom ('^' factor)?       (right-associative, '2^-3' allowed)
    def power(self):
        node = self.atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            return Binary("^", node, self.factor())
        return node

    def atom(self):
        kind, value, pos = self.advance()
        if kind == "num":
            return Const(float(value))
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        if kind == "name":
            if value in FUNCTIONS:
                self.expect_op("(")
                node = self.expr()
                self.expect_op(")")
                return Call(value, node)
            m = _VAR.match(value)
            if m is None:
                raise ExpressionError(f"unknown identifier {value!r}", pos)
            index = int(m.group(2))
            if index > self.dim:
                raise ExpressionError(
                    f"variable {value!r} exceeds chart dimension {self.dim}", pos
                )
            return Var(m.group(1), index - 1)
        if kind == "end":
            raise ExpressionError("unexpected end of expression", pos)
        raise ExpressionError(f"unexpected token {value!r}", pos)


def parse_expression(text, dim):
    """Parse an expression over a chart of dimension `dim` into an AST."""
    if not text or not text.strip():
        raise ExpressionError("empty expression", 0)
    parser = _Parser(text, dim)
    node = parser.expr()
    kind, value, pos = parser.peek()
    if kind != "end":
        raise ExpressionError(f"trailing input {value!r}", pos)
    return node


def variables_used(node):
    """Set of ('x'|'y', 0-based index) pairs appearing in the AST."""
    if isinstance(node, Const):
        return set()
    if isinstance(node, Var):
        return {(node.kind, node.index)}
    if isinstance(node, Binary):
        return variables_used(node.lhs) | variables_used(node.rhs)
    if isinstance(node, (Unary, Call)):
        return variables_used(node.arg)
    raise TypeError(f"not an expression node: {node!r}")


# -- jet evaluation ----------------------------------------------------------


def eval_jet(node, x_seeds, y_seeds):
    if isinstance(node, Const):
        space = x_seeds[0].space
        return jets.Jet.constant(space, node.value, x_seeds[0].shape)
    if isinstance(node, Var):
        seeds = x_seeds if node.kind == "x" else y_seeds
        return seeds[node.index]
    if isinstance(node, Unary):
        return -eval_jet(node.arg, x_seeds, y_seeds)
    if isinstance(node, Call):
        fn = getattr(jets, node.fn)
        return fn(eval_jet(node.arg, x_seeds, y_seeds))
    if isinstance(node, Binary):
        lhs = eval_jet(node.lhs, x_seeds, y_seeds)
        if node.op == "^":
            if isinstance(node.rhs, Const):
                return jets.power(lhs, node.rhs.value)
            rhs = eval_jet(node.rhs, x_seeds, y_seeds)
            return jets.exp(rhs * jets.log(lhs))
        rhs = eval_jet(node.rhs, x_seeds, y_seeds)
        if node.op == "+":
            return lhs + rhs
        if node.op == "-":
            return lhs - rhs
        if node.op == "*":
            return lhs * rhs
        if node.op == "/":
            return lhs / rhs
    raise TypeError(f"not an expression node: {node!r}")


# -- float evaluation (no jet code; used by the finite-difference oracle) ----


def eval_floats(node, x, y):
    """Evaluate on plain floats / numpy arrays. x, y have shape (..., n)."""
    if isinstance(node, Const):
        return np.full(np.shape(x)[:-1], node.value) if np.ndim(x) > 1 else node.value
    if isinstance(node, Var):
        block = x if node.kind == "x" else y
        return np.asarray(block)[..., node.index]
    if isinstance(node, Unary):
        return -eval_floats(node.arg, x, y)
    if isinstance(node, Call):
        arg = eval_floats(node.arg, x, y)
        if node.fn == "sqrt":
            if np.any(np.asarray(arg) <= 0.0):
                raise EvaluationDomainError(f"sqrt applied to inadmissible value "
                                            f"{np.min(arg)}")
            return np.sqrt(arg)
        if node.fn == "log":
            if np.any(np.asarray(arg) <= 0.0):
                raise EvaluationDomainError(f"log applied to inadmissible value "
                                            f"{np.min(arg)}")
            return np.log(arg)
        return getattr(np, node.fn)(arg)
    if isinstance(node, Binary):
        lhs = eval_floats(node.lhs, x, y)
        rhs = eval_floats(node.rhs, x, y)
        if node.op == "+":
            return lhs + rhs
        if node.op == "-":
            return lhs - rhs
        if node.op == "*":
            return lhs * rhs
        if node.op == "/":
            if np.any(np.asarray(rhs) == 0.0):
                raise EvaluationDomainError("division by zero in expression")
            return lhs / rhs
        if node.op == "^":
            base = np.asarray(lhs, dtype=float)
            if isinstance(node.rhs, Const) and float(node.rhs.value).is_integer():
                return base ** node.rhs.value
            if np.any(base <= 0.0):
                raise EvaluationDomainError(
                    f"pow applied to inadmissible base {np.min(base)}"
                )
            return base ** rhs
    raise TypeError(f"not an expression node: {node!r}")
