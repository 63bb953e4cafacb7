"""Arithmetic expressions for scalar fields and domain indicators.

Grammar (whitespace is ignored)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | "+" unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | "pi" | VAR | FUNC "(" expr ("," expr)* ")" | "(" expr ")"

``^`` binds tighter than unary minus and is right-associative, so ``-x1^2``
is ``-(x1^2)`` and ``2^3^2`` is ``2^(3^2)``. Variables are ``x1`` .. ``xd``.

Evaluation is vectorized over an ``(N, d)`` array of points. Singular
operations (division by zero, ``log`` of a nonpositive number, ``sqrt`` of a
negative number, a negative base raised to a non-integer power) and NaN
results raise :class:`EvaluationError` naming the first offending point.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import ConfigurationError, EvaluationError, ParseError


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Node", ...]


Node = Union[Num, Var, Neg, BinOp, Call]

FUNCTIONS = {
    "sin": 1,
    "cos": 1,
    "exp": 1,
    "log": 1,
    "abs": 1,
    "sqrt": 1,
    "floor": 1,
    "sign": 1,
    "min": 2,
    "max": 2,
}
CONSTANTS = {"pi": math.pi}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)
_VAR = re.compile(r"x([1-9][0-9]*)$")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, d: int):
        self.text = text
        self.d = d
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def take(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value or kind == "end":
            found = "end of input" if kind == "end" else repr(val)
            raise ParseError(f"expected {value!r}, found {found}", pos)

    def parse(self) -> Node:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and val == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, val, pos = self.take()
        if kind == "num":
            value = float(val)
            if not math.isfinite(value):
                raise ParseError(f"numeric literal {val!r} overflows", pos)
            return Num(value)
        if kind == "name":
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                return self.call(val, pos)
            if val in CONSTANTS:
                return Num(CONSTANTS[val])
            m = _VAR.match(val)
            if m:
                index = int(m.group(1))
                if index > self.d:
                    raise ParseError(f"unknown variable {val!r} (dimension is {self.d})", pos)
                return Var(index)
            if val in FUNCTIONS:
                raise ParseError(f"function {val!r} must be called with arguments", pos)
            raise ParseError(f"unknown identifier {val!r}", pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {found}", pos)

    def call(self, name, pos) -> Node:
        if name not in FUNCTIONS:
            raise ParseError(f"unknown function {name!r}", pos)
        self.expect("(")
        args = [self.expr()]
        while self.peek()[1] == "," and self.peek()[0] == "op":
            self.take()
            args.append(self.expr())
        self.expect(")")
        if len(args) != FUNCTIONS[name]:
            raise ParseError(
                f"{name} takes {FUNCTIONS[name]} argument(s), got {len(args)}", pos
            )
        return Call(name, tuple(args))


def parse(text: str, d: int) -> Node:
    """Parse ``text`` into an AST over the variables ``x1 .. xd``."""
    if not isinstance(d, int) or d < 1:
        raise ConfigurationError(f"dimension must be a positive integer, got {d!r}")
    return _Parser(text, d).parse()


def to_text(node: Node) -> str:
    """Canonical, fully parenthesized text; ``parse(to_text(t), d) == t``."""
    if isinstance(node, Num):
        if node.value < 0 or (node.value == 0 and math.copysign(1.0, node.value) < 0):
            return f"(-{_num_text(-node.value)})"
        return _num_text(node.value)
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Neg):
        return f"(-{to_text(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_text(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


def _num_text(value: float) -> str:
    text = repr(float(value))
    if text in ("inf", "nan"):
        raise ValueError(f"cannot print non-finite constant {value}")
    return text


def max_variable(node: Node) -> int:
    if isinstance(node, Var):
        return node.index
    if isinstance(node, Neg):
        return max_variable(node.operand)
    if isinstance(node, BinOp):
        return max(max_variable(node.left), max_variable(node.right))
    if isinstance(node, Call):
        return max(max_variable(a) for a in node.args)
    return 0


def _fail(message, X, bad):
    rows = np.flatnonzero(np.broadcast_to(bad, (X.shape[0],)))
    point = X[rows[0]] if rows.size else None
    raise EvaluationError(message, point)


def _eval(node: Node, X: np.ndarray) -> np.ndarray:
    if isinstance(node, Num):
        return np.full(X.shape[0], node.value)
    if isinstance(node, Var):
        return X[:, node.index - 1]
    if isinstance(node, Neg):
        return -_eval(node.operand, X)
    if isinstance(node, BinOp):
        left = _eval(node.left, X)
        right = _eval(node.right, X)
        op = node.op
        if op == "+":
            out = left + right
        elif op == "-":
            out = left - right
        elif op == "*":
            out = left * right
        elif op == "/":
            bad = right == 0
            if bad.any():
                _fail("division by zero", X, bad)
            out = left / right
        else:
            non_integer = right != np.floor(right)
            bad = (left < 0) & non_integer
            if bad.any():
                _fail("negative base with non-integer exponent", X, bad)
            bad = (left == 0) & (right < 0)
            if bad.any():
                _fail("division by zero (zero to a negative power)", X, bad)
            out = np.power(left, right)
    else:
        args = [_eval(a, X) for a in node.args]
        name = node.name
        if name == "log":
            bad = args[0] <= 0
            if bad.any():
                _fail("log of a nonpositive number", X, bad)
            out = np.log(args[0])
        elif name == "sqrt":
            bad = args[0] < 0
            if bad.any():
                _fail("sqrt of a negative number", X, bad)
            out = np.sqrt(args[0])
        elif name == "min":
            out = np.minimum(args[0], args[1])
        elif name == "max":
            out = np.maximum(args[0], args[1])
        else:
            out = _UNARY[name](args[0])
    nan = np.isnan(out)
    if nan.any():
        _fail("result is NaN", X, nan)
    return out


_UNARY = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "abs": np.abs,
    "floor": np.floor,
    "sign": np.sign,
}


def _as_points(x, d: int) -> np.ndarray:
    X = np.asarray(x, dtype=np.float64)
    if X.ndim == 0:
        X = X.reshape(1, 1)
    elif X.ndim == 1:
        X = X.reshape(-1, 1) if d == 1 else X.reshape(1, -1)
    if X.ndim != 2 or X.shape[1] != d:
        raise ConfigurationError(f"expected points of dimension {d}, got shape {np.shape(x)}")
    return X


def evaluate_many(node: Node, X, d: int | None = None) -> np.ndarray:
    """Evaluate at each row of the ``(N, d)`` array ``X``."""
    d = max(max_variable(node), 1) if d is None else d
    X = _as_points(X, d)
    if max_variable(node) > d:
        raise ConfigurationError(f"expression uses x{max_variable(node)} but points are {d}-dimensional")
    with np.errstate(all="ignore"):
        return np.array(_eval(node, X), dtype=np.float64, copy=True)


def evaluate(node: Node, x, d: int | None = None) -> float:
    """Evaluate at the single point ``x``."""
    point = np.atleast_1d(np.asarray(x, dtype=np.float64))
    d = point.shape[0] if d is None else d
    if point.shape != (d,):
        raise ConfigurationError(f"expected a point of dimension {d}, got shape {point.shape}")
    return float(evaluate_many(node, point.reshape(1, d), d)[0])


class ScalarField:
    """A function f: R^d -> R evaluated on ``(N, d)`` arrays.

    ``ae_value`` is set for fields whose a.e.-equal version is a known
    constant (the Dirichlet marker is 1 on every representable point but 0
    almost everywhere).
    """

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], d: int, label: str,
                 ast: Node | None = None, ae_value: float | None = None):
        self._func = func
        self.d = d
        self.label = label
        self.ast = ast
        self.ae_value = ae_value

    def __call__(self, X) -> np.ndarray:
        X = _as_points(X, self.d)
        out = np.asarray(self._func(X), dtype=np.float64)
        if out.shape == ():
            out = np.full(X.shape[0], float(out))
        if out.shape != (X.shape[0],):
            raise EvaluationError(f"field {self.label!r} returned shape {out.shape}")
        nan = np.isnan(out)
        if nan.any():
            _fail("result is NaN", X, nan)
        return out

    def at(self, x) -> float:
        return float(self(np.atleast_1d(np.asarray(x, dtype=np.float64)).reshape(1, self.d))[0])

    def __repr__(self):
        return f"ScalarField({self.label!r}, d={self.d})"

    @classmethod
    def from_expression(cls, text: str, d: int) -> "ScalarField":
        ast = parse(text, d)
        return cls(lambda X: evaluate_many(ast, X, d), d, to_text(ast), ast=ast)

    @classmethod
    def identity(cls, d: int = 1) -> "ScalarField":
        """f(x) = x1."""
        return cls(lambda X: X[:, 0].copy(), d, "identity")

    @classmethod
    def constant(cls, c: float, d: int = 1) -> "ScalarField":
        c = float(c)
        return cls(lambda X: np.full(X.shape[0], c), d, f"constant({c!r})", ae_value=c)

    @classmethod
    def dirichlet_marker(cls, d: int = 1) -> "ScalarField":
        """Indicator of the rationals, evaluated on floating-point input.

        Every finite double is rational, so this is 1 at every point a
        computer can sample, while it equals 0 almost everywhere.
        """

        def marker(X):
            finite = np.all(np.isfinite(X), axis=1)
            return np.where(finite, 1.0, 0.0)

        return cls(marker, d, "dirichlet_marker", ae_value=0.0)


_CONSTANT = re.compile(r"\s*constant\s*\(\s*([^()]*)\s*\)\s*$")


def field_from_text(text: str, d: int) -> ScalarField:
    """Build a field from config text: a built-in name or an expression.

    Built-ins are ``identity``, ``dirichlet`` / ``dirichlet_marker`` and
    ``constant(c)``.
    """
    key = text.strip()
    if key == "identity":
        return ScalarField.identity(d)
    if key in ("dirichlet", "dirichlet_marker"):
        return ScalarField.dirichlet_marker(d)
    m = _CONSTANT.match(key)
    if m:
        ast = parse(m.group(1), d)
        if max_variable(ast):
            raise ConfigurationError(f"constant({m.group(1)}) must not reference variables")
        try:
            value = evaluate(ast, np.zeros(d), d)
        except EvaluationError as exc:
            raise ConfigurationError(f"bad constant {m.group(1)!r}: {exc}") from exc
        return ScalarField.constant(value, d)
    return ScalarField.from_expression(key, d)
