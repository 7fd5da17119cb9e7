"""Scalar expressions over chart coordinates with exact first derivatives.

Grammar (lowest to highest binding)::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := ('-' | '+') unary | power
    power := atom ('^' unary)?            # right associative
    atom  := number | coordinate | constant | func '(' expr ')' | '(' expr ')'

Evaluation uses vector-forward dual numbers: one value plus the full
gradient with respect to every coordinate, carried through a single pass.
The evaluator is vectorised over a leading batch axis so a whole sample of
points is differentiated at once.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

__all__ = [
    "Num", "Sym", "Const", "Neg", "BinOp", "Call", "Node",
    "Expression", "DualValue",
    "ExprError", "ExprSyntaxError", "UnknownIdentifierError", "ArityError", "EvalDomainError",
    "FUNCTIONS", "CONSTANTS", "RESERVED",
    "parse_expression", "to_string", "eval_with_gradient", "eval_batch",
]


# ---------------------------------------------------------------- AST nodes

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Sym:
    name: str
    index: int


@dataclass(frozen=True)
class Const:
    name: str


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
    func: str
    arg: "Node"


Node = Union[Num, Sym, Const, Neg, BinOp, Call]

FUNCTIONS = ("sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "log", "sqrt", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}
RESERVED = frozenset(FUNCTIONS) | frozenset(CONSTANTS)


# ---------------------------------------------------------------- errors

class ExprError(ValueError):
    """Base class for expression parse and evaluation failures."""


class ExprSyntaxError(ExprError):
    def __init__(self, position: int, message: str):
        self.position = position
        super().__init__(f"syntax error at position {position}: {message}")


class UnknownIdentifierError(ExprError):
    def __init__(self, name: str, position: int):
        self.name = name
        self.position = position
        super().__init__(f"unknown identifier {name!r} at position {position}")


class ArityError(ExprError):
    def __init__(self, func: str, count: int, position: int):
        self.func = func
        self.count = count
        self.position = position
        super().__init__(f"{func}() takes exactly 1 argument, got {count} (position {position})")


class EvalDomainError(ExprError):
    def __init__(self, message: str, node: Node):
        self.node = node
        super().__init__(f"{message} in {to_string(node)!r}")


# ---------------------------------------------------------------- tokenizer

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            while pos < end and text[pos].isspace():
                pos += 1
            raise ExprSyntaxError(pos, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", end))
    return tokens


# ---------------------------------------------------------------- parser

class _Parser:
    def __init__(self, text: str, coordinates: Sequence[str]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.coords = {name: k for k, name in enumerate(coordinates)}

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.take()
        if text != value or kind == "end":
            found = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(pos, f"expected {value!r}, found {found}")

    def parse(self) -> Node:
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(pos, f"unexpected token {text!r}")
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
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and text == "+":
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
        kind, text, pos = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "ident":
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                return self.call(text, pos)
            if text in self.coords:
                return Sym(text, self.coords[text])
            if text in CONSTANTS:
                return Const(text)
            raise UnknownIdentifierError(text, pos)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(pos, f"expected a value, found {found}")

    def call(self, name: str, pos: int) -> Node:
        if name not in FUNCTIONS:
            raise UnknownIdentifierError(name, pos)
        self.expect("(")
        args = []
        if not (self.peek()[0] == "op" and self.peek()[1] == ")"):
            args.append(self.expr())
            while self.peek()[0] == "op" and self.peek()[1] == ",":
                self.take()
                args.append(self.expr())
        self.expect(")")
        if len(args) != 1:
            raise ArityError(name, len(args), pos)
        return Call(name, args[0])


_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Expression:
    """A parsed expression bound to an ordered list of chart coordinates."""

    ast: Node
    coordinates: tuple[str, ...]

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    def __str__(self) -> str:
        return to_string(self.ast)


def parse_expression(text: str, coordinates: Sequence[str]) -> Expression:
    coords = tuple(coordinates)
    if not coords:
        raise ValueError("coordinate list must be nonempty")
    if len(set(coords)) != len(coords):
        raise ValueError(f"coordinate names must be distinct: {coords}")
    for name in coords:
        if not _IDENT_RE.match(name):
            raise ValueError(f"invalid coordinate name {name!r}")
        if name in RESERVED:
            raise ValueError(f"coordinate name {name!r} clashes with a function or constant")
    return Expression(_Parser(text, coords).parse(), coords)


# ---------------------------------------------------------------- printer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3
_ATOM_PREC = 5


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _NEG_PREC
    return _ATOM_PREC


def to_string(node: Node) -> str:
    """Canonical text form; re-parsing it yields an identical AST."""
    if isinstance(node, Expression):
        node = node.ast
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_string(node.arg)})"
    if isinstance(node, Neg):
        inner = to_string(node.operand)
        if _prec(node.operand) < _NEG_PREC:
            inner = f"({inner})"
        return f"-{inner}"
    p = _PREC[node.op]
    left, right = to_string(node.left), to_string(node.right)
    if node.op == "^":
        # the base is an atom in the grammar; the exponent may be any unary
        if _prec(node.left) < _ATOM_PREC:
            left = f"({left})"
        if _prec(node.right) < _NEG_PREC:
            right = f"({right})"
    else:
        if _prec(node.left) < p:
            left = f"({left})"
        if _prec(node.right) <= p:
            right = f"({right})"
    return f"{left} {node.op} {right}"


# ---------------------------------------------------------------- evaluation

@dataclass(frozen=True)
class DualValue:
    """Value of an expression at one point together with its gradient."""

    value: float
    partials: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "partials", np.asarray(self.partials, dtype=float))


class _Dual:
    # v: (P,), d: (P, n)
    __slots__ = ("v", "d")

    def __init__(self, v: np.ndarray, d: np.ndarray):
        self.v = v
        self.d = d


def _mul(a: _Dual, b: _Dual) -> _Dual:
    return _Dual(a.v * b.v, a.d * b.v[:, None] + a.v[:, None] * b.d)


def _recip(a: _Dual, node: Node) -> _Dual:
    if np.any(a.v == 0.0):
        raise EvalDomainError("division by zero", node)
    inv = 1.0 / a.v
    return _Dual(inv, -a.d * (inv * inv)[:, None])


def _int_power(base: _Dual, k: int, node: Node) -> _Dual:
    if k < 0:
        if np.any(base.v == 0.0):
            raise EvalDomainError("zero raised to a negative power", node)
        return _recip(_int_power(base, -k, node), node)
    result = _Dual(np.ones_like(base.v), np.zeros_like(base.d))
    for _ in range(k):
        result = _mul(result, base)
    return result


def _power(base: _Dual, expo: _Dual, node: BinOp) -> _Dual:
    constant = not np.any(expo.d)
    if constant and np.all(expo.v == expo.v[0]) and float(expo.v[0]).is_integer():
        return _int_power(base, int(expo.v[0]), node)
    if np.any(base.v <= 0.0):
        raise EvalDomainError("non-integer power of a nonpositive base", node)
    logb = np.log(base.v)
    v = np.exp(expo.v * logb)
    d = v[:, None] * (expo.d * logb[:, None] + (expo.v / base.v)[:, None] * base.d)
    return _Dual(v, d)


def _apply(func: str, a: _Dual, node: Call) -> _Dual:
    x = a.v
    if func == "sin":
        return _Dual(np.sin(x), np.cos(x)[:, None] * a.d)
    if func == "cos":
        return _Dual(np.cos(x), -np.sin(x)[:, None] * a.d)
    if func == "tan":
        c = np.cos(x)
        if np.any(c == 0.0):
            raise EvalDomainError("tan at a pole", node)
        return _Dual(np.tan(x), (1.0 / (c * c))[:, None] * a.d)
    if func == "sinh":
        return _Dual(np.sinh(x), np.cosh(x)[:, None] * a.d)
    if func == "cosh":
        return _Dual(np.cosh(x), np.sinh(x)[:, None] * a.d)
    if func == "tanh":
        t = np.tanh(x)
        return _Dual(t, (1.0 - t * t)[:, None] * a.d)
    if func == "exp":
        v = np.exp(x)
        return _Dual(v, v[:, None] * a.d)
    if func == "log":
        if np.any(x <= 0.0):
            raise EvalDomainError("log of a nonpositive value", node)
        return _Dual(np.log(x), (1.0 / x)[:, None] * a.d)
    if func == "sqrt":
        if np.any(x < 0.0):
            raise EvalDomainError("sqrt of a negative value", node)
        if np.any(x == 0.0):
            raise EvalDomainError("sqrt is not differentiable at 0", node)
        r = np.sqrt(x)
        return _Dual(r, (0.5 / r)[:, None] * a.d)
    if func == "abs":
        # subgradient 0 at the kink
        return _Dual(np.abs(x), np.sign(x)[:, None] * a.d)
    raise EvalDomainError(f"unknown function {func}", node)  # pragma: no cover


def _eval(node: Node, pts: np.ndarray) -> _Dual:
    count, n = pts.shape
    if isinstance(node, Num):
        return _Dual(np.full(count, node.value), np.zeros((count, n)))
    if isinstance(node, Sym):
        d = np.zeros((count, n))
        d[:, node.index] = 1.0
        return _Dual(pts[:, node.index].copy(), d)
    if isinstance(node, Const):
        return _Dual(np.full(count, CONSTANTS[node.name]), np.zeros((count, n)))
    if isinstance(node, Neg):
        a = _eval(node.operand, pts)
        return _Dual(-a.v, -a.d)
    if isinstance(node, Call):
        return _apply(node.func, _eval(node.arg, pts), node)
    a = _eval(node.left, pts)
    b = _eval(node.right, pts)
    if node.op == "+":
        return _Dual(a.v + b.v, a.d + b.d)
    if node.op == "-":
        return _Dual(a.v - b.v, a.d - b.d)
    if node.op == "*":
        return _mul(a, b)
    if node.op == "/":
        if np.any(b.v == 0.0):
            raise EvalDomainError("division by zero", node)
        v = a.v / b.v
        return _Dual(v, (a.d - v[:, None] * b.d) / b.v[:, None])
    return _power(a, b, node)


def eval_batch(expr: Expression, points) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate at many points; returns values ``(P,)`` and gradients ``(P, n)``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != expr.dimension:
        raise ValueError(f"points have {pts.shape[1]} coordinates, chart has {expr.dimension}")
    out = _eval(expr.ast, pts)
    return out.v, out.d


def eval_with_gradient(expr: Expression, point) -> DualValue:
    pt = np.asarray(point, dtype=float)
    if pt.ndim != 1 or pt.shape[0] != expr.dimension:
        raise ValueError(f"point must have length {expr.dimension}")
    v, d = eval_batch(expr, pt[None, :])
    return DualValue(float(v[0]), d[0])
