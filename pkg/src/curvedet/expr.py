"""Small math expression language for coordinate functions.

Grammar, loosest to tightest binding::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right associative
    atom   := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

so ``-s^2`` is ``-(s^2)`` and ``2^-s`` is ``2^(-s)``.  ``pi`` and ``e`` are
built-in constants; ``s`` is the curve parameter.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

import numpy as np

from . import jets

FUNCTIONS = {name: 1 for name in ("sin", "cos", "tan", "sqrt", "exp", "log", "atan")}
CONSTANTS = {"pi": math.pi, "e": math.e}
PARAMETER = "s"


class ExprError(ValueError):
    """Base class for expression errors; ``pos`` is a 0-based character offset."""

    def __init__(self, message: str, pos: Optional[int] = None):
        where = f" at offset {pos}" if pos is not None else ""
        super().__init__(f"{message}{where}")
        self.pos = pos


class ExprSyntaxError(ExprError):
    pass


class UnknownIdentifier(ExprError):
    pass


class ArityError(ExprError):
    pass


Span = tuple


@dataclass(frozen=True)
class Num:
    value: float
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    """The curve parameter."""

    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Name:
    """A named parameter or a built-in constant."""

    name: str
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Neg:
    operand: "Node"
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple
    span: Span = field(default=(0, 0), compare=False, repr=False)


Node = Union[Num, Var, Name, Neg, BinOp, Call]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, names: Optional[frozenset]):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.names = names

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, op: str):
        kind, val, pos = self.peek()
        if kind != "op" or val != op:
            found = "end of input" if kind == "end" else repr(val)
            raise ExprSyntaxError(f"expected {op!r}, found {found}", pos)
        return self.advance()

    def parse(self) -> Node:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {val!r}", pos)
        return node

    def expr(self) -> Node:
        left = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            _, op, _ = self.advance()
            right = self.term()
            left = BinOp(op, left, right, (left.span[0], right.span[1]))
        return left

    def term(self) -> Node:
        left = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            _, op, _ = self.advance()
            right = self.unary()
            left = BinOp(op, left, right, (left.span[0], right.span[1]))
        return left

    def unary(self) -> Node:
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            operand = self.unary()
            return Neg(operand, (pos, operand.span[1]))
        if kind == "op" and val == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.advance()
            exponent = self.unary()
            return BinOp("^", base, exponent, (base.span[0], exponent.span[1]))
        return base

    def atom(self) -> Node:
        kind, val, pos = self.advance()
        if kind == "num":
            v = float(val)
            if not math.isfinite(v):
                raise ExprSyntaxError(f"number {val} out of range", pos)
            return Num(v, (pos, pos + len(val)))
        if kind == "name":
            end = pos + len(val)
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                if val not in FUNCTIONS:
                    raise UnknownIdentifier(f"unknown function {val!r}", pos)
                self.advance()
                args = [self.expr()]
                while self.peek()[0] == "op" and self.peek()[1] == ",":
                    self.advance()
                    args.append(self.expr())
                _, _, close = self.expect(")")
                if len(args) != FUNCTIONS[val]:
                    raise ArityError(
                        f"{val} expects {FUNCTIONS[val]} argument(s), got {len(args)}", pos
                    )
                return Call(val, tuple(args), (pos, close + 1))
            if val in FUNCTIONS:
                raise ExprSyntaxError(f"function {val!r} must be called", pos)
            if val == PARAMETER:
                return Var((pos, end))
            if val not in CONSTANTS and self.names is not None and val not in self.names:
                raise UnknownIdentifier(f"unknown identifier {val!r}", pos)
            return Name(val, (pos, end))
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input", pos)
        raise ExprSyntaxError(f"unexpected {val!r}", pos)


def parse_expression(text: str, names=None) -> Node:
    """Parse ``text``; if ``names`` is given, free identifiers must belong to it."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(text, frozenset(names) if names is not None else None).parse()


def to_string(node: Node) -> str:
    """Canonical, fully parenthesized serialization; ``parse(to_string(n)) == n``."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return PARAMETER
    if isinstance(node, Name):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_string(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_string(node.left)} {node.op} {to_string(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({', '.join(to_string(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


def free_names(node: Node) -> set:
    if isinstance(node, Name):
        return set() if node.name in CONSTANTS else {node.name}
    if isinstance(node, Neg):
        return free_names(node.operand)
    if isinstance(node, BinOp):
        return free_names(node.left) | free_names(node.right)
    if isinstance(node, Call):
        out = set()
        for a in node.args:
            out |= free_names(a)
        return out
    return set()


def evaluate(node: Node, s, params: Mapping[str, float] = None):
    """Evaluate with the parameter bound to ``s`` (a float or a :class:`~curvedet.jets.Jet`)."""
    params = params or {}

    def ev(n):
        if isinstance(n, Num):
            return n.value
        if isinstance(n, Var):
            return s
        if isinstance(n, Name):
            if n.name in params:
                return params[n.name]
            if n.name in CONSTANTS:
                return CONSTANTS[n.name]
            raise UnknownIdentifier(f"unbound identifier {n.name!r}", n.span[0])
        if isinstance(n, Neg):
            return -ev(n.operand)
        if isinstance(n, BinOp):
            a, b = ev(n.left), ev(n.right)
            if n.op == "+":
                return a + b
            if n.op == "-":
                return a - b
            if n.op == "*":
                return a * b
            if n.op == "/":
                if not isinstance(b, jets.Jet) and b == 0:
                    raise jets.JetDomainError("div", "division by zero")
                return a / b
            return jets.pow_(a, b)
        if isinstance(n, Call):
            return jets.ELEMENTARY[n.func](*(ev(a) for a in n.args))
        raise TypeError(f"not an expression node: {n!r}")

    return ev(node)


_DUAL_FUNCS = {
    "sin": lambda v: (np.sin(v), np.cos(v)),
    "cos": lambda v: (np.cos(v), -np.sin(v)),
    "tan": lambda v: (np.tan(v), 1.0 / np.cos(v) ** 2),
    "sqrt": lambda v: (np.sqrt(v), 0.5 / np.sqrt(v)),
    "exp": lambda v: (np.exp(v), np.exp(v)),
    "log": lambda v: (np.log(v), 1.0 / v),
    "atan": lambda v: (np.arctan(v), 1.0 / (1.0 + v * v)),
}
_DUAL_DOMAIN = {"sqrt": lambda v: v > 0, "log": lambda v: v > 0}


def evaluate_dual(node: Node, t: np.ndarray, params: Mapping[str, float] = None) -> tuple:
    """Value and first derivative over an array of parameter values.

    The vectorized counterpart of :func:`evaluate` with order-1 jets; used for
    speeds and quadrature.  Domain violations raise :class:`~curvedet.jets.JetDomainError`.
    """
    params = params or {}
    t = np.asarray(t, dtype=float)
    zero = np.zeros_like(t)

    def ev(n):
        if isinstance(n, Num):
            return zero + n.value, zero
        if isinstance(n, Var):
            return t, zero + 1.0
        if isinstance(n, Name):
            if n.name in params:
                return zero + params[n.name], zero
            if n.name in CONSTANTS:
                return zero + CONSTANTS[n.name], zero
            raise UnknownIdentifier(f"unbound identifier {n.name!r}", n.span[0])
        if isinstance(n, Neg):
            v, d = ev(n.operand)
            return -v, -d
        if isinstance(n, BinOp):
            (a, da), (b, db) = ev(n.left), ev(n.right)
            if n.op == "+":
                return a + b, da + db
            if n.op == "-":
                return a - b, da - db
            if n.op == "*":
                return a * b, da * b + a * db
            if n.op == "/":
                if np.any(b == 0):
                    raise jets.JetDomainError("div", "division by zero")
                return a / b, (da * b - a * db) / (b * b)
            if not np.any(db) and float(b.flat[0]).is_integer() and abs(b.flat[0]) <= 64:
                p = int(b.flat[0])
                if p < 0 and np.any(a == 0):
                    raise jets.JetDomainError("pow", "zero base with negative exponent")
                return a**p, (p * a ** (p - 1) * da if p else zero)
            if np.any(a <= 0):
                raise jets.JetDomainError("pow", "base must be positive for a non-integer exponent")
            v = a**b
            return v, v * (db * np.log(a) + b * da / a)
        if isinstance(n, Call):
            v, d = ev(n.args[0])
            ok = _DUAL_DOMAIN.get(n.func)
            if ok is not None and not np.all(ok(v)):
                raise jets.JetDomainError(n.func, "argument value is not positive")
            f, df = _DUAL_FUNCS[n.func](v)
            return f, df * d
        raise TypeError(f"not an expression node: {n!r}")

    return ev(node)
