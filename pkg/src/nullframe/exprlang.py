"""A small expression language for scalar fields on a chart.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := atom ('^' integer)?
    atom   := number | 'i' | 'pi' | ident | fn '(' expr ')' | '(' expr ')' | '-' atom

Unary minus binds tighter than '^', so ``-x^2`` is ``(-x)^2``.  Identifiers
must be coordinates of the chart the expression is compiled against.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .jets import Jet

FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt", "conj", "re", "im", "abs2")
CONSTANTS = ("i", "pi")


class ExprError(ValueError):
    """Parse or compile error; ``offset`` is the byte offset into the source."""

    def __init__(self, message, offset=None):
        where = f" at byte {offset}" if offset is not None else ""
        super().__init__(message + where)
        self.offset = offset


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Coord:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


Expr = Union[Num, Const, Coord, Neg, BinOp, Pow, Call]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(source: str):
    tokens = []
    pos = 0
    while pos < len(source):
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.lastgroup is None:
            bad = pos + len(source[pos:]) - len(source[pos:].lstrip())
            raise ExprError(f"unexpected character {source[bad]!r}", len(source[:bad].encode()))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), len(source[:start].encode())))
        pos = m.end()
    tokens.append(("end", "", len(source.encode())))
    return tokens


class _Parser:
    def __init__(self, source: str, coords):
        self.tokens = _tokenize(source)
        self.pos = 0
        self.coords = coords

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text):
        kind, val, off = self.take()
        if val != text or kind != "op":
            found = "end of input" if kind == "end" else repr(val)
            raise ExprError(f"expected {text!r}, found {found}", off)

    def parse(self):
        e = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ExprError(f"unexpected token {val!r}", off)
        return e

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        base = self.atom()
        if self.peek() == ("op", "^", self.peek()[2]):
            self.take()
            sign = 1
            if self.peek()[:2] == ("op", "-"):
                self.take()
                sign = -1
            kind, val, off = self.take()
            if kind != "num" or not re.fullmatch(r"\d+", val):
                raise ExprError("exponent must be an integer literal", off)
            return Pow(base, sign * int(val))
        return base

    def atom(self):
        kind, val, off = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "op" and val == "-":
            return Neg(self.atom())
        if kind == "ident":
            if self.peek()[:2] == ("op", "("):
                if val not in FUNCTIONS:
                    raise ExprError(f"unknown function {val!r}", off)
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            if val in CONSTANTS:
                return Const(val)
            if val in FUNCTIONS:
                raise ExprError(f"function {val!r} needs an argument", off)
            if self.coords is not None and val not in self.coords:
                raise ExprError(f"unknown identifier {val!r}", off)
            return Coord(val)
        found = "end of input" if kind == "end" else repr(val)
        raise ExprError(f"unexpected {found}", off)


def parse(source: str, coords=None) -> Expr:
    """Parse ``source``; if ``coords`` is given, identifiers are validated against it."""
    if not isinstance(source, str):
        raise ExprError(f"expression must be a string, got {type(source).__name__}")
    return _Parser(source, None if coords is None else tuple(coords)).parse()


def unparse(e: Expr) -> str:
    """Render an AST so that ``parse(unparse(e)) == e``."""
    match e:
        case Num(v):
            return repr(float(v))
        case Const(name) | Coord(name):
            return name
        case Neg(arg):
            return "-" + _atom_str(arg)
        case BinOp(op, lhs, rhs):
            return f"({unparse(lhs)} {op} {unparse(rhs)})"
        case Pow(base, n):
            return f"{_atom_str(base)}^{n}"
        case Call(fn, arg):
            return f"{fn}({unparse(arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def _atom_str(e):
    if isinstance(e, (Num, Const, Coord, Call)) or (isinstance(e, BinOp)):
        return unparse(e)
    return f"({unparse(e)})"


def coordinates(e: Expr) -> set[str]:
    match e:
        case Coord(name):
            return {name}
        case Neg(arg) | Pow(arg, _) | Call(_, arg):
            return coordinates(arg)
        case BinOp(_, lhs, rhs):
            return coordinates(lhs) | coordinates(rhs)
    return set()


def _apply(fn, x):
    if isinstance(x, Jet):
        match fn:
            case "exp" | "log" | "sin" | "cos" | "sqrt" | "conj" | "abs2":
                return getattr(x, fn)()
            case "re":
                return x.real
            case "im":
                return x.imag
    x = np.asarray(x, dtype=complex)
    match fn:
        case "exp":
            return np.exp(x)
        case "log":
            return np.log(x)
        case "sin":
            return np.sin(x)
        case "cos":
            return np.cos(x)
        case "sqrt":
            return np.sqrt(x)
        case "conj":
            return np.conj(x)
        case "re":
            return x.real.astype(complex)
        case "im":
            return x.imag.astype(complex)
        case "abs2":
            return x * np.conj(x)
    raise ExprError(f"unknown function {fn!r}")


def evaluate(e: Expr, env: dict):
    """Evaluate on Jets or on plain (possibly array-valued) complex numbers."""
    match e:
        case Num(v):
            return complex(v)
        case Const("i"):
            return 1j
        case Const("pi"):
            return complex(math.pi)
        case Coord(name):
            try:
                return env[name]
            except KeyError:
                raise ExprError(f"unknown identifier {name!r}") from None
        case Neg(arg):
            return -evaluate(arg, env)
        case BinOp(op, lhs, rhs):
            a, b = evaluate(lhs, env), evaluate(rhs, env)
            match op:
                case "+":
                    return a + b
                case "-":
                    return a - b
                case "*":
                    return a * b
                case "/":
                    return a / b
        case Pow(base, n):
            b = evaluate(base, env)
            if isinstance(b, Jet):
                return b ** n
            return np.asarray(b, dtype=complex) ** n if n >= 0 else 1.0 / np.asarray(b, dtype=complex) ** (-n)
        case Call(fn, arg):
            return _apply(fn, evaluate(arg, env))
    raise TypeError(f"not an expression node: {e!r}")


class ExprField:
    """A parsed expression bound to a chart; call it with coordinate values."""

    def __init__(self, source: str, chart):
        self.chart = tuple(chart)
        self.source = source
        self.expr = parse(source, self.chart)

    def __call__(self, X):
        return evaluate(self.expr, dict(zip(self.chart, X)))

    def __repr__(self):
        return f"ExprField({self.source!r})"


def as_field(obj, chart):
    """Turn a string, number, Expr or callable into a callable of coordinates."""
    if isinstance(obj, str):
        return ExprField(obj, chart)
    if isinstance(obj, (int, float, complex)):
        c = complex(obj)
        return lambda X: c
    if isinstance(obj, (Num, Const, Coord, Neg, BinOp, Pow, Call)):
        chart = tuple(chart)
        return lambda X: evaluate(obj, dict(zip(chart, X)))
    if callable(obj):
        return obj
    raise ExprError(f"cannot interpret {obj!r} as a field")
