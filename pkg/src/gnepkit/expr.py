"""Scalar expressions over positional variables ``x1 ... xn``.

Grammar (EBNF, whitespace insignificant)::

    expr     = term { ("+" | "-") term } ;
    term     = unary { ("*" | "/") unary } ;
    unary    = "-" unary | power ;
    power    = atom [ "^" exponent ] ;
    exponent = INTEGER [ "^" exponent ] ;          (* folded, right-assoc *)
    atom     = NUMBER | VARIABLE | FUNC "(" expr { "," expr } ")"
             | "(" expr ")" ;
    VARIABLE = "x" DIGITS ;                         (* 1-based *)
    FUNC     = "min" | "max" | "abs" ;

``^`` binds tighter than unary minus, so ``-x1^2`` is ``-(x1^2)``.
Internally variables are 0-based: ``x1`` is ``Var(0)``.
"""
from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .exceptions import (ExprEvalError, ExprSyntaxError, IntervalError,
                         NonSmoothError)

FUNCTIONS = ("min", "max", "abs")


class Expr:
    """Base node. Subclasses are immutable dataclasses."""

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __neg__(self):
        return neg(self)

    def __pow__(self, k):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        return power(self, int(k))

    def __str__(self):
        return to_string(self)

    def compiled(self) -> Callable:
        fn = self.__dict__.get("_fn")
        if fn is None:
            fn = _compile(self)
            object.__setattr__(self, "_fn", fn)
        return fn


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True, eq=True)
class Var(Expr):
    index: int


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True, eq=True)
class Call(Expr):
    name: str
    args: tuple[Expr, ...]


def as_expr(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, float, np.integer, np.floating)):
        return Const(float(v))
    if isinstance(v, str):
        return parse(v)
    raise TypeError(f"cannot convert {type(v).__name__} to an expression")


# ---------------------------------------------------------------- constructors
# These fold constants and drop neutral elements; they keep gradients small.

def _is_const(e, value=None):
    return isinstance(e, Const) and (value is None or e.value == value)


def add(a, b):
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    return BinOp("+", a, b)


def sub(a, b):
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return neg(b)
    if _is_const(a) and _is_const(b):
        return Const(a.value - b.value)
    return BinOp("-", a, b)


def mul(a, b):
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return Const(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    return BinOp("*", a, b)


def div(a, b):
    if _is_const(b, 1.0):
        return a
    if _is_const(a, 0.0) and not _is_const(b, 0.0):
        return Const(0.0)
    if _is_const(a) and _is_const(b) and b.value != 0.0:
        return Const(a.value / b.value)
    return BinOp("/", a, b)


def neg(a):
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def power(a, k: int):
    if k == 0:
        return Const(1.0)
    if k == 1:
        return a
    if isinstance(a, Const):
        return Const(a.value ** k)
    return Pow(a, k)


def var(i: int) -> Var:
    return Var(int(i))


def sum_of(terms: Sequence[Expr]) -> Expr:
    return functools.reduce(add, terms, Const(0.0))


# ---------------------------------------------------------------------- parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<id>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))")


class _Parser:
    def __init__(self, text: str, n_vars: int | None):
        self.text = text
        self.n_vars = n_vars
        self.tokens = self._tokenize(text)
        self.pos = 0

    def _byte(self, char_offset):
        return len(self.text[:char_offset].encode("utf-8"))

    def _tokenize(self, text):
        tokens = []
        i = 0
        while True:
            while i < len(text) and text[i].isspace():
                i += 1
            if i >= len(text):
                break
            m = _TOKEN.match(text, i)
            if m is None or m.end() == i:
                raise ExprSyntaxError(f"unexpected character {text[i]!r}", self._byte(i))
            kind = m.lastgroup
            start = m.start(kind)
            tokens.append((kind, m.group(kind), start))
            i = m.end()
        tokens.append(("end", "", len(text)))
        return tokens

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ExprSyntaxError(message, self._byte(tok[2]))

    def expect(self, value):
        tok = self.peek()
        if tok[1] != value or tok[0] == "end":
            self.fail(f"expected {value!r}" + (f", got {tok[1]!r}" if tok[1] else ", got end of input"))
        return self.take()

    def parse(self):
        if self.peek()[0] == "end":
            self.fail("empty expression")
        e = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            e = BinOp(op, e, self.unary())
        return e

    def unary(self):
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            return Pow(base, self.exponent())
        return base

    def exponent(self):
        tok = self.peek()
        if tok[0] != "num" or not tok[1].isdigit():
            self.fail("exponent must be a nonnegative integer literal")
        self.take()
        k = int(tok[1])
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            k = k ** self.exponent()
        return k

    def atom(self):
        tok = self.peek()
        kind, value, _ = tok
        if kind == "num":
            self.take()
            return Const(float(value))
        if kind == "id":
            self.take()
            m = re.fullmatch(r"x(\d+)", value)
            if m:
                idx = int(m.group(1))
                if idx < 1:
                    self.fail("variables are numbered from x1", tok)
                if self.n_vars is not None and idx > self.n_vars:
                    self.fail(f"variable {value} exceeds the {self.n_vars} available", tok)
                return Var(idx - 1)
            if value in FUNCTIONS:
                self.expect("(")
                args = [self.expr()]
                while self.peek()[1] == "," and self.peek()[0] == "op":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                if value == "abs" and len(args) != 1:
                    self.fail("abs takes exactly one argument", tok)
                if value in ("min", "max") and len(args) < 2:
                    self.fail(f"{value} takes at least two arguments", tok)
                return Call(value, tuple(args))
            self.fail(f"unknown identifier {value!r}", tok)
        if value == "(" and kind == "op":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        if kind == "end":
            self.fail("unexpected end of input")
        self.fail(f"unexpected {value!r}")


def parse(text: str, n_vars: int | None = None) -> Expr:
    """Parse ``text`` into an expression tree.

    With ``n_vars`` given, variables beyond ``x{n_vars}`` are rejected.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return _Parser(text, n_vars).parse()


# --------------------------------------------------------------------- printer

def to_string(e: Expr) -> str:
    """Canonical, fully parenthesized text that parses back to an
    equivalent tree."""
    if isinstance(e, Const):
        if not np.isfinite(e.value):
            raise ValueError("cannot print a non-finite constant")
        return repr(e.value) if e.value >= 0 else f"(-{-e.value!r})"
    if isinstance(e, Var):
        return f"x{e.index + 1}"
    if isinstance(e, Neg):
        return f"(-{to_string(e.arg)})"
    if isinstance(e, BinOp):
        return f"({to_string(e.left)} {e.op} {to_string(e.right)})"
    if isinstance(e, Pow):
        return f"({to_string(e.base)}^{e.exponent})"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(to_string(a) for a in e.args)})"
    raise TypeError(f"not an expression node: {e!r}")


# ------------------------------------------------------------------ evaluation

def _div(a, b):
    if np.any(np.asarray(b) == 0):
        raise ExprEvalError("division by zero")
    return a / b


def _min(*args):
    return functools.reduce(np.minimum, args)


def _max(*args):
    return functools.reduce(np.maximum, args)


_NAMESPACE = {"_div": _div, "_min": _min, "_max": _max, "_abs": np.abs}


def _source(e: Expr) -> str:
    if isinstance(e, Const):
        return f"({e.value!r})"
    if isinstance(e, Var):
        return f"x[{e.index}]"
    if isinstance(e, Neg):
        return f"(-{_source(e.arg)})"
    if isinstance(e, BinOp):
        if e.op == "/":
            return f"_div({_source(e.left)}, {_source(e.right)})"
        return f"({_source(e.left)} {e.op} {_source(e.right)})"
    if isinstance(e, Pow):
        return f"({_source(e.base)} ** {e.exponent})"
    if isinstance(e, Call):
        return f"_{e.name}({', '.join(_source(a) for a in e.args)})"
    raise TypeError(f"not an expression node: {e!r}")


def _compile(e: Expr) -> Callable:
    code = compile(f"lambda x: {_source(e)}", "<gnepkit-expr>", "eval")
    return eval(code, dict(_NAMESPACE))  # noqa: S307 - source is generated from the AST


def n_vars_required(e: Expr) -> int:
    cached = e.__dict__.get("_n_vars")
    if cached is None:
        idx = variables(e)
        cached = max(idx) + 1 if idx else 0
        e.__dict__["_n_vars"] = cached
    return cached


def evaluate(e: Expr, x, nan_ok: bool = False):
    """Evaluate ``e`` at ``x``.

    ``x`` of shape ``(n,)`` returns a float; shape ``(n, m)`` evaluates
    ``m`` points column-wise and returns an array of length ``m``.
    NaN or infinite results raise ExprEvalError unless ``nan_ok``.
    """
    x = np.asarray(x, dtype=float)
    need = n_vars_required(e)
    have = x.shape[0] if x.ndim else 0
    if have < need:
        raise ExprEvalError(f"expression uses x{need} but only {have} values given")
    try:
        with np.errstate(all="ignore"):
            r = e.compiled()(x)
    except OverflowError as exc:
        raise ExprEvalError(f"overflow: {exc}") from None
    except ZeroDivisionError:
        raise ExprEvalError("division by zero") from None
    if x.ndim == 2:
        r = np.broadcast_to(np.asarray(r, dtype=float), (x.shape[1],)).copy()
        if not nan_ok and not np.all(np.isfinite(r)):
            raise ExprEvalError("evaluation produced NaN or overflowed")
        return r
    r = float(r)
    if not nan_ok and not math.isfinite(r):
        raise ExprEvalError("evaluation produced NaN or overflowed")
    return r


# -------------------------------------------------------------------- analysis

def variables(e: Expr) -> set[int]:
    if isinstance(e, Var):
        return {e.index}
    if isinstance(e, Const):
        return set()
    if isinstance(e, Neg):
        return variables(e.arg)
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    if isinstance(e, Pow):
        return variables(e.base)
    if isinstance(e, Call):
        return set().union(*(variables(a) for a in e.args))
    raise TypeError(f"not an expression node: {e!r}")


def is_smooth(e: Expr) -> bool:
    if isinstance(e, Call):
        return False
    if isinstance(e, Neg):
        return is_smooth(e.arg)
    if isinstance(e, BinOp):
        return is_smooth(e.left) and is_smooth(e.right)
    if isinstance(e, Pow):
        return is_smooth(e.base)
    return True


def remap(e: Expr, mapping: Callable[[int], int]) -> Expr:
    """Rename variables: ``Var(i)`` becomes ``Var(mapping(i))``."""
    if isinstance(e, Var):
        return Var(mapping(e.index))
    if isinstance(e, Const):
        return e
    if isinstance(e, Neg):
        return Neg(remap(e.arg, mapping))
    if isinstance(e, BinOp):
        return BinOp(e.op, remap(e.left, mapping), remap(e.right, mapping))
    if isinstance(e, Pow):
        return Pow(remap(e.base, mapping), e.exponent)
    if isinstance(e, Call):
        return Call(e.name, tuple(remap(a, mapping) for a in e.args))
    raise TypeError(f"not an expression node: {e!r}")


def derivative(e: Expr, i: int) -> Expr:
    """Symbolic partial derivative with respect to ``Var(i)``.

    min/max/abs nodes that depend on ``Var(i)`` raise NonSmoothError.
    """
    if isinstance(e, Const):
        return Const(0.0)
    if isinstance(e, Var):
        return Const(1.0 if e.index == i else 0.0)
    if isinstance(e, Neg):
        return neg(derivative(e.arg, i))
    if isinstance(e, BinOp):
        a, b = e.left, e.right
        da, db = derivative(a, i), derivative(b, i)
        if e.op == "+":
            return add(da, db)
        if e.op == "-":
            return sub(da, db)
        if e.op == "*":
            return add(mul(da, b), mul(a, db))
        return div(sub(mul(da, b), mul(a, db)), power(b, 2))
    if isinstance(e, Pow):
        k = e.exponent
        if k == 0:
            return Const(0.0)
        return mul(mul(Const(float(k)), power(e.base, k - 1)), derivative(e.base, i))
    if isinstance(e, Call):
        if i in variables(e):
            raise NonSmoothError(f"{e.name}() is not differentiable")
        return Const(0.0)
    raise TypeError(f"not an expression node: {e!r}")


def grad(e: Expr, n: int | None = None, wrt: Sequence[int] | None = None) -> list[Expr]:
    """Partial derivatives of ``e`` with respect to ``wrt`` (default: all
    ``n`` variables)."""
    if wrt is None:
        n = n_vars_required(e) if n is None else n
        wrt = range(n)
    return [derivative(e, i) for i in wrt]


# ----------------------------------------------------------- interval bounds

def _imul(a, b):
    c = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(c), max(c)


def _ipow(a, k):
    lo, hi = a
    if k == 0:
        return 1.0, 1.0
    if k % 2 == 1 or lo >= 0:
        return lo ** k, hi ** k
    if hi <= 0:
        return hi ** k, lo ** k
    return 0.0, max(lo ** k, hi ** k)


def interval(e: Expr, lower, upper) -> tuple[float, float]:
    """Range enclosure of ``e`` over the box ``[lower, upper]``.

    Exact when every variable occurs at most once (e.g. affine bounds).
    """
    if isinstance(e, Const):
        return e.value, e.value
    if isinstance(e, Var):
        return float(lower[e.index]), float(upper[e.index])
    if isinstance(e, Neg):
        lo, hi = interval(e.arg, lower, upper)
        return -hi, -lo
    if isinstance(e, BinOp):
        a = interval(e.left, lower, upper)
        b = interval(e.right, lower, upper)
        if e.op == "+":
            return a[0] + b[0], a[1] + b[1]
        if e.op == "-":
            return a[0] - b[1], a[1] - b[0]
        if e.op == "*":
            return _imul(a, b)
        if b[0] <= 0.0 <= b[1]:
            raise IntervalError("divisor interval contains zero")
        return _imul(a, (1.0 / b[1], 1.0 / b[0]))
    if isinstance(e, Pow):
        return _ipow(interval(e.base, lower, upper), e.exponent)
    if isinstance(e, Call):
        parts = [interval(a, lower, upper) for a in e.args]
        if e.name == "min":
            return min(p[0] for p in parts), min(p[1] for p in parts)
        if e.name == "max":
            return max(p[0] for p in parts), max(p[1] for p in parts)
        lo, hi = parts[0]
        if lo >= 0:
            return lo, hi
        if hi <= 0:
            return -hi, -lo
        return 0.0, max(-lo, hi)
    raise IntervalError(f"unsupported node {e!r}")
