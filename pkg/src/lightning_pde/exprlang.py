"""A tiny expression language for real boundary data ``h(x, y)``.

Grammar (EBNF)::

    expr     = term { ("+" | "-") term } ;
    term     = unary { ("*" | "/") unary } ;
    unary    = "-" unary | power ;
    power    = primary [ "^" exponent ] ;
    exponent = [ "-" ] integer [ "^" exponent ] ;
    primary  = number | "x" | "y" | "pi"
             | func "(" expr ")"
             | ("re_zpow" | "im_zpow") "(" [ "-" ] integer ")"
             | "(" expr ")" ;
    func     = "sin" | "cos" | "exp" | "log" | "abs" | "sqrt" ;

``^`` binds tighter than unary minus (``-x^2 == -(x^2)``) and is right
associative; the exponent must be an integer literal, so ``x^2^3`` folds to
``x^8``.  ``re_zpow(m)`` and ``im_zpow(m)`` are ``Re (x+iy)^m`` and
``Im (x+iy)^m``.

Evaluation works on floats or numpy arrays.  Logarithms and square roots of
out-of-range values and divisions by zero raise :class:`ExprDomainError`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

FUNCTIONS = ("sin", "cos", "exp", "log", "abs", "sqrt")
ZPOW = ("re_zpow", "im_zpow")


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ExprDomainError(ArithmeticError):
    pass


# ------------------------------------------------------------------ nodes

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


@dataclass(frozen=True)
class ZPow:
    part: str   # "re" or "im"
    m: int


Expr = Union[Num, Var, Neg, BinOp, Pow, Call, ZPow]


# ------------------------------------------------------------------ lexer

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(src: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", pos)
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(src)))
    return toks


# ----------------------------------------------------------------- parser

class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text:
            found = repr(self.tok.text) if self.tok.kind != "end" else "end of input"
            raise ExprSyntaxError(f"expected {text!r}, found {found}", self.tok.pos)
        return self.take()

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            raise ExprSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.tok.text in ("+", "-"):
            op = self.take().text
            e = BinOp(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.take().text
            e = BinOp(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.tok.text == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.tok.text == "^":
            self.take()
            return Pow(base, self.exponent())
        return base

    def integer(self, what: str = "exponent") -> int:
        sign = 1
        if self.tok.text == "-":
            self.take()
            sign = -1
        t = self.tok
        if t.kind != "num":
            found = repr(t.text) if t.kind != "end" else "end of input"
            raise ExprSyntaxError(f"expected an integer, found {found}", t.pos)
        value = float(t.text)
        if not value.is_integer():
            raise ExprSyntaxError(f"non-integer {what} {t.text!r}", t.pos)
        self.take()
        return sign * int(value)

    def exponent(self) -> int:
        n = self.integer()
        if self.tok.text == "^":
            self.take()
            inner = self.exponent()
            if inner < 0:
                raise ExprSyntaxError("negative power of an exponent", self.tok.pos)
            n = n ** inner
        return n

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.take()
            return Num(float(t.text))
        if t.kind == "name":
            self.take()
            if t.text in ("x", "y"):
                return Var(t.text)
            if t.text == "pi":
                return Num(math.pi)
            if t.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(t.text, arg)
            if t.text in ZPOW:
                self.expect("(")
                m = self.integer("power")
                self.expect(")")
                return ZPow(t.text[:2], m)
            raise ExprSyntaxError(f"unknown identifier {t.text!r}", t.pos)
        if t.text == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        found = repr(t.text) if t.kind != "end" else "end of input"
        raise ExprSyntaxError(f"expected an operand, found {found}", t.pos)


def parse(src: str) -> Expr:
    """Parse ``src`` into an expression tree."""
    return _Parser(src).parse()


# ---------------------------------------------------------------- printer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_source(e: Expr) -> str:
    """Render a tree with the minimal parentheses that reparse to the same tree."""
    if isinstance(e, Num):
        if e.value == math.pi:
            return "pi"
        if math.isinf(e.value):
            return "1e999"
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        inner = to_source(e.operand)
        if isinstance(e.operand, BinOp):
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        left = to_source(e.left)
        right = to_source(e.right)
        if isinstance(e.left, BinOp) and _PREC[e.left.op] < p:
            left = f"({left})"
        if isinstance(e.right, BinOp) and _PREC[e.right.op] <= p:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    if isinstance(e, Pow):
        base = to_source(e.base)
        if isinstance(e.base, (BinOp, Neg, Pow)):
            base = f"({base})"
        return f"{base}^{e.exponent}"
    if isinstance(e, Call):
        return f"{e.func}({to_source(e.arg)})"
    if isinstance(e, ZPow):
        return f"{e.part}_zpow({e.m})"
    raise TypeError(f"not an expression node: {e!r}")


# -------------------------------------------------------------- evaluator

def _domain(cond, what: str):
    if np.any(cond):
        raise ExprDomainError(what)


def _eval(e: Expr, x, y):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return x if e.name == "x" else y
    if isinstance(e, Neg):
        return -_eval(e.operand, x, y)
    if isinstance(e, BinOp):
        a = _eval(e.left, x, y)
        b = _eval(e.right, x, y)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        _domain(np.asarray(b) == 0, "division by zero")
        return np.true_divide(a, b)
    if isinstance(e, Pow):
        base = _eval(e.base, x, y)
        if e.exponent < 0:
            _domain(np.asarray(base) == 0, "division by zero (negative power of 0)")
            return 1.0 / np.power(np.asarray(base, dtype=float), -e.exponent)
        return np.power(np.asarray(base, dtype=float), e.exponent)
    if isinstance(e, Call):
        v = _eval(e.arg, x, y)
        if e.func == "log":
            _domain(np.asarray(v) <= 0, "log of a nonpositive number")
        elif e.func == "sqrt":
            _domain(np.asarray(v) < 0, "sqrt of a negative number")
        return getattr(np, e.func)(v)
    if isinstance(e, ZPow):
        z = np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
        if e.m < 0:
            _domain(z == 0, "negative power of z at the origin")
            w = 1.0 / np.power(z, -e.m)
        else:
            w = np.power(z, e.m)
        return w.real if e.part == "re" else w.imag
    raise TypeError(f"not an expression node: {e!r}")


def eval_expr(e: Expr, x, y):
    """Evaluate at scalar or array coordinates (IEEE double precision)."""
    with np.errstate(all="ignore"):
        out = _eval(e, x, y)
    if np.ndim(out) == 0 and np.ndim(x) == 0 and np.ndim(y) == 0:
        return float(out)
    return np.broadcast_to(np.asarray(out, dtype=float), np.broadcast(x, y).shape).copy()


def as_function(e: Union[Expr, str]):
    """Wrap an expression (or its source) as a vectorized ``h(x, y)``."""
    tree = parse(e) if isinstance(e, str) else e
    return lambda x, y: eval_expr(tree, x, y)
