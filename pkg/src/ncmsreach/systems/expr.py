"""Arithmetic expressions over state coordinates ``x1..xn`` and time ``t``.

Grammar, loosest binding first::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' integer)?          integer: 2, -2 or (-2)
    atom   := number | x<i> | t | func '(' expr (',' expr)* ')' | '(' expr ')'

Functions: sin, cos, exp, sqrt, abs (one argument), min, max (two or more).
Predicates chain comparisons between expressions, e.g. ``0.9 <= sqrt(x1^2 + x2^2) <= 1.1``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence, Union

from ..errors import EvaluationError, ParseError

UNARY_FUNCS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "sqrt": math.sqrt,
    "abs": abs,
}
NARY_FUNCS = {"min": min, "max": max}
COMPARATORS = ("<=", ">=", "<", ">")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Time:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Expr = Union[Num, Var, Time, Neg, Bin, Pow, Call]

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|>=|[-+*/^(),<>])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, dim: int | None):
        self.toks = _tokenize(text)
        self.i = 0
        self.dim = dim

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text:
            raise ParseError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}", self.tok.pos)
        return self.advance()

    def fail(self):
        tok = self.tok
        what = repr(tok.text) if tok.kind != "end" else "end of input"
        raise ParseError(f"unexpected {what}", tok.pos)

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.text in ("+", "-"):
            op = self.advance().text
            node = Bin(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.advance().text
            node = Bin(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok.text != "^":
            return base
        self.advance()
        paren = self.tok.text == "("
        if paren:
            self.advance()
        sign = 1
        if self.tok.text == "-":
            self.advance()
            sign = -1
        if self.tok.kind != "num" or not self.tok.text.isdigit():
            raise ParseError("exponent must be an integer constant", self.tok.pos)
        exponent = sign * int(self.advance().text)
        if paren:
            self.expect(")")
        return Pow(base, exponent)

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            value = float(tok.text)
            if not math.isfinite(value):
                raise ParseError(f"number {tok.text} overflows", tok.pos)
            return Num(value)
        if tok.kind == "name":
            self.advance()
            if tok.text in UNARY_FUNCS or tok.text in NARY_FUNCS:
                return self.call(tok)
            if tok.text == "t":
                return Time()
            m = re.fullmatch(r"x([1-9]\d*)", tok.text)
            if not m:
                raise ParseError(f"unknown identifier {tok.text!r}", tok.pos)
            index = int(m.group(1))
            if self.dim is not None and index > self.dim:
                raise ParseError(f"variable {tok.text} exceeds dimension {self.dim}", tok.pos)
            return Var(index)
        if tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        self.fail()

    def call(self, name_tok: _Tok) -> Expr:
        self.expect("(")
        args = [self.expr()]
        while self.tok.text == ",":
            self.advance()
            args.append(self.expr())
        self.expect(")")
        name = name_tok.text
        if name in UNARY_FUNCS and len(args) != 1:
            raise ParseError(f"{name} takes one argument, got {len(args)}", name_tok.pos)
        if name in NARY_FUNCS and len(args) < 2:
            raise ParseError(f"{name} takes at least two arguments", name_tok.pos)
        return Call(name, tuple(args))


def parse_expr(text: str, dim: int | None = None) -> Expr:
    p = _Parser(text, dim)
    node = p.expr()
    if p.tok.kind != "end":
        p.fail()
    return node


# -- printing ----------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node: Expr) -> int:
    if isinstance(node, Bin):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def _fmt_num(v: float) -> str:
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_text(node: Expr) -> str:
    """Canonical text; parsing it gives back the same tree."""
    if isinstance(node, Num):
        s = _fmt_num(node.value)
        return f"({s})" if node.value < 0 else s
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Time):
        return "t"
    if isinstance(node, Neg):
        inner = to_text(node.operand)
        return "-" + (f"({inner})" if _prec(node.operand) < 3 else inner)
    if isinstance(node, Bin):
        p = _PREC[node.op]
        left = to_text(node.left)
        right = to_text(node.right)
        if _prec(node.left) < p:
            left = f"({left})"
        if _prec(node.right) <= p:
            right = f"({right})"
        return f"{left} {node.op} {right}"
    if isinstance(node, Pow):
        base = to_text(node.base)
        if _prec(node.base) < 5:
            base = f"({base})"
        exp = str(node.exponent) if node.exponent >= 0 else f"({node.exponent})"
        return f"{base}^{exp}"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_text(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


# -- evaluation --------------------------------------------------------------


def eval_expr(node: Expr, x: Sequence[float], t: float = 0.0) -> float:
    try:
        value = _eval(node, x, t)
    except ZeroDivisionError as exc:
        raise EvaluationError("division by zero") from exc
    except OverflowError as exc:
        raise EvaluationError("numeric overflow") from exc
    if not math.isfinite(value):
        raise EvaluationError(f"non-finite result {value}")
    return value


def _eval(node: Expr, x: Sequence[float], t: float) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        if node.index > len(x):
            raise EvaluationError(f"x{node.index} undefined for a {len(x)}-dimensional state")
        return float(x[node.index - 1])
    if isinstance(node, Time):
        return float(t)
    if isinstance(node, Neg):
        return -_eval(node.operand, x, t)
    if isinstance(node, Bin):
        a = _eval(node.left, x, t)
        b = _eval(node.right, x, t)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b
    if isinstance(node, Pow):
        return _eval(node.base, x, t) ** node.exponent
    if isinstance(node, Call):
        args = [_eval(a, x, t) for a in node.args]
        if node.name == "sqrt" and args[0] < 0:
            raise EvaluationError(f"sqrt of negative number {args[0]}")
        if node.name in UNARY_FUNCS:
            return float(UNARY_FUNCS[node.name](args[0]))
        return float(NARY_FUNCS[node.name](args))
    raise TypeError(f"not an expression node: {node!r}")


# -- predicates --------------------------------------------------------------


@dataclass(frozen=True)
class Predicate:
    """Chained comparison ``e0 op1 e1 op2 e2 ...``, true when every link holds."""

    terms: tuple
    ops: tuple
    text: str = ""

    def __call__(self, x: Sequence[float], t: float = 0.0) -> bool:
        values = [eval_expr(e, x, t) for e in self.terms]
        for op, a, b in zip(self.ops, values, values[1:]):
            if op == "<" and not a < b:
                return False
            if op == "<=" and not a <= b:
                return False
            if op == ">" and not a > b:
                return False
            if op == ">=" and not a >= b:
                return False
        return True

    def __str__(self) -> str:
        parts = [to_text(self.terms[0])]
        for op, e in zip(self.ops, self.terms[1:]):
            parts += [op, to_text(e)]
        return " ".join(parts)


def parse_predicate(text: str, dim: int | None = None) -> Predicate:
    p = _Parser(text, dim)
    terms = [p.expr()]
    ops = []
    while p.tok.text in COMPARATORS:
        ops.append(p.advance().text)
        terms.append(p.expr())
    if not ops:
        raise ParseError("a constraint needs a comparison (<, <=, >, >=)", p.tok.pos)
    if p.tok.kind != "end":
        p.fail()
    return Predicate(tuple(terms), tuple(ops), text.strip())
