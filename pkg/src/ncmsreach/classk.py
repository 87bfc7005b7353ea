"""Class-K functions: continuous, strictly increasing, zero at zero.

Two representations are supported, both continuous by construction:
``linear`` (``f(x) = alpha*x``) and ``pwl``, a piecewise-linear knot table
starting at ``(0, 0)`` whose last segment is extended to infinity. Coefficients
are stored as exact fractions, so evaluating at a Fraction is exact while
evaluating at a float gives a float.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .core import as_fraction

Number = Union[int, float, Fraction]

_PAIR_RE = re.compile(r"\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)")


@dataclass(frozen=True)
class ClassKFunction:
    knots: tuple[tuple[Fraction, Fraction], ...]
    kind: str = "pwl"

    def __post_init__(self):
        knots = tuple((as_fraction(x), as_fraction(y)) for x, y in self.knots)
        if len(knots) < 2 or knots[0] != (0, 0):
            raise ValueError("knot table must start at (0, 0) and have at least two knots")
        for (x0, y0), (x1, y1) in zip(knots, knots[1:]):
            if not (x1 > x0 and y1 > y0):
                raise ValueError(f"knots must be strictly increasing: ({x0},{y0}) -> ({x1},{y1})")
        object.__setattr__(self, "knots", knots)

    @classmethod
    def linear(cls, alpha: Number) -> ClassKFunction:
        alpha = as_fraction(alpha)
        if alpha <= 0:
            raise ValueError(f"linear class-K coefficient must be positive, got {alpha}")
        return cls(((Fraction(0), Fraction(0)), (Fraction(1), alpha)), kind="linear")

    @classmethod
    def pwl(cls, knots: Sequence[tuple[Number, Number]]) -> ClassKFunction:
        return cls(tuple(knots), kind="pwl")

    @classmethod
    def parse(cls, text: str) -> ClassKFunction:
        """``"linear 0.5"`` or ``"pwl (0,0) (1,2) (3,4)"``."""
        head, _, rest = text.strip().partition(" ")
        if head == "linear":
            try:
                return cls.linear(as_fraction(rest))
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"bad linear coefficient {rest!r}") from exc
        if head == "pwl":
            pairs = _PAIR_RE.findall(rest)
            if not pairs or _PAIR_RE.sub("", rest).strip():
                raise ValueError(f"bad knot table {rest!r}")
            return cls.pwl([(as_fraction(x), as_fraction(y)) for x, y in pairs])
        raise ValueError(f"unknown class-K function {text!r}; use 'linear <a>' or 'pwl (x,y) ...'")

    @property
    def alpha(self) -> Fraction | None:
        return self.knots[1][1] if self.kind == "linear" else None

    def __call__(self, x: Number) -> Number:
        if x < 0:
            raise ValueError(f"class-K functions are defined on x >= 0, got {x}")
        knots = self.knots
        for (x0, y0), (x1, y1) in zip(knots, knots[1:]):
            if x <= x1:
                break
        slope = (y1 - y0) / (x1 - x0)
        if isinstance(x, float):
            return float(y0) + float(slope) * (x - float(x0))
        return y0 + slope * (as_fraction(x) - x0)

    def fminus(self, a: Number, b: Number) -> Number:
        """``a - f(a - b)`` for ``a >= b >= 0``."""
        if a < b:
            raise ValueError(f"fminus needs a >= b, got a={a}, b={b}")
        return a - self(a - b)

    def __str__(self) -> str:
        if self.kind == "linear":
            return f"linear {_fmt(self.alpha)}"
        return "pwl " + " ".join(f"({_fmt(x)},{_fmt(y)})" for x, y in self.knots)


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else format(float(q), ".12g")


def classk_eval(f: ClassKFunction, x: Number) -> Number:
    return f(x)


def classk_fminus(f: ClassKFunction, a: Number, b: Number) -> Number:
    return f.fminus(a, b)
