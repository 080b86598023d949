"""Exact multivariate rational functions over QQ on a coordinate chart.

An :class:`Expr` is a reduced fraction ``num/den`` of polynomials with
rational coefficients.  The canonical form is: ``gcd(num, den) == 1`` and
``den`` is monic with respect to graded lexicographic order in the declared
coordinate order.  Two canonical fractions are equal as rational functions
exactly when their numerators and denominators coincide, so ``==`` decides
mathematical equality.

Polynomial arithmetic and multivariate gcd come from FLINT (``python-flint``
``fmpq_mpoly``); everything above that (canonical form, calculus,
evaluation, the text grammar) lives here.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations_with_replacement
from typing import Mapping, Union

import flint
from flint import fmpq, fmpq_mpoly as PolyElement

__all__ = [
    "Chart",
    "Expr",
    "ParseError",
    "UnknownIdentifierError",
    "PoleError",
    "parse",
    "random_poly",
]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class ParseError(ValueError):
    """Malformed expression text; ``pos`` is the 0-based offset of the fault."""

    def __init__(self, message: str, pos: int, source: str = ""):
        self.pos = pos
        self.source = source
        super().__init__(f"{message} at position {pos}")


class UnknownIdentifierError(ParseError):
    pass


class PoleError(ZeroDivisionError):
    """The denominator of an expression vanishes at the evaluation point."""


@dataclass(frozen=True)
class Chart:
    """Ordered coordinate names of a single chart."""

    names: tuple[str, ...]

    def __init__(self, names):
        if isinstance(names, str):
            names = [n for n in re.split(r"[\s,]+", names) if n]
        names = tuple(names)
        if not names:
            raise ValueError("a chart needs at least one coordinate")
        for n in names:
            if not isinstance(n, str) or not _IDENT.match(n):
                raise ValueError(f"invalid coordinate name {n!r}")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate coordinate names in {names}")
        object.__setattr__(self, "names", names)

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"{name!r} is not a coordinate of {self}") from None

    def extend(self, name: str) -> "Chart":
        if name in self.names:
            raise ValueError(f"coordinate {name!r} already in chart {self.names}")
        return Chart(self.names + (name,))

    @cached_property
    def ring(self) -> "_Ring":
        return _Ring(self.names)

    def coord(self, name_or_index: Union[str, int]) -> "Expr":
        i = name_or_index if isinstance(name_or_index, int) else self.index(name_or_index)
        return Expr._raw(self, self.ring.gens[i], self.ring.one)

    def coords(self) -> tuple["Expr", ...]:
        return tuple(self.coord(i) for i in range(self.dim))

    def const(self, value) -> "Expr":
        f = _to_fraction(value)
        return Expr._raw(self, self.ring.ctx.constant(fmpq(f.numerator, f.denominator)), self.ring.one)

    def zero(self) -> "Expr":
        return Expr._raw(self, self.ring.zero, self.ring.one)

    def one(self) -> "Expr":
        return Expr._raw(self, self.ring.one, self.ring.one)

    def __str__(self):
        return "(" + ", ".join(self.names) + ")"

    def __getstate__(self):
        return {"names": self.names}

    def __setstate__(self, state):
        object.__setattr__(self, "names", state["names"])


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass an int, str or Fraction")
    # flint.fmpq and other numerator/denominator types
    return Fraction(int(value.numerator), int(value.denominator))


class _Ring:
    """FLINT context in graded lexicographic order plus cached constants."""

    def __init__(self, names):
        self.ctx = flint.fmpq_mpoly_ctx.get(tuple(names), "deglex")
        self.gens = self.ctx.gens()
        self.zero = self.ctx.constant(0)
        self.one = self.ctx.constant(1)


def _lc(p: PolyElement):
    return p.leading_coefficient()


def _canonical(num: PolyElement, den: PolyElement):
    ctx = num.context()
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return num, ctx.constant(1)
    if den.is_constant():
        c = _lc(den)
        return (num / c if c != 1 else num), ctx.constant(1)
    g = num.gcd(den)
    if not g.is_constant():
        num = num / g
        den = den / g
    c = _lc(den)
    if c != 1:
        num = num / c
        den = den / c
    return num, den


class Expr:
    """Immutable canonical rational function on a chart."""

    __slots__ = ("chart", "num", "den", "_hash", "_d")

    def __init__(self, chart: Chart, num: PolyElement, den: PolyElement | None = None):
        if den is None:
            den = chart.ring.one
        num, den = _canonical(num, den)
        self._init(chart, num, den)

    def _init(self, chart, num, den):
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "_hash", None)
        object.__setattr__(self, "_d", None)

    @classmethod
    def _raw(cls, chart, num, den):
        e = cls.__new__(cls)
        e._init(chart, num, den)
        return e

    def __setattr__(self, key, value):
        raise AttributeError("Expr is immutable")

    def __reduce__(self):
        return (parse, (str(self), self.chart))

    # ---------------------------------------------------------------- helpers
    def _coerce(self, other) -> "Expr":
        if isinstance(other, Expr):
            if other.chart != self.chart:
                raise ValueError(f"chart mismatch: {self.chart} vs {other.chart}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.chart.const(other)
        return NotImplemented

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero()

    @property
    def is_polynomial(self) -> bool:
        return self.den == self.chart.ring.one

    @property
    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def __bool__(self):
        return not self.num.is_zero()

    def total_degree(self) -> int:
        """Total degree of the numerator (``-1`` for zero)."""
        if self.num.is_zero():
            return -1
        return self.num.total_degree()

    # ------------------------------------------------------------ arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.num, self.den, other.num, other.den
        one = self.chart.ring.one
        # Henrici: with gcd(a, b) = gcd(c, d) = 1 only gcd(b, d) can cancel.
        if b == one and d == one:
            return Expr._raw(self.chart, a + c, one)
        if b == one:
            return Expr._raw(self.chart, a * d + c, d)
        if d == one:
            return Expr._raw(self.chart, a + c * b, b)
        g = b.gcd(d)
        if g.is_constant():
            return Expr._raw(self.chart, a * d + c * b, b * d)
        bg, dg = b / g, d / g
        num = a * dg + c * bg
        if num.is_zero():
            return self.chart.zero()
        h = num.gcd(g)
        if not h.is_constant():
            num = num / h
            g = g / h
        return Expr(self.chart, num, bg * dg * g)

    __radd__ = __add__

    def __neg__(self):
        return Expr._raw(self.chart, -self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.num, self.den, other.num, other.den
        one = self.chart.ring.one
        if a.is_zero() or c.is_zero():
            return self.chart.zero()
        if d != one:
            g = a.gcd(d)
            if not g.is_constant():
                a, d = a / g, d / g
        if b != one:
            g = c.gcd(b)
            if not g.is_constant():
                c, b = c / g, b / g
        if b == one and d == one:
            return Expr._raw(self.chart, a * c, one)
        return Expr(self.chart, a * c, b * d)

    __rmul__ = __mul__

    def inverse(self) -> "Expr":
        if not self.num:
            raise ZeroDivisionError("division by the zero expression")
        return Expr(self.chart, self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        if k < 0:
            return self.inverse() ** (-k)
        return Expr._raw(self.chart, self.num**k, self.den**k)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.chart.const(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return self.chart == other.chart and self.num == other.num and self.den == other.den

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.chart, tuple(map(str, self.num.coeffs())), tuple(self.num.monoms()), str(self.den)))
            object.__setattr__(self, "_hash", h)
        return h

    # ---------------------------------------------------------------- calculus
    def diff(self, coord: Union[str, int]) -> "Expr":
        """Exact partial derivative (quotient rule, then canonicalized)."""
        i = coord if isinstance(coord, int) else self.chart.index(coord)
        if not 0 <= i < self.chart.dim:
            raise KeyError(f"coordinate index {i} out of range for {self.chart}")
        cache = self._d
        if cache is None:
            cache = {}
            object.__setattr__(self, "_d", cache)
        res = cache.get(i)
        if res is None:
            res = cache[i] = self._diff(i)
        return res

    def _diff(self, i: int) -> "Expr":
        dn = self.num.derivative(i)
        if self.den.is_constant():
            return Expr._raw(self.chart, dn, self.den)
        dd = self.den.derivative(i)
        if dd.is_zero():
            return Expr(self.chart, dn, self.den)
        # d/dx (a/b) = (a' b - a b') / b^2; cancel against b first
        g = self.den.gcd(dd)
        bq, ddq = self.den / g, dd / g
        return Expr(self.chart, dn * bq - self.num * ddq, self.den * bq)

    def gradient(self) -> tuple["Expr", ...]:
        return tuple(self.diff(i) for i in range(self.chart.dim))

    def eval(self, point: Mapping[str, object]) -> Fraction:
        """Exact value at a rational point; raises :class:`PoleError` on a pole."""
        used = [max(a, b) > 0 for a, b in zip(self.num.degrees(), self.den.degrees())]
        missing = [n for n, u in zip(self.chart.names, used) if u and n not in point]
        if missing:
            raise KeyError(f"point does not assign {missing}")
        vals = [_to_fraction(point.get(n, 0)) for n in self.chart.names]
        vals = [fmpq(v.numerator, v.denominator) for v in vals]
        d = self.den(*vals)
        if d == 0:
            raise PoleError(f"{self} has a pole at {dict(point)}")
        v = self.num(*vals) / d
        return Fraction(int(v.numerator), int(v.denominator))

    def subs_chart(self, chart: Chart) -> "Expr":
        """Re-express on a chart whose coordinates include this one's."""
        missing = [n for n in self.chart.names if n not in chart.names]
        if missing:
            raise ValueError(f"{chart} lacks coordinates {missing}")
        ctx = chart.ring.ctx
        return Expr._raw(chart, self.num.project_to_context(ctx), self.den.project_to_context(ctx))

    # ---------------------------------------------------------------- printing
    def __str__(self):
        num = _format_poly(self.num, self.chart.names)
        if self.den.is_constant():
            return num
        den = _format_poly(self.den, self.chart.names)
        if len(self.num) > 1 or num.startswith("-"):
            num = f"({num})"
        if len(self.den) > 1 or "*" in den or "^" in den:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"Expr({str(self)!r}, chart={self.chart.names})"


def _format_poly(p: PolyElement, names) -> str:
    if p.is_zero():
        return "0"
    out = []
    for monom, coeff in p.terms():
        c = _to_fraction(coeff)
        factors = []
        for name, e in zip(names, monom):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = f"{mag}*" + "*".join(factors)
        sign = "-" if c < 0 else "+"
        if not out:
            out.append(body if sign == "+" else "-" + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


# ------------------------------------------------------------------ parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?|\.\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(source: str):
    pos = 0
    tokens = []
    while True:
        while pos < len(source) and source[pos].isspace():
            pos += 1
        if pos >= len(source):
            break
        m = _TOKEN.match(source, pos)
        if not m:
            raise ParseError(f"unexpected character {source[pos]!r}", pos, source)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, chart: Chart):
        self.source = source
        self.chart = chart
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.take()
        if text != value:
            raise ParseError(f"expected {value!r}, found {text or 'end of input'!r}", pos, self.source)

    def expr(self) -> Expr:
        value = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> Expr:
        value, _ = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            pos = self.peek()[2]
            rhs, literal_zero = self.factor()
            if op == "*":
                value = value * rhs
            else:
                if literal_zero:
                    raise ParseError("division by literal zero", pos, self.source)
                if rhs.is_zero:
                    raise ParseError("division by an expression that is identically zero", pos, self.source)
                value = value / rhs
        return value

    def factor(self):
        negate = False
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            negate = True
        value, literal_zero = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] in ("-", "+") and self.peek()[0] == "op":
                sign = -1 if self.take()[1] == "-" else 1
            kind, text, pos = self.take()
            if kind != "num" or not text.isdigit():
                raise ParseError("exponent must be an integer", pos, self.source)
            k = sign * int(text)
            if k < 0 and value.is_zero:
                raise ParseError("negative power of zero", pos, self.source)
            value = value**k
            literal_zero = literal_zero and k > 0
        if negate:
            value = -value
        return value, literal_zero

    def atom(self):
        kind, text, pos = self.take()
        if kind == "num":
            c = Fraction(text)
            return self.chart.const(c), c == 0
        if kind == "ident":
            if text not in self.chart.names:
                raise UnknownIdentifierError(f"unknown identifier {text!r}", pos, self.source)
            return self.chart.coord(text), False
        if text == "(":
            value = self.expr()
            self.expect(")")
            return value, False
        raise ParseError(f"unexpected {text or 'end of input'!r}", pos, self.source)


def parse(source: str, chart: Chart) -> Expr:
    """Parse expression text on ``chart`` into a canonical :class:`Expr`.

    Grammar::

        expr   := term (('+'|'-') term)*
        term   := factor (('*'|'/') factor)*
        factor := '-'? atom ('^' signed_int)?
        atom   := rational_literal | identifier | '(' expr ')'

    ``-x^2`` is ``-(x^2)``.
    """
    p = _Parser(source, chart)
    if p.peek()[0] == "end":
        raise ParseError("empty expression", 0, source)
    value = p.expr()
    kind, text, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected {text!r}", pos, source)
    return value


def random_poly(chart: Chart, degree: int, seed: int, *, coeff_range: int = 3, density: float = 0.6) -> Expr:
    """Deterministic random polynomial of total degree ``<= degree``."""
    if degree < 0:
        raise ValueError("degree must be >= 0")
    rng = random.Random(seed)
    terms = {}
    for d in range(degree + 1):
        for combo in combinations_with_replacement(range(chart.dim), d):
            if rng.random() >= density:
                continue
            c = rng.randint(-coeff_range, coeff_range)
            if c == 0:
                continue
            monom = [0] * chart.dim
            for i in combo:
                monom[i] += 1
            terms[tuple(monom)] = c
    R = chart.ring
    return Expr._raw(chart, R.ctx.from_dict(terms) if terms else R.zero, R.one)
