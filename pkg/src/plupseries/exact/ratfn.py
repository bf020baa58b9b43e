"""Exact rational functions num(x)/den(x) over Q."""

from __future__ import annotations

from fractions import Fraction

from ..errors import PoleAtOriginError, UsageError
from .poly import Poly, as_fraction, coerce_poly, format_poly, poly_gcd
from .series import TruncSeries

_OTHER_VAR = {"p": "q", "q": "p"}


class RationalFn:
    """Reduced ratio of polynomials: gcd(num, den) = 1 and den is monic.

    ``var`` only labels the variable ("p" or "q") for display and serialization.
    """

    __slots__ = ("num", "den", "var")

    def __init__(self, num, den=None, var: str = "p", reduce: bool = True):
        num = coerce_poly(num)
        den = Poly([1]) if den is None else coerce_poly(den)
        if den.is_zero():
            raise UsageError("rational function with zero denominator")
        if reduce:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den
        self.var = var

    def __eq__(self, other):
        if isinstance(other, RationalFn):
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __call__(self, x):
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError(f"pole at {x}")
        return self.num(x) / d

    def __repr__(self):
        return f"RationalFn(({format_poly(self.num, self.var)}) / ({format_poly(self.den, self.var)}))"

    def __add__(self, other):
        other = _coerce(other)
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den, self.var)

    def __sub__(self, other):
        other = _coerce(other)
        return RationalFn(self.num * other.den - other.num * self.den, self.den * other.den, self.var)

    def __mul__(self, other):
        other = _coerce(other)
        return RationalFn(self.num * other.num, self.den * other.den, self.var)

    def __truediv__(self, other):
        other = _coerce(other)
        return RationalFn(self.num * other.den, self.den * other.num, self.var)

    @property
    def degrees(self) -> tuple[int, int]:
        return self.num.degree, self.den.degree

    def expand(self, order: int) -> TruncSeries:
        return expand_rational(self, order)

    def substitute_affine(self) -> "RationalFn":
        return substitute_affine(self)


def _coerce(x) -> RationalFn:
    if isinstance(x, RationalFn):
        return x
    return RationalFn(Poly([as_fraction(x)]))


def _normalize(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if num.is_zero():
        return num, Poly([1])
    g = poly_gcd(num, den)
    if g.degree > 0:
        num = num // g
        den = den // g
    lead = den.lead
    return num / lead, den / lead


def expand_rational(f: RationalFn, order: int) -> TruncSeries:
    """Taylor coefficients at 0 through ``order`` by long division."""
    d = f.den.coeffs
    if not d[0]:
        raise PoleAtOriginError("denominator vanishes at 0")
    inv0 = 1 / d[0]
    n = f.num
    out = []
    for k in range(order + 1):
        s = n.coeff(k)
        for j in range(1, min(k, len(d) - 1) + 1):
            if d[j]:
                s -= d[j] * out[k - j]
        out.append(s * inv0)
    return TruncSeries._raw(tuple(out))


def substitute_affine(f: RationalFn) -> RationalFn:
    """Compose with x -> 1 - x (p = 1 - q). An involution."""
    return RationalFn(f.num.compose_affine(1, -1), f.den.compose_affine(1, -1),
                      var=_OTHER_VAR.get(f.var, f.var))


def rational_from_json(doc: dict) -> RationalFn:
    return RationalFn(Poly([Fraction(s) for s in doc["num"]]),
                      Poly([Fraction(s) for s in doc["den"]]), var=doc.get("variable", "p"))


def rational_to_json(f: RationalFn) -> dict:
    return {"variable": f.var,
            "num": [str(c) for c in f.num.coeffs],
            "den": [str(c) for c in f.den.coeffs]}
