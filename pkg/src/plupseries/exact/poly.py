"""Dense univariate polynomials over the rationals."""

from __future__ import annotations

from fractions import Fraction
from math import comb, lcm, gcd
from typing import Iterable, Sequence

from ..errors import UsageError


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        # floats are accepted only when they are exact binary fractions
        return Fraction(x)
    try:
        return Fraction(int(x.numerator), int(x.denominator))
    except AttributeError:
        raise TypeError(f"cannot convert {x!r} to an exact rational") from None


def _trim(coeffs: list) -> tuple:
    n = len(coeffs)
    while n and not coeffs[n - 1]:
        n -= 1
    return tuple(coeffs[:n])


class Poly:
    """Immutable polynomial; ``coeffs[i]`` is the coefficient of x**i.

    The zero polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        self.coeffs = _trim([as_fraction(c) for c in coeffs])

    @classmethod
    def _raw(cls, coeffs: tuple) -> "Poly":
        obj = object.__new__(cls)
        obj.coeffs = coeffs
        return obj

    @classmethod
    def x(cls) -> "Poly":
        return cls._raw((Fraction(0), Fraction(1)))

    @classmethod
    def const(cls, c) -> "Poly":
        return cls([c])

    @classmethod
    def monomial(cls, k: int, c=1) -> "Poly":
        return cls([0] * k + [c])

    @classmethod
    def binomial_term(cls, r: int, s: int) -> "Poly":
        """p**r * (1 - p)**s."""
        out = [Fraction(0)] * (r + s + 1)
        for j in range(s + 1):
            out[r + j] = Fraction(comb(s, j) * (-1) ** j)
        return cls._raw(_trim(out))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def mindeg(self) -> int:
        """Index of the lowest nonzero coefficient; -1 for the zero polynomial."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return -1

    # arithmetic -------------------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly([other])

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly._raw(_trim(out))

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = as_fraction(other)
            if not c:
                return Poly._raw(())
            return Poly._raw(tuple(x * c for x in self.coeffs))
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly._raw(())
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return Poly._raw(_trim(out))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise UsageError("negative polynomial power")
        result = Poly([1])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, c):
        c = as_fraction(c)
        return Poly._raw(tuple(x / c for x in self.coeffs))

    def __divmod__(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = other.degree
        lead = other.lead
        if len(rem) - 1 < dd:
            return Poly._raw(()), self
        quot = [Fraction(0)] * (len(rem) - dd)
        for k in range(len(rem) - 1 - dd, -1, -1):
            c = rem[k + dd] / lead
            quot[k] = c
            if c:
                for j, y in enumerate(other.coeffs):
                    rem[k + j] -= c * y
        return Poly._raw(_trim(quot)), Poly._raw(_trim(rem[:dd]))

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Poly":
        return Poly._raw(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        return self / self.lead

    def primitive(self) -> tuple[Fraction, "Poly"]:
        """Split into content * primitive integer polynomial with positive leading coefficient."""
        if not self.coeffs:
            return Fraction(0), self
        den = lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = gcd(g, v)
        if ints[-1] < 0:
            g = -g
        return Fraction(g, den), Poly._raw(tuple(Fraction(v // g) for v in ints))

    def compose_affine(self, a, b) -> "Poly":
        """Return self(a + b*x)."""
        a, b = as_fraction(a), as_fraction(b)
        lin = Poly([a, b])
        acc = Poly._raw(())
        for c in reversed(self.coeffs):
            acc = acc * lin + c
        return acc

    def to_floats(self) -> list[float]:
        return [float(c) for c in self.coeffs]

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __str__(self):
        return format_poly(self)


def format_poly(poly: Poly, var: str = "p") -> str:
    if poly.is_zero():
        return "0"
    terms = []
    for k, c in enumerate(poly.coeffs):
        if not c:
            continue
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            xs = var if k == 1 else f"{var}^{k}"
            body = xs if mag == 1 else f"{mag}*{xs}"
        terms.append(("-" if c < 0 else "+", body))
    sign, body = terms[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over Q. gcd(0, 0) is 0."""
    a, b = a.monic(), b.monic()
    if a.degree < b.degree:
        a, b = b, a
    while not b.is_zero():
        a, b = b, (a % b).monic()
    return a


def squarefree_decomposition(f: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: f = c * prod(g_i ** i) with each g_i squarefree and pairwise coprime."""
    if f.degree < 1:
        return []
    out = []
    fp = f.derivative()
    a = poly_gcd(f, fp)
    b = f // a
    c = fp // a
    d = c - b.derivative()
    i = 1
    while b.degree >= 1:
        g = poly_gcd(b, d)
        if g.degree >= 1:
            out.append((g.monic(), i))
        b = b // g
        c = d // g
        d = c - b.derivative()
        i += 1
    return out


def coerce_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, Sequence) and not isinstance(x, str):
        return Poly(x)
    return Poly([x])
