"""Truncated power series with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from ..errors import DomainError, UsageError
from .poly import Poly, as_fraction


class TruncSeries:
    """c_0 + c_1 x + ... + c_K x**K  (mod x**(K+1)).

    Coefficients above ``order`` are never reported; every operation truncates.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Iterable, order: int | None = None):
        cs = [as_fraction(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise UsageError("series order must be non-negative")
        cs = cs[: order + 1]
        cs.extend([Fraction(0)] * (order + 1 - len(cs)))
        self.order = order
        self.coeffs = tuple(cs)

    @classmethod
    def _raw(cls, coeffs: tuple) -> "TruncSeries":
        obj = object.__new__(cls)
        obj.order = len(coeffs) - 1
        obj.coeffs = coeffs
        return obj

    @classmethod
    def zero(cls, order: int) -> "TruncSeries":
        return cls._raw((Fraction(0),) * (order + 1))

    @classmethod
    def one(cls, order: int) -> "TruncSeries":
        return cls._raw((Fraction(1),) + (Fraction(0),) * order)

    @classmethod
    def from_poly(cls, poly: Poly, order: int) -> "TruncSeries":
        return cls(poly.coeffs, order)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return self.order + 1

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, TruncSeries):
            return self.order == other.order and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"TruncSeries([{', '.join(str(c) for c in self.coeffs)}])"

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def mindeg(self) -> int:
        """Lowest index with a nonzero coefficient, or order+1 if the series is zero."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return self.order + 1

    def _check(self, other: "TruncSeries"):
        if not isinstance(other, TruncSeries):
            raise UsageError(f"expected TruncSeries, got {type(other).__name__}")
        if other.order != self.order:
            raise UsageError(f"series order mismatch: {self.order} vs {other.order}")

    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            c = as_fraction(other)
            return TruncSeries._raw((self.coeffs[0] + c,) + self.coeffs[1:])
        self._check(other)
        return TruncSeries._raw(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries._raw(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            c = as_fraction(other)
            return TruncSeries._raw(tuple(x * c for x in self.coeffs))
        self._check(other)
        a, b = self.coeffs, other.coeffs
        K = self.order
        out = [Fraction(0)] * (K + 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j in range(K + 1 - i):
                y = b[j]
                if y:
                    out[i + j] += x * y
        return TruncSeries._raw(tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncSeries):
            return self * other.recip()
        c = as_fraction(other)
        return TruncSeries._raw(tuple(x / c for x in self.coeffs))

    def recip(self) -> "TruncSeries":
        a = self.coeffs
        if not a[0]:
            raise DomainError("reciprocal of a series with zero constant term")
        inv0 = 1 / a[0]
        out = [inv0]
        for k in range(1, self.order + 1):
            s = Fraction(0)
            for j in range(1, k + 1):
                if a[j]:
                    s += a[j] * out[k - j]
            out.append(-s * inv0)
        return TruncSeries._raw(tuple(out))

    def derivative(self) -> "TruncSeries":
        if self.order < 1:
            raise UsageError("derivative needs order >= 1")
        return TruncSeries._raw(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def truncate(self, order: int) -> "TruncSeries":
        if order > self.order:
            raise UsageError(f"cannot extend a series of order {self.order} to {order}")
        return TruncSeries._raw(self.coeffs[: order + 1])

    def shift_down(self, k: int = 1) -> "TruncSeries":
        """Divide by x**k. The low coefficients must vanish."""
        if any(self.coeffs[:k]):
            raise DomainError(f"series is not divisible by x^{k}")
        return TruncSeries._raw(self.coeffs[k:])

    def to_poly(self) -> Poly:
        return Poly(self.coeffs)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def to_floats(self) -> list[float]:
        return [float(c) for c in self.coeffs]


def series_add(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    a._check(b)
    return a + b


def series_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    a._check(b)
    return a * b


def series_recip(a: TruncSeries) -> TruncSeries:
    return a.recip()


def series_derivative(a: TruncSeries) -> TruncSeries:
    return a.derivative()
