"""Thiele continued-fraction interpolation in exact arithmetic."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable

import gmpy2

from ..errors import DegenerateSampleError, UsageError
from .linalg import to_fraction
from .poly import Poly, as_fraction
from .ratfn import RationalFn

mpq = gmpy2.mpq


@dataclass(frozen=True)
class ThieleFit:
    coefficients: tuple   # continued-fraction coefficients a_0, a_1, ...
    nodes: tuple          # x_0, x_1, ... matching the coefficients
    confirmed: int        # points beyond the last node that the fraction reproduces exactly

    @cached_property
    def fn(self) -> RationalFn:
        """Collapsed num/den form (computed on first access; costly for long fractions)."""
        num, den = _collapse([mpq(c) for c in self.coefficients], [mpq(x) for x in self.nodes])
        return RationalFn(num, den)


def thiele_fit(points: Iterable[tuple]) -> ThieleFit:
    """Build f(x) = a0 + (x-x0)/(a1 + (x-x1)/(a2 + ...)) through ``points``.

    Stops as soon as the current inverted differences are constant over all
    remaining points: those points are then reproduced exactly and counted
    in ``confirmed``.
    """
    pts = [(as_fraction(x), as_fraction(y)) for x, y in points]
    if not pts:
        raise UsageError("no interpolation points")
    xs = [mpq(x) for x, _ in pts]
    if len(set(xs)) != len(xs):
        raise UsageError("duplicate abscissae in interpolation data")
    phi = [mpq(y) for _, y in pts]
    n = len(xs)
    coeffs = []
    confirmed = 0
    for k in range(n):
        ak = phi[k]
        coeffs.append(ak)
        if all(phi[i] == ak for i in range(k + 1, n)):
            confirmed = n - k - 1
            break
        xk = xs[k]
        for i in range(k + 1, n):
            d = phi[i] - ak
            if d == 0:
                raise DegenerateSampleError(
                    f"inverted difference vanishes at level {k} (x={to_fraction(xs[i])})")
            phi[i] = (xs[i] - xk) / d
    nodes = xs[: len(coeffs)]
    return ThieleFit(tuple(to_fraction(c) for c in coeffs), tuple(to_fraction(x) for x in nodes), confirmed)


def _collapse(coeffs, nodes) -> tuple[Poly, Poly]:
    # backward recurrence on integer-free mpq coefficient lists
    num = [coeffs[-1]]
    den = [mpq(1)]
    for k in range(len(coeffs) - 2, -1, -1):
        a, x0 = coeffs[k], nodes[k]
        # new_num = a*num + (x - x0)*den ; new_den = num
        size = max(len(num), len(den) + 1)
        new = [mpq(0)] * size
        for i, c in enumerate(num):
            new[i] += a * c
        for i, c in enumerate(den):
            new[i] -= x0 * c
            new[i + 1] += c
        num, den = new, num
    return Poly([to_fraction(c) for c in num]), Poly([to_fraction(c) for c in den])


def thiele_interpolate(points: Iterable[tuple]) -> RationalFn:
    return thiele_fit(points).fn


def evaluate_continued_fraction(coeffs, nodes, x) -> Fraction:
    x = as_fraction(x)
    acc = as_fraction(coeffs[-1])
    for k in range(len(coeffs) - 2, -1, -1):
        acc = as_fraction(coeffs[k]) + (x - as_fraction(nodes[k])) / acc
    return acc
