"""Padé approximants from exact series coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import DegenerateApproximantError, SingularSystemError, UsageError
from .linalg import solve_dense
from .poly import Poly
from .ratfn import RationalFn, expand_rational
from .series import TruncSeries


@dataclass(frozen=True)
class PadeApprox:
    """[m/mprime] approximant num/den normalized so that den(0) = 1."""

    m: int
    mprime: int
    num: Poly
    den: Poly

    @property
    def fn(self) -> RationalFn:
        return RationalFn(self.num, self.den)

    def __call__(self, x):
        return self.num(x) / self.den(x)


def pade(coeffs: TruncSeries, m: int, mprime: int) -> PadeApprox:
    if m < 0 or mprime < 0:
        raise UsageError("Padé degrees must be non-negative")
    if m + mprime > coeffs.order:
        raise UsageError(f"[{m}/{mprime}] needs order {m + mprime}, series has {coeffs.order}")
    c = coeffs.coeffs

    def at(i):
        return c[i] if i >= 0 else Fraction(0)

    if mprime:
        # sum_{j=1..m'} q_j c_{k-j} = -c_k for k = m+1 .. m+m'
        a = [[at(k - j) for j in range(1, mprime + 1)] for k in range(m + 1, m + mprime + 1)]
        b = [-at(k) for k in range(m + 1, m + mprime + 1)]
        try:
            q = [Fraction(1)] + solve_dense(a, b)
        except SingularSystemError as exc:
            raise DegenerateApproximantError(f"singular [{m}/{mprime}] Padé system") from exc
    else:
        q = [Fraction(1)]
    p = [sum((q[j] * at(k - j) for j in range(min(k, mprime) + 1)), Fraction(0))
         for k in range(m + 1)]
    approx = PadeApprox(m, mprime, Poly(p), Poly(q))
    check = expand_rational(RationalFn(approx.num, approx.den, reduce=False), m + mprime)
    if check.coeffs != c[: m + mprime + 1]:
        raise DegenerateApproximantError(f"[{m}/{mprime}] approximant does not match the series")
    return approx
