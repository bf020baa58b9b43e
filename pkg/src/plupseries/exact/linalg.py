"""Exact Gaussian elimination over the rationals.

Entries may be ``Fraction`` or ``gmpy2.mpq``; the sparse solver works on
dict-of-dict rows so it only touches nonzero entries (fill-in included).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

import gmpy2

from ..errors import SingularSystemError

mpq = gmpy2.mpq


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(int(x.numerator), int(x.denominator))


def solve_dense(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Solve a x = b exactly. Raises SingularSystemError when no unique solution exists."""
    n = len(a)
    m = [[mpq(v) for v in row] + [mpq(rhs)] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise SingularSystemError(f"singular matrix at column {col}")
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
        prow = m[col]
        inv = 1 / prow[col]
        for r in range(col + 1, n):
            row = m[r]
            f = row[col]
            if f == 0:
                continue
            f *= inv
            for c in range(col, n + 1):
                if prow[c] != 0:
                    row[c] -= f * prow[c]
    x = [mpq(0)] * n
    for r in range(n - 1, -1, -1):
        row = m[r]
        s = row[n]
        for c in range(r + 1, n):
            if row[c] != 0:
                s -= row[c] * x[c]
        x[r] = s / row[r]
    return [to_fraction(v) for v in x]


def solve_sparse(rows: Sequence[Mapping[int, object]], rhs: Sequence, order: Sequence[int] | None = None
                 ) -> list[Fraction]:
    """Solve a sparse system given as ``rows[i] = {j: a_ij}``.

    Unknowns are eliminated in ``order`` (default: index order). For each
    column the first remaining row with a nonzero entry is the pivot; entries
    are exact so no magnitude-based pivoting is needed.
    """
    n = len(rows)
    work = [{j: mpq(v) for j, v in r.items() if v != 0} for r in rows]
    b = [mpq(v) for v in rhs]
    # column -> set of rows having a nonzero there
    colrows: dict[int, set] = {}
    for i, r in enumerate(work):
        for j in r:
            colrows.setdefault(j, set()).add(i)
    order = list(range(n)) if order is None else list(order)
    done_rows = set()
    pivots = []
    for col in order:
        cands = [r for r in colrows.get(col, ()) if r not in done_rows]
        if not cands:
            raise SingularSystemError(f"singular system: no pivot for unknown {col}")
        # fewest nonzeros keeps fill-in down
        pr = min(cands, key=lambda r: (len(work[r]), r))
        done_rows.add(pr)
        prow = work[pr]
        inv = 1 / prow[col]
        pivots.append((col, pr))
        for r in cands:
            if r == pr:
                continue
            row = work[r]
            f = row[col] * inv
            for j, v in prow.items():
                nv = row.get(j, 0) - f * v
                if nv == 0:
                    if j in row:
                        del row[j]
                        colrows[j].discard(r)
                else:
                    if j not in row:
                        colrows.setdefault(j, set()).add(r)
                    row[j] = nv
            b[r] -= f * b[pr]
        for j in prow:
            colrows[j].discard(pr)
    x = [mpq(0)] * n
    for col, pr in reversed(pivots):
        prow = work[pr]
        s = b[pr]
        for j, v in prow.items():
            if j != col:
                s -= v * x[j]
        x[col] = s / prow[col]
    return [to_fraction(v) for v in x]
