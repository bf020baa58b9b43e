"""Fast R_(n) series for the DBS process on a cycle.

Works with orbit totals under the dihedral group: by symmetry every state
in an orbit carries the same mass, and the flow out of an orbit only depends
on a representative. Selection probabilities 1/|A| are cleared by
multiplying every step by L = lcm(1..n), so all arithmetic stays in Python
integers until the final division.

State A at step t has a series divisible by p^(t+|A|), so it is stored as a
list starting at that degree and dropped once t + |A| > K.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import ResourceError, UsageError
from .exact import TruncSeries

MAX_CYCLE = 24


def _bitrev(m: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros_like(m)
    for i in range(n):
        out |= ((m >> i) & 1) << (n - 1 - i)
    return out


def dihedral_tables(n: int) -> tuple[list, list]:
    """(canonical representative of every mask, reflection fixing vertex 0)."""
    full = (1 << n) - 1
    m = np.arange(1 << n, dtype=np.int64)

    def rot(x, r):
        return ((x << r) | (x >> (n - r))) & full if r else x

    rev = _bitrev(m, n)
    canon = m.copy()
    for r in range(n):
        np.minimum(canon, rot(m, r), out=canon)
        np.minimum(canon, rot(rev, r), out=canon)
    refl0 = rot(rev, 1)
    return canon.tolist(), refl0.tolist()


def _times_one_minus_p(a: list) -> list:
    return [a[0]] + [a[i] - a[i - 1] for i in range(1, len(a))]


def r_cycle_series(n: int, order: int) -> TruncSeries:
    """R_(n)(p) = E(total updates)/n from an iid(p) start, truncated at ``order``."""
    if n < 3:
        raise UsageError("cycle needs n >= 3")
    if order < 0:
        raise UsageError("order must be non-negative")
    if n > MAX_CYCLE:
        raise ResourceError(f"cycle engine limited to n <= {MAX_CYCLE} (2^n state table)")
    K = order
    full = (1 << n) - 1
    canon, refl0 = dihedral_tables(n)
    L = math.lcm(*range(1, n + 1))
    # outcomes R ⊆ {n-1, 0, 1} grouped by |R|
    nb = [1 << (n - 1), 1, 2]
    outcomes = []
    for sub in range(8):
        r = 0
        mask = 0
        for i in range(3):
            if sub >> i & 1:
                mask |= nb[i]
                r += 1
        outcomes.append((mask, r))

    # step 0: orbit totals |orbit| * p^a (1-p)^(n-a), stored from degree a
    sizes: dict[int, int] = {}
    for m in range(1, full + 1):
        c = canon[m]
        sizes[c] = sizes.get(c, 0) + 1
    live: dict[int, list] = {}
    for rep, size in sizes.items():
        a = rep.bit_count()
        if a > K:
            continue
        length = K + 1 - a
        live[rep] = [size * (-1) ** j * math.comb(n - a, j) for j in range(length)]
    total = [Fraction(0)] * (K + 1)
    t = 0
    scale = 1
    while live:
        # accumulate the live mass (entries for state A start at degree t + |A|)
        acc = [0] * (K + 1)
        for rep, cs in live.items():
            base = t + rep.bit_count()
            for j, c in enumerate(cs):
                acc[base + j] += c
        for k in range(K + 1):
            if acc[k]:
                total[k] += Fraction(acc[k], scale)
        # selection: bring v to 0 and fold the reflection fixing 0
        groups: dict[int, list] = {}
        for rep, cs in live.items():
            a = rep.bit_count()
            w = L // a
            x = rep
            while x:
                low = x & -x
                v = low.bit_length() - 1
                x ^= low
                rel = ((rep >> v) | (rep << (n - v))) & full
                rest = rel & ~(nb[0] | 1 | nb[2])
                r2 = refl0[rest]
                key = rest if rest <= r2 else r2
                shift = a - rest.bit_count() - 1
                g = groups.get(key)
                if g is None:
                    g = [0] * (K - t - rest.bit_count())
                    groups[key] = g
                for i, c in enumerate(cs):
                    g[shift + i] += w * c
        # outcomes
        nxt: dict[int, list] = {}
        for key, g in groups.items():
            lb_g = t + key.bit_count() + 1
            ds = [g]
            for _ in range(3):
                ds.append(_times_one_minus_p(ds[-1]))
            for rmask, r in outcomes:
                lb = lb_g + r
                if lb > K:
                    continue
                new = key | rmask
                if not new:
                    continue
                src = ds[3 - r]
                length = K + 1 - lb
                c = canon[new]
                cur = nxt.get(c)
                if cur is None:
                    nxt[c] = src[:length]
                else:
                    for i in range(length):
                        cur[i] += src[i]
        live = {k: v for k, v in nxt.items() if any(v)}
        t += 1
        scale *= L
    return TruncSeries([c / n for c in total], K)
