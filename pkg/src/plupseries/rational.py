"""Exact rational forms of R_(n)(p) and S_[n] via exact solves at sample points.

Linear systems are assembled once per process as polynomial rows and then
evaluated at rational sample points; Thiele interpolation recovers the
rational function. q-series of reach probabilities come from an
order-by-order solve around p = 1 instead (see ``reach_q_series``).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

import gmpy2

from .cycle_fast import dihedral_tables
from .errors import (ConsistencyError, DegenerateSampleError, NumericalError, PoleAtOriginError,
                     ReconstructionError, StabilizationError, UsageError)
from .exact import (ComplexRoot, Poly, RationalFn, TruncSeries, expand_rational, poly_roots,
                    solve_sparse, squarefree_decomposition, thiele_fit)
from .exact.linalg import to_fraction
from .plup import InitDist, ProcessSpec, bits, chain_graph, cycle_graph, dbs_rule, popcount
from .tables import CoeffTable

mpq = gmpy2.mpq


def _mpq_poly(poly: Poly) -> list:
    return [mpq(c) for c in poly.coeffs]


def _horner(cs: list, x):
    acc = mpq(0)
    for c in reversed(cs):
        acc = acc * x + c
    return acc


def _check_p(p) -> Fraction:
    p = Fraction(p)
    if not 0 < p < 1:
        raise UsageError("sample point must lie strictly between 0 and 1")
    return p


def _symmetric_cycle(spec: ProcessSpec) -> bool:
    return (spec.graph.topology == "cycle" and spec.uniform_weights
            and spec.rule.name in ("dbs", "cp-basic")
            and spec.init.mode == "iid" and len(set(spec.init.activation)) == 1)


class AbsorptionSystem:
    """Transient states of a process with polynomial transition rows.

    States containing a ``target`` vertex are absorbing ("hit"), as is the
    empty state ("die"). With ``lump`` the states are orbit representatives
    and rows carry orbit totals; only valid for symmetric processes.
    """

    def __init__(self, spec: ProcessSpec, starts: Iterable[int], target: int = 0,
                 lump: Callable[[int], int] | None = None):
        self.spec = spec
        self.target = target
        canon = lump or (lambda m: m)
        order = []
        index = {}
        stack = [canon(s) for s in starts if s and not s & target]
        for s in stack:
            if s not in index:
                index[s] = len(order)
                order.append(s)
        rows, hit, die = [], [], []
        i = 0
        while i < len(order):
            a = order[i]
            i += 1
            row: dict[int, Poly] = {}
            h = Poly()
            d = Poly()
            for b, pr in spec.kernel(a).items():
                if not b:
                    d = d + pr
                elif b & target:
                    h = h + pr
                else:
                    c = canon(b)
                    j = index.get(c)
                    if j is None:
                        j = index[c] = len(order)
                        order.append(c)
                    row[j] = row.get(j, Poly()) + pr
            rows.append({j: _mpq_poly(pr) for j, pr in row.items()})
            hit.append(_mpq_poly(h))
            die.append(_mpq_poly(d))
        self.states = order
        self.index = index
        self._rows = rows
        self._hit = hit
        self._die = die
        # elimination order: active-count then bitmask
        self._elim = sorted(range(len(order)), key=lambda j: (popcount(order[j]), order[j]))

    def __len__(self):
        return len(self.states)

    def _matrix(self, x) -> list:
        out = []
        for i, row in enumerate(self._rows):
            r = {j: -_horner(cs, x) for j, cs in row.items()}
            r[i] = r.get(i, 0) + 1
            out.append(r)
        return out

    def solve(self, p, rhs: str | list) -> list:
        """Solve (I - T(p)) y = b with b = 1 ("steps"), hit ("hit") or die ("die")."""
        x = mpq(_check_p(p))
        if rhs == "steps":
            b = [1] * len(self)
        elif rhs == "hit":
            b = [_horner(cs, x) for cs in self._hit]
        elif rhs == "die":
            b = [_horner(cs, x) for cs in self._die]
        else:
            b = rhs
        return solve_sparse(self._matrix(x), b, self._elim)


# ---------------------------------------------------------------------------
# point evaluations


class StepsSystem:
    """Compiled system for (1/n) E(total updates) of an iid-initialized process."""

    def __init__(self, spec: ProcessSpec):
        if spec.init.mode == "deterministic":
            raise UsageError("needs an iid or single-site initialization")
        self.spec = spec
        support = spec.init.support()
        if _symmetric_cycle(spec):
            canon = dihedral_tables(spec.n)[0]
            lump = canon.__getitem__
            weights: dict[int, Poly] = {}
            for m, pr in support:
                if m:
                    weights[canon[m]] = weights.get(canon[m], Poly()) + pr
        else:
            lump = None
            weights = {m: pr for m, pr in support if m}
        self.system = AbsorptionSystem(spec, weights, 0, lump)
        self._weights = [(self.system.index[m], _mpq_poly(pr)) for m, pr in weights.items()]

    def __call__(self, p) -> Fraction:
        y = self.system.solve(p, "steps")
        x = mpq(_check_p(p))
        tot = sum((_horner(cs, x) * y[j] for j, cs in self._weights), mpq(0))
        return to_fraction(tot / self.spec.n)


def expected_steps_at(spec: ProcessSpec, p) -> Fraction:
    """(1/n) E(total updates) at a rational p, exactly."""
    return StepsSystem(spec)(p)


class ReachSystem:
    """Compiled system for P(BA(target) | deterministic start) and its complement."""

    def __init__(self, spec: ProcessSpec, start: Iterable, target: Iterable):
        g = spec.graph
        self.start = g.mask(start)
        self.target = g.mask(target)
        if not self.start:
            raise UsageError("empty start state")
        self.system = AbsorptionSystem(spec, [self.start], self.target)

    def __call__(self, p) -> Fraction:
        if self.start & self.target:
            return Fraction(1)
        return self.system.solve(p, "hit")[0]

    def extinction(self, p) -> Fraction:
        if self.start & self.target:
            return Fraction(0)
        return self.system.solve(p, "die")[0]


def chain_reach_spec(n: int) -> ProcessSpec:
    g = chain_graph(n)
    return ProcessSpec(g, dbs_rule(g), InitDist.single_site(g, 1))


def reach_prob_at(n: int, p) -> Fraction:
    """P(vertex n ever active | start {1}) on chain(n), exactly."""
    if n < 2:
        raise UsageError("chain needs n >= 2")
    return ReachSystem(chain_reach_spec(n), [1], [n])(p)


def reach_conservation(n: int, p) -> tuple[Fraction, Fraction]:
    """(reach probability, extinction-before-reach probability); they must sum to 1."""
    sys_ = ReachSystem(chain_reach_spec(n), [1], [n])
    return sys_(p), sys_.extinction(p)


# ---------------------------------------------------------------------------
# reconstruction


@dataclass(frozen=True)
class Reconstruction:
    fn: RationalFn
    samples: int          # points fed to the final interpolation
    evaluations: int      # total exact solves, held-out checks included
    rounds: int


def sample_points(count: int, denom: int = 4099, shift: int = 0) -> list[Fraction]:
    """count distinct points i/(denom+1); shifted on degeneracy."""
    if count + shift > denom:
        raise ReconstructionError("sample budget exceeds the sampling grid")
    return [Fraction(i + 1 + shift, denom + 1) for i in range(count)]


def holdout_points(count: int = 3, denom: int = 4099) -> list[Fraction]:
    return [Fraction(denom - i, denom + 1) for i in range(count)]


def reconstruct(sampler: Callable[[Fraction], Fraction], var: str = "p", start: int = 8,
                max_points: int = 1024, holdout: int = 3, denom: int = 4099,
                max_shifts: int = 5, confirm: int = 2) -> Reconstruction:
    """Recover a rational function from exact samples.

    The sample count doubles until the Thiele continued fraction terminates
    with at least ``confirm`` surplus points reproduced exactly; the result
    must then also reproduce ``holdout`` unseen points.
    """
    cache: dict[Fraction, Fraction] = {}

    def f(x):
        v = cache.get(x)
        if v is None:
            v = cache[x] = Fraction(sampler(x))
        return v

    count = start
    rounds = 0
    while count <= max_points:
        rounds += 1
        fit = None
        for shift in range(max_shifts + 1):
            pts = sample_points(count, denom, shift * count)
            try:
                fit = thiele_fit([(x, f(x)) for x in pts])
                break
            except DegenerateSampleError:
                continue
        if fit is None:
            raise ReconstructionError(f"degenerate samples at every shift with {count} points")
        if fit.confirmed >= confirm:
            fn = RationalFn(fit.fn.num, fit.fn.den, var=var)
            for x in holdout_points(holdout, denom):
                if fn(x) != f(x):
                    raise ReconstructionError(f"held-out check failed at {x}")
            return Reconstruction(fn, count, len(cache), rounds)
        count *= 2
    raise ReconstructionError(f"no stable reconstruction within {max_points} samples")


def cycle_r_spec(n: int) -> ProcessSpec:
    g = cycle_graph(n)
    return ProcessSpec(g, dbs_rule(g), InitDist.iid(g))


def reconstruct_rational_R(n: int, **kw) -> RationalFn:
    return reconstruct(StepsSystem(cycle_r_spec(n)), **kw).fn


def reconstruct_rational_S(n: int, **kw) -> RationalFn:
    """S_[n] as a rational function of p."""
    return reconstruct(ReachSystem(chain_reach_spec(n), [1], [n]), **kw).fn


# ---------------------------------------------------------------------------
# q-series around p = 1


def reach_q_series(spec: ProcessSpec, start: Iterable, target: Iterable, order: int,
                   lump: Callable[[int], int] | None = None) -> TruncSeries:
    """P(BA(target) | deterministic start) as a power series in q = 1 - p.

    At q = 0 every update only adds active vertices, so I - T(0) is
    triangular over states ordered by decreasing active count; each order
    of q is then a back-substitution using lower orders. States that can
    only influence orders above ``order`` are never visited.
    """
    if order < 0:
        raise UsageError("order must be non-negative")
    g = spec.graph
    s0 = g.mask(start)
    tgt = g.mask(target)
    canon = lump or (lambda m: m)
    if s0 & tgt:
        return TruncSeries.one(order)
    s0 = canon(s0)
    kern: dict[int, list] = {}

    def ker(a: int) -> list:
        k = kern.get(a)
        if k is None:
            merged: dict[int, Poly] = {}
            for b, pr in spec.kernel(a).items():
                cb = canon(b) if b and not b & tgt else b
                merged[cb] = merged.get(cb, Poly()) + pr
            k = []
            for b, pr in merged.items():
                qc = pr.compose_affine(1, -1).coeffs[: order + 1]
                if any(qc):
                    k.append((b, [mpq(c) for c in qc]))
            kern[a] = k
        return k

    # highest order each state is needed at
    need = {s0: order}
    stack = [s0]
    while stack:
        a = stack.pop()
        r = need[a]
        for b, qc in ker(a):
            if not b or b & tgt or b == a:
                continue
            j = next(i for i, c in enumerate(qc) if c)
            if r - j >= 1 and need.get(b, -1) < r - j:
                need[b] = r - j
                stack.append(b)
    states = sorted(need, key=lambda a: (-popcount(a), a))
    diag = {}
    for a in states:
        d = mpq(1)
        for b, qc in ker(a):
            if b == a:
                d -= qc[0]
        if d == 0:
            raise NumericalError("q = 0 dynamics have a closed transient class; series undefined")
        diag[a] = d
    h = {a: [mpq(1)] for a in states}     # every nonempty state reaches the target at q = 0

    def val(b, k):
        if not b:
            return 0
        if b & tgt or k == 0:
            return 1 if k == 0 else 0
        return h[b][k]

    for k in range(1, order + 1):
        for a in states:
            if need[a] < k:
                continue
            acc = mpq(0)
            for b, qc in ker(a):
                for j in range(min(k, len(qc) - 1) + 1):
                    c = qc[j]
                    if c and not (j == 0 and b == a):
                        acc += c * val(b, k - j)
            h[a].append(acc / diag[a])
    if not states:
        return TruncSeries.zero(order)
    return TruncSeries([to_fraction(c) for c in h[s0]], order)


def s_q_series(n: int, order: int, method: str = "direct") -> TruncSeries:
    """b_k^[n]: S_[n] expanded around p = 1 in q = 1 - p."""
    if method == "direct":
        return reach_q_series(chain_reach_spec(n), [1], [n], order)
    if method == "rational":
        g = substitute_q(reconstruct_rational_S(n))
        try:
            return expand_rational(g, order)
        except PoleAtOriginError as exc:
            raise ConsistencyError("S has a pole at q = 0", n=n) from exc
    raise UsageError(f"unknown method {method!r}")


def substitute_q(fn: RationalFn) -> RationalFn:
    return fn.substitute_affine()


def line_spec(m: int) -> ProcessSpec:
    """DBS on the chain -m..m with a single active vertex at 0."""
    g = chain_graph(2 * m + 1, start=-m)
    return ProcessSpec(g, dbs_rule(g), InitDist.single_site(g, 0))


def _mirror_table(n: int) -> Callable[[int], int]:
    def canon(mask: int) -> int:
        r = 0
        for i in bits(mask):
            r |= 1 << (n - 1 - i)
        return min(mask, r)
    return canon


def s_line_series(m: int, order: int) -> TruncSeries:
    """P(activity reaches distance m | start {0}) on the line, in q.

    Identical to the infinite-line process up to the hitting time, so its
    low coefficients are those of the survival probability on Z.
    """
    if m < 1:
        raise UsageError("m must be at least 1")
    spec = line_spec(m)
    return reach_q_series(spec, [0], [-m, m], order, lump=_mirror_table(2 * m + 1))


def stabilized_coeffs_S(order: int) -> CoeffTable:
    """b_k^[inf] from chain(k+2), with the sharper chain(k+1) agreement checked as a warning."""
    if order < 0:
        raise UsageError("order must be non-negative")
    runs = {}

    def b(n):
        if n not in runs:
            runs[n] = s_q_series(n, min(order, n - 1))
        return runs[n]

    table = CoeffTable("S", variable="q", meta={"threshold": "n = k + 2", "sharper_check": "n = k + 1"})
    sharp_ok = True
    for k in range(order + 1):
        n = max(3, k + 2)
        val = b(n)[k]
        if b(n + 1)[k] != val:
            raise StabilizationError(f"b_{k} differs between chain({n}) and chain({n + 1})", k=k)
        if k + 1 >= 3 and b(k + 1)[k] != val:
            sharp_ok = False
            warnings.warn(f"b_{k} on chain({k + 1}) differs from the stabilized value", stacklevel=2)
        table.add(n, k, val)
    table.meta["sharper_threshold_holds"] = sharp_ok
    table.meta["cross_check_status"] = "passed"
    return table


def stabilized_line_coeffs(order: int, m: int | None = None) -> CoeffTable:
    """S_Z coefficients in q from the line of half-width m, checked against m + 1.

    The default m = order - 1 reflects the observed threshold k <= m + 1; the
    check against m + 1 is what certifies each coefficient.
    """
    m = max(1, order - 1) if m is None else m
    a = s_line_series(m, order)
    b = s_line_series(m + 1, order)
    for k in range(order + 1):
        if a[k] != b[k]:
            raise StabilizationError(f"S_Z coefficient {k} differs between m={m} and m={m + 1}",
                                     k=k, small=a, large=b)
    table = CoeffTable.from_series("S_Z", m, a, variable="q", threshold=f"m = {m}",
                                   cross_check=f"m = {m + 1}", cross_check_status="passed")
    return table


# ---------------------------------------------------------------------------
# poles


@dataclass(frozen=True)
class PoleReport:
    roots: tuple
    factors: tuple            # (squarefree factor, multiplicity)

    @property
    def min_modulus(self) -> float:
        return min(r.modulus for r in self.roots)

    @property
    def closest(self) -> ComplexRoot:
        return min(self.roots, key=lambda r: r.modulus)

    def to_csv(self) -> str:
        lines = ["re,im,modulus,residual,multiplicity"]
        for r in self.roots:
            lines.append(f"{r.value.real!r},{r.value.imag!r},{r.modulus!r},{r.residual!r},{r.multiplicity}")
        return "\n".join(lines) + "\n"


def pole_report(fn: RationalFn, tol: float = 1e-12, precise: bool = True) -> PoleReport:
    """Roots of the (reduced) denominator, found per squarefree factor.

    ``precise`` (default) polishes in extended precision; high-degree
    denominators are too ill-conditioned for double-precision coefficients.
    """
    if fn.den.degree < 1:
        return PoleReport((), ())
    roots = []
    factors = squarefree_decomposition(fn.den)
    for fac, mult in factors:
        for r in poly_roots(fac, tol=tol, precise=precise):
            roots.append(ComplexRoot(r.value, r.residual, mult))
    roots.sort(key=lambda r: (r.modulus, r.value.imag))
    return PoleReport(tuple(roots), tuple(factors))
