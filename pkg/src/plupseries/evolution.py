"""Exact truncated-series evolution of PLUPs.

The state vector maps bitmask states to power series in p. Mass is pushed
forward one update at a time and truncated at order K; because every path
of length t carries a factor of at least p^(c*t) (c from
``truncation_constant``), the live mass eventually truncates to zero and the
accumulated quantities are exact through order K.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import ConsistencyError, ResourceError, StabilizationError, UsageError
from .exact import Poly, TruncSeries
from .plup import (MAX_EXACT_VERTICES, InitDist, ProcessSpec, bits, chain_graph, dbs_rule,
                   popcount, truncation_constant)

DEFAULT_MAX_STATES = int(os.environ.get("PLUPSERIES_MAX_STATES", 1 << 22))


@dataclass(frozen=True)
class EventSpec:
    """Conjunction of RI(S) ("S remains inactive") and BA(S) ("S becomes active") atoms.

    With ``divide_by_p`` the probability is divided by p, turning a
    single-site start that occurs with probability p into a deterministic start.
    """

    ri: frozenset = frozenset()
    ba: tuple = ()
    divide_by_p: bool = False

    @classmethod
    def build(cls, ri: Iterable = (), ba: Iterable[Iterable] = (), divide_by_p: bool = False) -> "EventSpec":
        return cls(frozenset(ri), tuple(frozenset(s) for s in ba), divide_by_p)

    def validate(self, spec: ProcessSpec):
        g = spec.graph
        g.mask(self.ri)
        seen = set(self.ri)
        for s in self.ba:
            if not s:
                raise UsageError("BA atom over an empty vertex set")
            g.mask(s)
            if seen & s:
                raise UsageError("event atoms must use disjoint vertex sets")
            seen |= s


TERMINATION = EventSpec()


class StateDist:
    """Sparse map state -> TruncSeries, all of one order. The empty state is absorbing."""

    def __init__(self, entries: dict, order: int):
        for s in entries.values():
            if s.order != order:
                raise UsageError("all series in a StateDist must share one order")
        self.entries = {k: v for k, v in entries.items() if not v.is_zero()}
        self.order = order

    @classmethod
    def initial(cls, spec: ProcessSpec, order: int) -> "StateDist":
        return cls({m: TruncSeries.from_poly(pr, order) for m, pr in spec.init.support()}, order)

    def __getitem__(self, state: int) -> TruncSeries:
        return self.entries.get(state, TruncSeries.zero(self.order))

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        return isinstance(other, StateDist) and self.order == other.order and self.entries == other.entries

    def total(self) -> TruncSeries:
        out = TruncSeries.zero(self.order)
        for s in self.entries.values():
            out = out + s
        return out

    def live(self) -> TruncSeries:
        out = TruncSeries.zero(self.order)
        for m, s in self.entries.items():
            if m:
                out = out + s
        return out


def evolve_step(dist: StateDist, spec: ProcessSpec) -> StateDist:
    order = dist.order
    out: dict[int, TruncSeries] = {}
    for state, mass in dist.entries.items():
        if not state:
            out[0] = out.get(0, TruncSeries.zero(order)) + mass
            continue
        for nxt, pr in spec.kernel(state).items():
            contrib = mass * TruncSeries.from_poly(pr, order)
            out[nxt] = out[nxt] + contrib if nxt in out else contrib
    return StateDist(out, order)


# ---------------------------------------------------------------------------
# fast engine: integer coefficient lists with a fixed per-step scale


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def _mul_trunc(a: list, b: list, length: int) -> list:
    out = [0] * length
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b[: length - i]):
            if y:
                out[i + j] += x * y
    return out


def _add_into(acc: list, x: list):
    for i, v in enumerate(x):
        if v:
            acc[i] += v


@dataclass
class RunResult:
    order: int
    steps: int
    event: TruncSeries                # P(event), terminating mass with all BA atoms satisfied
    steps_total: TruncSeries | None   # E(number of updates)
    resamples: dict | None            # label -> E(Res_v)
    states_seen: int = 0


class _Engine:
    def __init__(self, spec: ProcessSpec, order: int, event: EventSpec, max_states: int):
        if spec.n > MAX_EXACT_VERTICES:
            raise ResourceError(f"exact engine supports at most {MAX_EXACT_VERTICES} vertices")
        if spec.init.mode == "deterministic":
            raise UsageError("exact engine needs an iid or single-site initialization")
        event.validate(spec)
        self.spec = spec
        self.order = order
        self.n = spec.n
        self.max_states = max_states
        if spec.init.support_size() > max_states:
            raise ResourceError(f"initial distribution has up to {spec.init.support_size()} states, "
                                f"above the limit of {max_states}")
        g = spec.graph
        self.ri_mask = g.mask(event.ri)
        self.ba_masks = [g.mask(s) for s in event.ba]
        self.all_flags = (1 << len(self.ba_masks)) - 1
        rule_den = _lcm(c.denominator for tab in spec.rule.table for outs in tab.values()
                        for oc in outs for c in oc.prob.coeffs)
        if spec.uniform_weights:
            self.sel_scale = _lcm(range(1, self.n + 1))
            self.scale = self.sel_scale * rule_den
        else:
            # rational selection probabilities: carry Fractions, no scaling
            self.sel_scale = None
            self.scale = 1
        self._kernel: dict[int, list] = {}

    def flags(self, mask: int, flags: int = 0) -> int:
        for i, b in enumerate(self.ba_masks):
            if mask & b:
                flags |= 1 << i
        return flags

    def kernel(self, mask: int) -> list:
        ker = self._kernel.get(mask)
        if ker is None:
            ker = []
            for nxt, pr in self.spec.kernel(mask).items():
                if nxt & self.ri_mask:
                    continue          # sink: the RI atom is violated
                cs = [c * self.scale for c in pr.coeffs[: self.order + 1]]
                if self.sel_scale is not None:
                    cs = [int(c) for c in cs]
                ker.append((nxt, cs))
            self._kernel[mask] = ker
        return ker

    def selection(self, mask: int) -> list:
        """(vertex index, selection weight scaled by sel_scale)."""
        if self.sel_scale is None:
            return self.spec.selection(mask)
        k = popcount(mask)
        w = self.sel_scale // k
        return [(v, w) for v in bits(mask)]

    def run(self, want_steps: bool, want_res: bool, stop_early: bool, max_steps: int) -> RunResult:
        order, n = self.order, self.n
        length = order + 1
        live: dict[int, list] = {}
        event = [Fraction(0)] * length
        for mask, pr in self.spec.init.support():
            if mask & self.ri_mask:
                continue
            key = mask | (self.flags(mask) << n)
            cs = list(pr.coeffs[:length]) + [0] * (length - len(pr.coeffs[:length]))
            if mask == 0:
                if self.flags(0) == self.all_flags:
                    event = [e + c for e, c in zip(event, cs)]
                continue
            live[key] = cs
        # init probabilities may be rational; bring them to integers with one scale factor
        den0 = _lcm(Fraction(c).denominator for cs in live.values() for c in cs)
        live = {k: [Fraction(c) * den0 for c in cs] for k, cs in live.items()}
        live = {k: [int(c) if self.sel_scale is not None else c for c in cs] for k, cs in live.items()}
        denom = Fraction(den0)                # true mass = stored / denom
        steps_total = [Fraction(0)] * length if want_steps else None
        res = {v: [Fraction(0)] * length for v in range(n)} if want_res else None
        mask_bits = (1 << n) - 1
        seen = len(live)
        t = 0

        def harvest(store: dict):
            # terminated mass leaves the vector; so does mass whose event is already decided
            nonlocal event
            done = [k for k in store if not (k & mask_bits) or
                    ((k >> n) == self.all_flags and stop_early and not self.ri_mask)]
            for k in done:
                cs = store.pop(k)
                if (k >> n) == self.all_flags:
                    event = [e + Fraction(c) / denom for e, c in zip(event, cs)]

        harvest(live)
        while live:
            if t >= max_steps:
                raise ConsistencyError(
                    f"live mass did not truncate to zero within the certified {max_steps} steps",
                    step=t, states=len(live))
            if want_steps:
                tot = [0] * length
                for cs in live.values():
                    _add_into(tot, cs)
                steps_total = [s + Fraction(c) / denom for s, c in zip(steps_total, tot)]
            if want_res:
                acc = {v: [0] * length for v in range(n)}
                for key, cs in live.items():
                    for v, w in self.selection(key & mask_bits):
                        _add_into(acc[v], [c * w for c in cs])
                sdiv = denom * (self.sel_scale or 1)
                for v in range(n):
                    res[v] = [r + Fraction(c) / sdiv for r, c in zip(res[v], acc[v])]
            nxt: dict[int, list] = {}
            for key, cs in live.items():
                mask, fl = key & mask_bits, key >> n
                for target, pr in self.kernel(mask):
                    contrib = _mul_trunc(cs, pr, length)
                    if not any(contrib):
                        continue
                    nkey = target | (self.flags(target, fl) << n)
                    cur = nxt.get(nkey)
                    if cur is None:
                        nxt[nkey] = contrib
                    else:
                        _add_into(cur, contrib)
            live = {k: v for k, v in nxt.items() if any(v)}
            denom *= self.scale
            t += 1
            seen += len(live)
            if len(live) > self.max_states:
                raise ResourceError(f"state vector exceeded {self.max_states} entries at step {t}; "
                                    "reduce n or the order, or raise PLUPSERIES_MAX_STATES")
            harvest(live)
        spec = self.spec
        return RunResult(
            order, t, TruncSeries(event, order),
            TruncSeries(steps_total, order) if want_steps else None,
            {spec.graph.labels[v]: TruncSeries(c, order) for v, c in res.items()} if want_res else None,
            seen)


def step_bound(spec: ProcessSpec, order: int) -> int:
    """Number of updates after which the live mass is O(p^(order+1))."""
    c = truncation_constant(spec)
    if c <= 0:
        raise UsageError("rule admits growth at order p^0; not a PLUP")
    return math.floor(order / c) + 1


def run_evolution(spec: ProcessSpec, order: int, event: EventSpec = TERMINATION, *, steps: bool = False,
                  resamples: bool = False, max_states: int = DEFAULT_MAX_STATES) -> RunResult:
    """Evolve ``spec`` until the live mass truncates to zero at ``order``.

    ``event`` is returned with the ``divide_by_p`` flag ignored; callers
    wanting that convention use ``event_series``.
    """
    eng = _Engine(spec, order, event, max_states)
    stop_early = not (steps or resamples)
    return eng.run(steps, resamples, stop_early, step_bound(spec, order))


def event_series(spec: ProcessSpec, event: EventSpec, order: int, **kw) -> TruncSeries:
    if event.divide_by_p:
        s = run_evolution(spec, order + 1, event, **kw).event
        if s[0] != 0:
            raise UsageError("divide_by_p needs an event of probability O(p)")
        return s.shift_down(1)
    return run_evolution(spec, order, event, **kw).event


def expected_steps_series(spec: ProcessSpec, order: int, **kw) -> TruncSeries:
    return run_evolution(spec, order, steps=True, **kw).steps_total


def resample_series(spec: ProcessSpec, order: int, **kw) -> dict:
    """E(Res_v) for every vertex label."""
    return run_evolution(spec, order, resamples=True, **kw).resamples


# ---------------------------------------------------------------------------
# path enumeration oracle


def brute_force_paths(spec: ProcessSpec, event: EventSpec, maxlen: int, weight: str = "prob",
                      max_vertices: int = 6, max_len_cap: int = 8) -> TruncSeries:
    """Sum P(xi) over terminating paths xi of at most ``maxlen`` updates in the event.

    The result is truncated at the largest order where paths longer than
    ``maxlen`` cannot contribute. ``weight="steps"`` weights each path by its
    length, giving E(number of updates).
    """
    if spec.n > max_vertices or maxlen > max_len_cap:
        raise UsageError(f"path oracle limited to {max_vertices} vertices and {max_len_cap} updates")
    if weight not in ("prob", "steps"):
        raise UsageError("weight must be 'prob' or 'steps'")
    event.validate(spec)
    c = truncation_constant(spec)
    order = math.ceil(c * (maxlen + 1)) - 1
    if order < 0:
        raise UsageError("maxlen too small for any sound order")
    g = spec.graph
    ri = g.mask(event.ri)
    ba = [g.mask(s) for s in event.ba]
    full = (1 << len(ba)) - 1

    def flags_of(mask, fl):
        for i, b in enumerate(ba):
            if mask & b:
                fl |= 1 << i
        return fl

    total = Poly()

    def visit(mask: int, fl: int, prob: Poly, length: int):
        nonlocal total
        if prob.mindeg() > order:
            return
        if not mask:
            if fl == full:
                total = total + (prob * length if weight == "steps" else prob)
            return
        if length == maxlen:
            return
        for v, sel in spec.selection(mask):
            ctx = mask & g.closed[v]
            rest = mask & ~g.closed[v]
            for oc in spec.rule.table[v][ctx]:
                nxt = rest | oc.result
                if nxt & ri:
                    continue
                visit(nxt, flags_of(nxt, fl), prob * oc.prob * sel, length + 1)

    for mask, pr in spec.init.support():
        if mask & ri:
            continue
        visit(mask, flags_of(mask, 0), pr, 0)
    out = TruncSeries(total.coeffs, order)
    if event.divide_by_p:
        if out[0] != 0:
            raise UsageError("divide_by_p needs an event of probability O(p)")
        return out.shift_down(1) if order >= 1 else TruncSeries.zero(0)
    return out


def path_probability(spec: ProcessSpec, init_state: Iterable, updates: Iterable[tuple]) -> Poly:
    """P(xi) for an explicit path: initial state, then (selected vertex, resulting R) pairs."""
    g = spec.graph
    mask = g.mask(init_state)
    prob = spec.init.state_prob(mask)
    for v_label, r_labels in updates:
        v = g.index(v_label)
        if not mask >> v & 1:
            raise UsageError(f"vertex {v_label} is not active")
        r = g.mask(r_labels)
        sel = dict(spec.selection(mask))[v]
        ctx = mask & g.closed[v]
        pr = next((oc.prob for oc in spec.rule.table[v][ctx] if oc.result == r), Poly())
        prob = prob * pr * sel
        mask = (mask & ~g.closed[v]) | r
    return prob


# ---------------------------------------------------------------------------
# derived quantities


def t_chain_series(order: int, n: int | None = None, check: bool = True) -> TruncSeries:
    """E(total updates | start {1}) on the one-ended chain, as a series in p.

    Computed on chain(n) with n = order + 2 by default; with ``check`` the
    computation is repeated on chain(n + 1) and must agree.
    """
    if order < 0:
        raise UsageError("order must be non-negative")
    n = order + 2 if n is None else n

    def one(size):
        g = chain_graph(size)
        spec = ProcessSpec(g, dbs_rule(g), InitDist.single_site(g, 1))
        s = expected_steps_series(spec, order + 1)
        return s.shift_down(1)

    base = one(n)
    if check:
        other = one(n + 1)
        if other != base:
            raise StabilizationError(f"expected-steps series differs between chain({n}) and chain({n + 1})",
                                     series=base, larger=other)
    return base


def first_difference(a: TruncSeries, b: TruncSeries) -> int:
    """Index of the first differing coefficient, or order + 1 if none."""
    if a.order != b.order:
        raise UsageError("series orders differ")
    for k, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return k
    return a.order + 1


def graph_surgery_defect(spec_g: ProcessSpec, spec_sub: ProcessSpec, event: EventSpec, order: int) -> int:
    """First order at which P(event) differs between a process and its surgery."""
    return first_difference(event_series(spec_g, event, order), event_series(spec_sub, event, order))


def ri_covariance(spec: ProcessSpec, x: Iterable, y: Iterable, order: int) -> TruncSeries:
    """Cov(RI(X), RI(Y)) as a series."""
    x, y = frozenset(x), frozenset(y)
    both = event_series(spec, EventSpec.build(ri=x | y), order)
    px = event_series(spec, EventSpec.build(ri=x), order)
    py = event_series(spec, EventSpec.build(ri=y), order)
    return both - px * py
