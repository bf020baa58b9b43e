"""Graphs, states and parametrized local-update process (PLUP) specifications.

States are bitmasks over vertex *indices* 0..n-1; vertices also carry
labels (0..n-1 on cycles, 1..n on chains) and every public function that
takes vertices expects labels.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import UsageError
from .exact import Poly, as_fraction

P = Poly.x()
ONE = Poly([1])
ZERO = Poly()

MAX_EXACT_VERTICES = 64


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits(x: int):
    """Indices of set bits, ascending."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


# ---------------------------------------------------------------------------
# graphs


@dataclass(frozen=True)
class Graph:
    labels: tuple
    adjacency: tuple          # adjacency[i] = sorted tuple of neighbor indices
    topology: str = "custom"

    def __post_init__(self):
        n = len(self.labels)
        if len(self.adjacency) != n:
            raise UsageError("adjacency list length does not match vertex count")
        if len(set(self.labels)) != n:
            raise UsageError("duplicate vertex labels")
        for i, nbrs in enumerate(self.adjacency):
            for j in nbrs:
                if j == i:
                    raise UsageError(f"self-loop at {self.labels[i]}")
                if i not in self.adjacency[j]:
                    raise UsageError("adjacency is not symmetric")

    @classmethod
    def from_edges(cls, labels: Sequence, edges: Iterable[tuple], topology: str = "custom") -> "Graph":
        labels = tuple(labels)
        pos = {lab: i for i, lab in enumerate(labels)}
        nbrs = [set() for _ in labels]
        for a, b in edges:
            i, j = pos[a], pos[b]
            if i == j:
                raise UsageError(f"self-loop at {a}")
            nbrs[i].add(j)
            nbrs[j].add(i)
        return cls(labels, tuple(tuple(sorted(s)) for s in nbrs), topology)

    @property
    def n(self) -> int:
        return len(self.labels)

    @cached_property
    def _pos(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}

    def index(self, label) -> int:
        try:
            return self._pos[label]
        except KeyError:
            raise UsageError(f"no vertex labelled {label!r}") from None

    def mask(self, labels: Iterable) -> int:
        m = 0
        for lab in labels:
            m |= 1 << self.index(lab)
        return m

    def labels_of(self, mask: int) -> tuple:
        return tuple(self.labels[i] for i in bits(mask))

    @cached_property
    def closed(self) -> tuple:
        """Bitmask of the closed neighborhood Γ(v) for each vertex index."""
        return tuple((1 << i) | sum(1 << j for j in nb) for i, nb in enumerate(self.adjacency))

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    @property
    def edges(self) -> list:
        return [(self.labels[i], self.labels[j]) for i, nb in enumerate(self.adjacency) for j in nb if i < j]

    def distances_from(self, sources: Iterable) -> dict:
        """BFS distances (by label) from a set of source labels. Unreachable vertices are absent."""
        dist = {}
        queue = deque()
        for lab in sources:
            i = self.index(lab)
            if i not in dist:
                dist[i] = 0
                queue.append(i)
        while queue:
            i = queue.popleft()
            for j in self.adjacency[i]:
                if j not in dist:
                    dist[j] = dist[i] + 1
                    queue.append(j)
        return {self.labels[i]: d for i, d in dist.items()}

    def distance(self, a: Iterable, b: Iterable) -> float:
        """Set distance d(A, B); infinite when disconnected or either set is empty."""
        b = list(b)
        dist = self.distances_from(a)
        ds = [dist[lab] for lab in b if lab in dist]
        return min(ds) if ds else float("inf")

    def ball(self, labels: Iterable, d: int) -> frozenset:
        """Γ(S, d): vertices joined to S by a path of length at most d."""
        return frozenset(lab for lab, k in self.distances_from(labels).items() if k <= d)

    def induced(self, keep: Iterable) -> "Graph":
        keep = set(keep)
        kept = tuple(lab for lab in self.labels if lab in keep)
        missing = keep - set(kept)
        if missing:
            raise UsageError(f"unknown vertices {sorted(missing)}")
        return Graph.from_edges(kept, [e for e in self.edges if e[0] in keep and e[1] in keep], "custom")

    def is_connected(self) -> bool:
        return self.n == 0 or len(self.distances_from([self.labels[0]])) == self.n


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise UsageError("cycle needs n >= 3")
    adj = tuple(tuple(sorted({(i - 1) % n, (i + 1) % n})) for i in range(n))
    return Graph(tuple(range(n)), adj, "cycle")


def chain_graph(n: int, start: int = 1) -> Graph:
    """Path on vertices start..start+n-1 (default labels 1..n)."""
    if n < 2:
        raise UsageError("chain needs n >= 2")
    adj = tuple(tuple(j for j in (i - 1, i + 1) if 0 <= j < n) for i in range(n))
    return Graph(tuple(range(start, start + n)), adj, "chain")


# ---------------------------------------------------------------------------
# update rules


@dataclass(frozen=True)
class UpdateOutcome:
    result: int      # bitmask R ⊆ Γ(v): active vertices of the neighborhood afterwards
    prob: Poly


@dataclass(frozen=True)
class UpdateRule:
    """Per-vertex outcome tables keyed by the local context A ∩ Γ(v).

    ``table[v][ctx]`` lists the outcomes when v is selected while the active
    part of its closed neighborhood is ``ctx`` (which always contains v).
    """

    name: str
    table: tuple     # tuple over vertex indices of {ctx_mask: tuple[UpdateOutcome, ...]}

    def outcomes(self, v: int, ctx: int) -> tuple:
        return self.table[v][ctx]


def _contexts(graph: Graph, v: int):
    """All subsets of Γ(v) containing v."""
    others = graph.closed[v] & ~(1 << v)
    sub = others
    while True:
        yield sub | (1 << v)
        if sub == 0:
            break
        sub = (sub - 1) & others


def _merge(outcomes: list) -> tuple:
    acc: dict[int, Poly] = {}
    for r, pr in outcomes:
        acc[r] = acc.get(r, ZERO) + pr
    return tuple(UpdateOutcome(r, pr) for r, pr in sorted(acc.items()) if not pr.is_zero())


def dbs_rule(graph: Graph) -> UpdateRule:
    """Resample every vertex of Γ(v) independently: active with probability p."""
    table = []
    for v in range(graph.n):
        nb = graph.closed[v]
        size = popcount(nb)
        outs = []
        sub = nb
        while True:
            r = popcount(sub)
            outs.append((sub, Poly.binomial_term(r, size - r)))
            if sub == 0:
                break
            sub = (sub - 1) & nb
        outs = _merge(outs)
        table.append({ctx: outs for ctx in _contexts(graph, v)})
    return UpdateRule("dbs", tuple(table))


def cp_rule(graph: Graph) -> UpdateRule:
    """Basic contact process ("cp-basic" variant).

    The selected active vertex recovers with probability 1 - p; otherwise
    (probability p) it stays active and infects one uniformly chosen neighbor.
    """
    table = []
    for v in range(graph.n):
        deg = graph.degree(v)
        contexts = {}
        for ctx in _contexts(graph, v):
            outs = [(ctx & ~(1 << v), 1 - P)]
            if deg == 0:
                outs.append((ctx, P))
            for u in graph.adjacency[v]:
                outs.append((ctx | (1 << u), P / deg))
            contexts[ctx] = _merge(outs)
        table.append(contexts)
    return UpdateRule("cp-basic", tuple(table))


RULES = {"dbs": dbs_rule, "cp": cp_rule, "cp-basic": cp_rule}


# ---------------------------------------------------------------------------
# initialization


@dataclass(frozen=True)
class InitDist:
    """Initial distribution.

    ``iid``: vertex i active independently with probability ``activation[i]``.
    ``single-site``: the vertex ``site`` is active with probability p (a special iid case).
    ``deterministic``: a fixed state; only meaningful for Monte Carlo.
    """

    mode: str
    activation: tuple = ()     # Poly per vertex index (iid and single-site)
    site: object = None        # label, single-site only
    active: frozenset = frozenset()  # labels, deterministic only

    @classmethod
    def iid(cls, graph: Graph, prob: Poly | None = None) -> "InitDist":
        prob = P if prob is None else prob
        return cls("iid", tuple(prob for _ in range(graph.n)))

    @classmethod
    def single_site(cls, graph: Graph, site) -> "InitDist":
        i = graph.index(site)
        return cls("single-site", tuple(P if j == i else ZERO for j in range(graph.n)), site=site)

    @classmethod
    def deterministic(cls, graph: Graph, labels: Iterable) -> "InitDist":
        labels = frozenset(labels)
        graph.mask(labels)
        return cls("deterministic", active=labels)

    def state_prob(self, mask: int) -> Poly:
        if self.mode == "deterministic":
            raise UsageError("deterministic initialization is Monte Carlo only")
        out = ONE
        for i, a in enumerate(self.activation):
            out = out * (a if mask >> i & 1 else 1 - a)
        return out

    def support_size(self) -> int:
        """Upper bound on the number of initial states, without enumerating them."""
        return 1 << sum(1 for a in self.activation if not a.is_zero())

    def support(self) -> list[tuple[int, Poly]]:
        """Initial states with nonzero probability."""
        free = [i for i, a in enumerate(self.activation) if not a.is_zero()]
        forced = sum(1 << i for i, a in enumerate(self.activation) if a == ONE)
        out = []
        seen = set()
        for k in range(1 << len(free)):
            mask = forced
            for t, i in enumerate(free):
                if k >> t & 1:
                    mask |= 1 << i
            if mask in seen:
                continue
            seen.add(mask)
            pr = self.state_prob(mask)
            if not pr.is_zero():
                out.append((mask, pr))
        return out


# ---------------------------------------------------------------------------
# process specification


@dataclass(frozen=True)
class ProcessSpec:
    graph: Graph
    rule: UpdateRule
    init: InitDist
    weights: tuple = ()

    def __post_init__(self):
        if not self.weights:
            object.__setattr__(self, "weights", tuple(Fraction(1) for _ in range(self.graph.n)))
        else:
            object.__setattr__(self, "weights", tuple(as_fraction(w) for w in self.weights))
        if len(self.weights) != self.graph.n:
            raise UsageError("one weight per vertex required")

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def process(self) -> str:
        return self.rule.name

    @property
    def uniform_weights(self) -> bool:
        return len(set(self.weights)) <= 1

    def selection(self, state: int) -> list[tuple[int, Fraction]]:
        """Active-sampling probabilities w_v / sum_{u in A} w_u."""
        act = list(bits(state))
        total = sum(self.weights[i] for i in act)
        return [(i, self.weights[i] / total) for i in act]

    def transitions(self, state: int) -> list[tuple[int, int, Poly]]:
        """(selected vertex, next state, selection prob * outcome prob) triples."""
        if not state:
            return []
        closed = self.graph.closed
        out = []
        for v, sel in self.selection(state):
            ctx = state & closed[v]
            rest = state & ~closed[v]
            for oc in self.rule.table[v][ctx]:
                out.append((v, rest | oc.result, oc.prob * sel))
        return out

    def kernel(self, state: int) -> dict[int, Poly]:
        """One-step transition polynomials out of ``state``, merged by target."""
        acc: dict[int, Poly] = {}
        for _, nxt, pr in self.transitions(state):
            acc[nxt] = acc.get(nxt, ZERO) + pr
        return {k: v for k, v in acc.items() if not v.is_zero()}

    # derived processes ------------------------------------------------------

    def with_init(self, init: InitDist) -> "ProcessSpec":
        return ProcessSpec(self.graph, self.rule, init, self.weights)

    def condition_inactive(self, labels: Iterable) -> "ProcessSpec":
        """Same process with the given vertices initialized inactive (the II(S) conditioning)."""
        idx = {self.graph.index(lab) for lab in labels}
        act = tuple(ZERO if i in idx else a for i, a in enumerate(self.init.activation))
        return self.with_init(InitDist(self.init.mode, act, self.init.site))

    def restrict(self, keep: Iterable) -> "ProcessSpec":
        """Induced process on the kept vertices (removed vertices are held inactive)."""
        g = self.graph
        sub = g.induced(keep)
        old_of = [g.index(lab) for lab in sub.labels]

        def to_old(mask: int) -> int:
            return sum(1 << old_of[i] for i in bits(mask))

        def to_new(mask: int) -> int:
            m = 0
            for i, o in enumerate(old_of):
                if mask >> o & 1:
                    m |= 1 << i
            return m

        table = []
        for i, o in enumerate(old_of):
            contexts = {}
            for ctx in _contexts(sub, i):
                outs = [(to_new(oc.result), oc.prob) for oc in self.rule.table[o][to_old(ctx)]]
                contexts[ctx] = _merge(outs)
            table.append(contexts)
        init = self.init
        if init.mode == "deterministic":
            new_init = InitDist("deterministic", active=frozenset(x for x in init.active if x in sub._pos))
        else:
            act = tuple(init.activation[o] for o in old_of)
            site = init.site if init.site in sub._pos else None
            mode = init.mode if (init.mode == "iid" or site is not None) else "iid"
            new_init = InitDist(mode, act, site)
        return ProcessSpec(sub, UpdateRule(self.rule.name, tuple(table)), new_init,
                           tuple(self.weights[o] for o in old_of))

    def remove(self, labels: Iterable) -> "ProcessSpec":
        drop = set(labels)
        return self.restrict([lab for lab in self.graph.labels if lab not in drop])


def make_spec(process: str, topology: str, n: int, init: str = "iid", site=None, weights=None) -> ProcessSpec:
    if topology == "cycle":
        g = cycle_graph(n)
    elif topology == "chain":
        g = chain_graph(n)
    else:
        raise UsageError(f"unknown topology {topology!r}")
    try:
        rule = RULES[process](g)
    except KeyError:
        raise UsageError(f"unknown process {process!r}") from None
    if init == "iid":
        idist = InitDist.iid(g)
    elif init == "single-site":
        idist = InitDist.single_site(g, g.labels[0] if site is None else site)
    else:
        raise UsageError(f"unknown init mode {init!r}")
    return ProcessSpec(g, rule, idist, tuple(weights) if weights else ())


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_plup(spec: ProcessSpec) -> ValidationReport:
    rep = ValidationReport()
    g = spec.graph
    if spec.init.mode != "deterministic":
        for i, a in enumerate(spec.init.activation):
            if a.coeff(0) != 0:
                rep.violations.append(f"(i) initial activation of {g.labels[i]} has constant term {a.coeff(0)}")
    for i, w in enumerate(spec.weights):
        if not w > 0:
            rep.violations.append(f"(ii) weight of {g.labels[i]} is not positive")
    for v in range(g.n):
        for ctx in _contexts(g, v):
            outs = spec.rule.table[v].get(ctx)
            if outs is None:
                rep.violations.append(f"(iii) vertex {g.labels[v]}: no outcomes for context {g.labels_of(ctx)}")
                continue
            total = sum((oc.prob for oc in outs), ZERO)
            if total != ONE:
                rep.violations.append(f"(iii) vertex {g.labels[v]}, context {g.labels_of(ctx)}: "
                                      f"outcome probabilities sum to {total}")
            for oc in outs:
                if oc.result & ~g.closed[v]:
                    rep.violations.append(f"(iii) vertex {g.labels[v]}: outcome leaves Γ(v)")
                fresh = oc.result & ~ctx
                if (fresh or oc.result == ctx) and oc.prob.coeff(0) != 0:
                    rep.violations.append(
                        f"(iii) vertex {g.labels[v]}, context {g.labels_of(ctx)} -> {g.labels_of(oc.result)}: "
                        f"constant term must vanish")
    return rep


def truncation_constant(spec: ProcessSpec) -> Fraction:
    """Largest c with mindeg(P_R) >= c * (1 + |A'| - |A|) for every single update.

    Paths of length k then have mindeg >= c * (k + |A_k| - |A_0|) on top of
    the initialization; c is never below 1 / (max degree + 1).
    """
    g = spec.graph
    c = Fraction(1)
    for v in range(g.n):
        for ctx, outs in spec.rule.table[v].items():
            for oc in outs:
                growth = 1 + popcount(oc.result) - popcount(ctx)
                if growth > 0:
                    c = min(c, Fraction(oc.prob.mindeg(), growth))
    return c


# ---------------------------------------------------------------------------
# JSON


def spec_to_json(spec: ProcessSpec) -> dict:
    g = spec.graph
    if g.topology not in ("cycle", "chain") or spec.rule.name not in ("dbs", "cp-basic"):
        raise UsageError("only built-in processes on cycles/chains are serializable")
    doc = {"process": "dbs" if spec.rule.name == "dbs" else "cp",
           "topology": g.topology, "n": g.n}
    init = spec.init
    if init.mode == "iid":
        acts = set(init.activation)
        if acts != {P}:
            raise UsageError("only iid initialization with activation probability p is serializable")
        doc["init"] = {"mode": "iid"}
    elif init.mode == "single-site":
        doc["init"] = {"mode": "single-site", "vertex": init.site}
    else:
        doc["init"] = {"mode": "deterministic", "vertices": sorted(init.active)}
    if not spec.uniform_weights or spec.weights[0] != 1:
        doc["weights"] = [str(w) for w in spec.weights]
    return doc


def spec_from_json(doc: dict | str) -> ProcessSpec:
    if isinstance(doc, str):
        doc = json.loads(doc)
    init = doc.get("init", {"mode": "iid"})
    mode = init.get("mode", "iid")
    weights = [Fraction(w) for w in doc["weights"]] if doc.get("weights") else None
    if mode == "deterministic":
        spec = make_spec(doc["process"], doc["topology"], int(doc["n"]), "iid", weights=weights)
        return spec.with_init(InitDist.deterministic(spec.graph, init["vertices"]))
    return make_spec(doc["process"], doc["topology"], int(doc["n"]), mode,
                     site=init.get("vertex"), weights=weights)
