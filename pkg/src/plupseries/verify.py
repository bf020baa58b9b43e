"""End-to-end check suites: reference tables, structural lemmas and the path oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .cycle_fast import r_cycle_series
from .evolution import EventSpec, brute_force_paths, event_series, first_difference, graph_surgery_defect, ri_covariance
from .golden import golden_cells, matches_display
from .plup import Graph, InitDist, ProcessSpec, chain_graph, dbs_rule, make_spec, truncation_constant
from .rational import s_q_series


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    data: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail,
                **({"data": self.data} if self.data else {})}


def _series_golden(quantity: str, sizes, max_k: int, compute) -> list[Check]:
    out = []
    for n in sizes:
        series = compute(n, max_k)
        first_bad = None
        for _, k, text in golden_cells(quantity, [n], max_k):
            if not matches_display(series[k], text):
                first_bad = (k, text, series[k])
                break
        name = f"{quantity} n={n} k<={max_k}"
        if first_bad is None:
            out.append(Check(name, True))
        else:
            k, text, val = first_bad
            out.append(Check(name, False, f"k={k}: computed {val} ({float(val):.6g}), displayed {text}",
                             {"k": k, "computed": str(val), "displayed": text}))
    return out


def golden_suite(r_sizes=range(3, 9), r_max_k: int = 8, s_sizes=range(3, 7), s_max_k: int = 8) -> list[Check]:
    """Reference coefficient tables: R on cycles and S (in q) on chains."""
    checks = _series_golden("R", r_sizes, r_max_k, r_cycle_series)
    checks += _series_golden("S", s_sizes, s_max_k, s_q_series)
    return checks


# ---------------------------------------------------------------------------
# lemmas


def splitting_check(order: int = 8) -> Check:
    """chain(5), S={3}: P(RI{1,3,5} | II{3}) against the product over the two halves."""
    spec = make_spec("dbs", "chain", 5).condition_inactive([3])
    whole = event_series(spec, EventSpec.build(ri=[1, 3, 5]), order)
    left = event_series(spec.restrict([1, 2, 3]), EventSpec.build(ri=[1, 3]), order)
    right = event_series(spec.restrict([3, 4, 5]), EventSpec.build(ri=[3, 5]), order)
    prod = left * right
    k = first_difference(whole, prod)
    return Check(f"splitting chain(5) S={{3}} through order {order}", k > order,
                 "" if k > order else f"first difference at order {k}")


def _surgery_configs():
    g6 = chain_graph(6)
    single3 = ProcessSpec(g6, dbs_rule(g6), InitDist.single_site(g6, 3))
    iid6 = make_spec("dbs", "chain", 6)
    cyc6 = make_spec("dbs", "cycle", 6)
    # chain 1..3 plus an isolated vertex 5
    gd = Graph.from_edges([1, 2, 3, 5], [(1, 2), (2, 3)])
    disc = ProcessSpec(gd, dbs_rule(gd), InitDist.iid(gd))
    g6b = chain_graph(6)
    single1 = ProcessSpec(g6b, dbs_rule(g6b), InitDist.single_site(g6b, 1))
    cp6 = make_spec("cp", "chain", 6)
    return [
        ("chain(6) minus {6}, RI{1}, start at 3", single3, [6], EventSpec.build(ri=[1]), [1]),
        ("chain(6) minus {5,6}, RI{1}, iid", iid6, [5, 6], EventSpec.build(ri=[1]), [1]),
        ("cycle(6) minus {3}, RI{0}, iid", cyc6, [3], EventSpec.build(ri=[0]), [0]),
        ("chain(6) minus {6}, BA{2}, start at 1", single1, [6], EventSpec.build(ba=[[2]]), [2]),
        ("chain(3)+isolated {5} minus {5}, RI{1}, iid", disc, [5], EventSpec.build(ri=[1]), [1]),
        ("cp chain(6) minus {5,6}, RI{1}, iid", cp6, [5, 6], EventSpec.build(ri=[1]), [1]),
    ]


def surgery_checks(extra: int = 1) -> list[Check]:
    """First defect between G and G minus Y is at order >= d(X, Y)."""
    out = []
    for name, spec, ys, event, xs in _surgery_configs():
        g = spec.graph
        d = g.distance(xs, ys)
        finite = d != float("inf")
        order = (d + extra) if finite else 6
        defect = graph_surgery_defect(spec, spec.remove(ys), event, order)
        bound = d if finite else order + 1
        out.append(Check(f"surgery {name}", defect >= bound,
                         f"first defect {defect}, d(X,Y) = {d if finite else 'inf'}",
                         {"defect": defect, "distance": d if finite else None}))
    return out


def decay_checks(sizes=range(3, 7), max_set: int = 2) -> list[Check]:
    """Cov(RI X, RI Y) has mindeg >= d(X, Y) + 1 on chains with iid start."""
    out = []
    for n in sizes:
        spec = make_spec("dbs", "chain", n)
        g = spec.graph
        labels = list(g.labels)
        worst = None
        for sx in range(1, max_set + 1):
            for xs in combinations(labels, sx):
                rest = [v for v in labels if v not in xs]
                for sy in range(1, max_set + 1):
                    for ys in combinations(rest, sy):
                        if min(ys) < min(xs):
                            continue            # each unordered pair once
                        d = g.distance(xs, ys)
                        cov = ri_covariance(spec, xs, ys, d + 1)
                        md = cov.mindeg()
                        ok = md >= d + 1          # a zero series reports order + 1
                        if not ok:
                            worst = (xs, ys, d, md)
                            break
                    if worst:
                        break
                if worst:
                    break
            if worst:
                break
        out.append(Check(f"decay of correlations chain({n})", worst is None,
                         "" if worst is None else f"X={worst[0]} Y={worst[1]} d={worst[2]} mindeg={worst[3]}"))
    return out


def lemma_suite() -> list[Check]:
    return [splitting_check()] + surgery_checks() + decay_checks()


# ---------------------------------------------------------------------------
# oracle


def _oracle_events(spec: ProcessSpec):
    labels = spec.graph.labels
    yield "termination", EventSpec()
    yield f"RI{{{labels[0]}}}", EventSpec.build(ri=[labels[0]])
    yield f"BA{{{labels[-1]}}}", EventSpec.build(ba=[[labels[-1]]])


def oracle_suite(order: int = 4) -> list[Check]:
    """event_series against explicit path enumeration, exact through ``order``."""
    out = []
    for process in ("dbs", "cp"):
        for topology, n in (("cycle", 3), ("cycle", 4), ("chain", 4)):
            spec = make_spec(process, topology, n)
            c = truncation_constant(spec)
            # smallest path length whose sound order reaches ``order``
            maxlen = next(m for m in range(1, 64) if -(-c * (m + 1) // 1) - 1 >= order)
            for ev_name, event in _oracle_events(spec):
                brute = brute_force_paths(spec, event, maxlen).truncate(order)
                series = event_series(spec, event, order)
                k = first_difference(series, brute)
                out.append(Check(f"oracle {process} {topology}({n}) {ev_name}", k > order,
                                 "" if k > order else f"first difference at order {k}",
                                 {"maxlen": maxlen}))
    return out


SUITES = {"golden": golden_suite, "lemmas": lemma_suite, "oracle": oracle_suite}


def run_suite(name: str) -> list[Check]:
    return SUITES[name]()
