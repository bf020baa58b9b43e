from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from plupseries.errors import UsageError
from plupseries.exact import Poly
from plupseries.plup import (Graph, InitDist, ProcessSpec, UpdateOutcome, UpdateRule, chain_graph, cycle_graph,
                             dbs_rule, make_spec, spec_from_json, spec_to_json, truncation_constant, validate_plup)

p = Poly.x()
specs = st.builds(make_spec, st.sampled_from(["dbs", "cp"]), st.sampled_from(["chain", "cycle"]),
                  st.integers(3, 6))


def test_graphs():
    c = cycle_graph(5)
    assert c.distance([0], [2]) == 2 and c.distance([0], [3]) == 2
    ch = chain_graph(5)
    assert ch.labels == (1, 2, 3, 4, 5)
    assert ch.distance([1], [5]) == 4
    assert ch.ball([3], 1) == {2, 3, 4}
    g = Graph.from_edges([1, 2, 5], [(1, 2)])
    assert g.distance([1], [5]) == float("inf")
    assert not g.is_connected()
    with pytest.raises(UsageError):
        cycle_graph(2)
    with pytest.raises(UsageError):
        Graph.from_edges([1, 2], [(1, 1)])


@given(specs)
def test_builtin_rules_are_plups(spec):
    assert validate_plup(spec).ok


@given(specs)
def test_outcome_probabilities_sum_to_one(spec):
    for state in range(1, 1 << spec.n):
        total = sum((pr for pr in spec.kernel(state).values()), Poly())
        assert total == Poly([1])


def test_truncation_constants():
    assert truncation_constant(make_spec("dbs", "cycle", 5)) == 1
    assert truncation_constant(make_spec("cp", "cycle", 5)) == Fraction(1, 2)


def test_dbs_outcome_weights():
    g = cycle_graph(4)
    rule = dbs_rule(g)
    ctx = g.closed[0]
    outs = {o.result: o.prob for o in rule.outcomes(0, ctx)}
    assert outs[0] == (1 - p) ** 3
    assert outs[ctx] == p ** 3
    assert outs[1] == p * (1 - p) ** 2


def test_validation_flags_bad_rule():
    g = chain_graph(3)
    good = dbs_rule(g)
    bad_table = list(good.table)
    # vertex 1 (index 0) always reactivates its neighbor with probability 1
    bad_table[0] = {ctx: (UpdateOutcome(g.closed[0], Poly([1])),) for ctx in good.table[0]}
    spec = ProcessSpec(g, UpdateRule("bad", tuple(bad_table)), InitDist.iid(g))
    rep = validate_plup(spec)
    assert not rep.ok
    assert any("constant term" in v for v in rep.violations)
    spec2 = ProcessSpec(g, good, InitDist.iid(g, Poly([Fraction(1, 2)])))
    assert not validate_plup(spec2).ok


def test_init_distributions():
    g = chain_graph(3)
    iid = InitDist.iid(g)
    assert sum((pr for _, pr in iid.support()), Poly()) == Poly([1])
    single = InitDist.single_site(g, 2)
    assert dict(single.support()) == {0: 1 - p, 0b010: p}


def test_restrict_and_condition():
    spec = make_spec("dbs", "chain", 5)
    sub = spec.restrict([1, 2, 3])
    assert sub.graph.labels == (1, 2, 3)
    assert validate_plup(sub).ok
    # vertex 3 lost a neighbor, so its resample touches two vertices
    i3 = sub.graph.index(3)
    assert len(sub.rule.outcomes(i3, sub.graph.closed[i3])) == 4
    cond = spec.condition_inactive([3])
    assert cond.init.activation[2] == Poly()


@given(st.sampled_from(["dbs", "cp"]), st.sampled_from(["chain", "cycle"]), st.integers(3, 8))
def test_spec_json_roundtrip(process, topology, n):
    spec = make_spec(process, topology, n)
    again = spec_from_json(spec_to_json(spec))
    assert spec_to_json(again) == spec_to_json(spec)
    assert again.rule == spec.rule


def test_weighted_selection():
    spec = make_spec("dbs", "cycle", 3, weights=[1, 2, 3])
    sel = dict(spec.selection(0b111))
    assert sel == {0: Fraction(1, 6), 1: Fraction(1, 3), 2: Fraction(1, 2)}
    assert spec_from_json(spec_to_json(spec)).weights == spec.weights


def test_unknown_names():
    with pytest.raises(UsageError):
        make_spec("voter", "chain", 4)
    with pytest.raises(UsageError):
        make_spec("dbs", "torus", 4)
