from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from plupseries.cycle_fast import r_cycle_series
from plupseries.errors import ResourceError, UsageError
from plupseries.evolution import (TERMINATION, EventSpec, StateDist, brute_force_paths, event_series, evolve_step,
                                  expected_steps_series, first_difference, path_probability, resample_series,
                                  run_evolution, step_bound, t_chain_series)
from plupseries.exact import Poly, TruncSeries
from plupseries.plup import make_spec

p = Poly.x()
small_specs = st.builds(make_spec, st.sampled_from(["dbs", "cp"]), st.sampled_from(["chain", "cycle"]),
                        st.integers(3, 5))


def test_termination_is_certain():
    spec = make_spec("dbs", "cycle", 4)
    assert event_series(spec, TERMINATION, 5) == TruncSeries.one(5)


@settings(max_examples=20)
@given(small_specs, st.data())
def test_ri_and_ba_are_complementary(spec, data):
    v = data.draw(st.sampled_from(spec.graph.labels))
    order = 3
    ri = event_series(spec, EventSpec.build(ri=[v]), order)
    ba = event_series(spec, EventSpec.build(ba=[[v]]), order)
    assert ri + ba == TruncSeries.one(order)


@settings(max_examples=15)
@given(small_specs)
def test_steps_are_total_resamples(spec):
    order = 3
    res = run_evolution(spec, order, steps=True, resamples=True)
    total = TruncSeries.zero(order)
    for s in res.resamples.values():
        total = total + s
    assert total == res.steps_total


def test_cycle_symmetry():
    spec = make_spec("dbs", "cycle", 5)
    res = resample_series(spec, 4)
    assert len(set(res.values())) == 1
    a = event_series(spec, EventSpec.build(ri=[0]), 4)
    b = event_series(spec, EventSpec.build(ri=[3]), 4)
    assert a == b


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_generic_engine_matches_cycle_engine(n):
    spec = make_spec("dbs", "cycle", n)
    assert expected_steps_series(spec, 6) * Fraction(1, n) == r_cycle_series(n, 6)


def test_known_low_orders():
    r4 = r_cycle_series(4, 5)
    assert list(r4)[:4] == [0, 1, 2, Fraction(11, 3)]
    assert r_cycle_series(3, 3)[3] == Fraction(10, 3)
    assert list(t_chain_series(4)) == [1, 2, 4, Fraction(15, 2), Fraction(41, 3)]


def test_path_probability():
    spec = make_spec("dbs", "chain", 3)
    # only vertex 1 starts active, it is selected and Γ(1) = {1, 2} comes back inactive
    assert path_probability(spec, [1], [(1, [])]) == p * (1 - p) ** 4
    with pytest.raises(UsageError):
        path_probability(spec, [1], [(2, [])])


def test_brute_force_small_case():
    spec = make_spec("dbs", "chain", 3)
    brute = brute_force_paths(spec, TERMINATION, 6)
    assert brute.order == 6
    assert first_difference(brute, TruncSeries.one(6)) == 7


def test_brute_force_steps_weight():
    spec = make_spec("cp", "cycle", 3)
    brute = brute_force_paths(spec, TERMINATION, 7, weight="steps")
    assert first_difference(brute, expected_steps_series(spec, brute.order)) > brute.order


def test_evolve_step_conserves_mass():
    spec = make_spec("cp", "chain", 4)
    dist = StateDist.initial(spec, 4)
    for _ in range(5):
        dist = evolve_step(dist, spec)
        assert dist.total() == TruncSeries.one(4)


def test_divide_by_p():
    spec = make_spec("dbs", "chain", 3, init="single-site", site=1)
    ev = EventSpec.build(ba=[[3]], divide_by_p=True)
    s = event_series(spec, ev, 4)
    # reaching vertex 3 needs at least two reactivations
    assert s.mindeg() == 2
    assert s == brute_force_paths(spec, ev, 6).truncate(4)


def test_step_bound():
    assert step_bound(make_spec("dbs", "cycle", 4), 6) == 7
    assert step_bound(make_spec("cp", "cycle", 4), 6) == 13


def test_state_limit():
    with pytest.raises(ResourceError):
        run_evolution(make_spec("dbs", "cycle", 10), 6, steps=True, max_states=5)


def test_event_validation():
    spec = make_spec("dbs", "chain", 4)
    with pytest.raises(UsageError):
        event_series(spec, EventSpec.build(ri=[1], ba=[[1, 2]]), 3)
    with pytest.raises(UsageError):
        event_series(spec, EventSpec.build(ri=[9]), 3)
