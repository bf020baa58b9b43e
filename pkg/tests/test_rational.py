from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import unit_fractions
from plupseries.cycle_fast import r_cycle_series
from plupseries.errors import ReconstructionError, UsageError
from plupseries.evolution import EventSpec, event_series
from plupseries.exact import Poly, RationalFn, expand_rational
from plupseries.plup import make_spec
from plupseries.rational import (StepsSystem, chain_reach_spec, cycle_r_spec, expected_steps_at, pole_report,
                                 reach_conservation, reach_prob_at, reconstruct, reconstruct_rational_R,
                                 reconstruct_rational_S, s_line_series, s_q_series, stabilized_coeffs_S,
                                 stabilized_line_coeffs, substitute_q)

F = Fraction
p = Poly.x()


def test_r4_closed_form():
    expect = RationalFn(p * (6 - 12 * p + 10 * p * p - 3 * p ** 3), 6 * (1 - p) ** 4)
    assert reconstruct_rational_R(4) == expect


@pytest.mark.parametrize("n", range(3, 9))
def test_reconstruction_expands_to_series(n):
    assert expand_rational(reconstruct_rational_R(n), 8) == r_cycle_series(n, 8)


@settings(max_examples=15)
@given(st.integers(3, 6), unit_fractions())
def test_reach_probabilities_are_conserved(n, q):
    hit, die = reach_conservation(n, q)
    assert hit + die == 1
    assert 0 < hit < 1


@settings(max_examples=10)
@given(st.integers(3, 5), unit_fractions())
def test_reconstructed_s_matches_solver(n, q):
    assert reconstruct_rational_S(n)(q) == reach_prob_at(n, q)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_q_series_engines_agree(n):
    assert s_q_series(n, 8) == s_q_series(n, 8, method="rational")


def test_s3_series_against_event_engine():
    # S in p: P(BA{3} | start {1}) / p through order 2
    spec = make_spec("dbs", "chain", 3, init="single-site", site=1)
    ev = event_series(spec, EventSpec.build(ba=[[3]], divide_by_p=True), 2)
    assert ev == expand_rational(reconstruct_rational_S(3), 2)


def test_s_q_series_known_values():
    assert list(s_q_series(4, 4)) == [1, 0, -2, -4, F(-7, 2)]
    assert s_q_series(5, 4)[4] == F(-33, 4)


def test_steps_value_matches_series_at_small_p():
    n, k = 6, 6
    series = r_cycle_series(n, k + 1)
    exact = expected_steps_at(cycle_r_spec(n), F(1, 100))
    approx = sum(series[i] * F(1, 100) ** i for i in range(k + 1))
    assert abs(exact - approx) <= 2 * abs(series[k + 1]) * F(1, 100) ** (k + 1)


def test_reconstruct_synthetic():
    target = RationalFn(Poly([1, -3, 2]), Poly([2, 0, 0, 1]))
    rec = reconstruct(target)
    assert rec.fn == target
    assert rec.evaluations >= rec.samples


def test_reconstruct_budget():
    with pytest.raises(ReconstructionError):
        # degree 39 needs more than 16 points
        reconstruct(lambda x: sum(x ** k / (k + 1) for k in range(40)), max_points=16)


def test_poles_of_r4():
    rep = pole_report(reconstruct_rational_R(4))
    assert len(rep.roots) == 1
    assert rep.roots[0].multiplicity == 4
    assert abs(rep.min_modulus - 1) < 1e-12
    assert rep.to_csv().startswith("re,im,modulus")


def test_substitute_q_swaps_variable():
    f = reconstruct_rational_S(3)
    g = substitute_q(f)
    assert g(F(1, 3)) == f(F(2, 3))


def test_stabilized_s_table():
    tab = stabilized_coeffs_S(5)
    assert [int(k) for _, k, _ in tab.rows] == list(range(6))
    assert tab.meta["cross_check_status"] == "passed"
    assert tab.value(7, 5) == s_q_series(8, 5)[5]


def test_line_series():
    s = s_line_series(2, 4)
    assert s[0] == 1 and s[1] == 0 and s[2] == 0
    tab = stabilized_line_coeffs(4)
    assert tab.series() == s_line_series(3, 4)
    with pytest.raises(UsageError):
        s_line_series(0, 3)


def test_steps_system_rejects_bad_p():
    sys_ = StepsSystem(cycle_r_spec(3))
    with pytest.raises(UsageError):
        sys_(F(3, 2))
    assert chain_reach_spec(4).graph.n == 4
