from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from plupseries.cycle_fast import r_cycle_series
from plupseries.golden import KNOWN_MISPRINTS, displayed, golden_cells, matches_display, parse_exact
from plupseries.rational import s_q_series
from plupseries.verify import SUITES, decay_checks, golden_suite, oracle_suite, splitting_check, surgery_checks


def test_parse_exact():
    assert parse_exact("3+2/3") == Fraction(11, 3)
    assert parse_exact("-2") == -2
    assert parse_exact("6.44") is None


def test_display_matching_rules():
    assert matches_display(Fraction(-33, 4), "-8.25")
    assert matches_display(Fraction(37, 6), "6.16")         # truncated
    assert matches_display(Fraction(37, 6), "6.17")         # rounded
    assert not matches_display(Fraction(37, 6), "6.18")
    assert matches_display(Fraction(11, 1), "11.0")
    assert not matches_display(Fraction(10, 3), "3+2/3")


@given(st.fractions(min_value=-1000, max_value=1000))
def test_rounded_display_always_matches(v):
    assert matches_display(v, f"{float(v):.2f}")


def test_tables_have_full_rows():
    for n in range(3, 11):
        assert len(displayed("R", n)) == 18
        assert len(displayed("S", n)) == 16
    assert len(list(golden_cells("R", [3, 4], 8))) == 18


@pytest.mark.slow
def test_full_reference_tables():
    bad = []
    for n in list(range(3, 11)) + [18]:
        series = r_cycle_series(n, 17)
        bad += [("R", n, k) for _, k, t in golden_cells("R", [n], 17) if not matches_display(series[k], t)]
    for n in range(3, 11):
        series = s_q_series(n, 15)
        bad += [("S", n, k) for _, k, t in golden_cells("S", [n], 15) if not matches_display(series[k], t)]
    assert set(bad) == KNOWN_MISPRINTS


def test_golden_suite():
    assert all(c.passed for c in golden_suite())


def test_golden_suite_reports_failures(monkeypatch):
    import plupseries.verify as v
    monkeypatch.setattr(v, "r_cycle_series", lambda n, k: r_cycle_series(n, k) * 2)
    checks = v.golden_suite(r_sizes=[4], s_sizes=[])
    assert not checks[0].passed
    assert checks[0].data["k"] == 1


def test_lemmas():
    assert splitting_check().passed
    surgery = surgery_checks()
    assert len(surgery) >= 5 and all(c.passed for c in surgery)
    assert all(c.passed for c in decay_checks(sizes=range(3, 6)))


def test_oracle_suite():
    checks = oracle_suite(order=3)
    assert len(checks) == 18 and all(c.passed for c in checks)


def test_suite_registry():
    assert set(SUITES) == {"golden", "lemmas", "oracle"}
    assert "name" in golden_suite(r_sizes=[3], s_sizes=[])[0].to_json()
