from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from plupseries.cycle_fast import MAX_CYCLE, dihedral_tables, r_cycle_series
from plupseries.errors import ResourceError, UsageError
from plupseries.exact import TruncSeries
from plupseries.tables import CoeffTable, load_table, r_table, stabilized_coeffs_R


def test_dihedral_canon():
    canon, refl = dihedral_tables(5)
    assert canon[0b00011] == canon[0b10001] == canon[0b01100]
    assert canon[0b00101] != canon[0b00011]
    assert all(canon[m] <= m for m in range(32))
    assert refl[0b00011] == 0b00011 ^ 0b00010 ^ 0b10000


def test_r_cycle_bounds():
    with pytest.raises(UsageError):
        r_cycle_series(2, 3)
    with pytest.raises((ResourceError, UsageError)):
        r_cycle_series(MAX_CYCLE + 1, 3)


def test_stabilization_of_r():
    small, big = r_cycle_series(9, 8), r_cycle_series(10, 8)
    assert list(small) == list(big)
    assert r_cycle_series(6, 6)[6] != r_cycle_series(7, 6)[6]


def test_stabilized_r_table():
    tab = stabilized_coeffs_R(8)
    s = tab.series()
    assert s[3] == Fraction(11, 3)
    assert s == r_cycle_series(10, 8)
    assert tab.meta["cross_check_status"] == "passed"


@given(st.lists(st.fractions(max_denominator=50), min_size=1, max_size=6))
def test_table_roundtrips(values):
    tab = CoeffTable.from_series("R", 5, TruncSeries(values))
    assert CoeffTable.from_csv(tab.to_csv()) == tab
    assert CoeffTable.from_json(tab.to_json()) == tab


def test_table_files(tmp_path):
    tab = r_table([3, 4], 4)
    paths = tab.write(tmp_path / "r")
    assert [p.suffix for p in paths] == [".csv", ".json"]
    assert load_table(paths[0]) == tab
    assert load_table(paths[1]) == tab
    with pytest.raises(UsageError):
        tab.series()
    assert tab.series(4) == r_cycle_series(4, 4)


def test_bad_csv():
    with pytest.raises(UsageError):
        CoeffTable.from_csv("a,b\n1,2\n")
