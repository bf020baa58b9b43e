from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

small_fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
nonzero_fractions = small_fractions.filter(lambda x: x != 0)


def coeff_lists(min_size=0, max_size=6):
    return st.lists(small_fractions, min_size=min_size, max_size=max_size)


def unit_fractions():
    """Rational points strictly inside (0, 1)."""
    return st.integers(1, 98).map(lambda i: Fraction(i, 99))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
