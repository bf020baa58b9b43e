"""Acceptance criteria 1-11, each at its stated tolerance.

Every test records one PASS/FAIL/SKIP line; the lines are printed in the
terminal summary (and immediately with ``-s``). Criterion 11 runs the full
n = 5000 workload only when PLUPSERIES_FULL_MC=1, see README.
"""

import os
import time
from fractions import Fraction

import pytest

from plupseries.analysis import dlog_pade, pade_pc_estimate, ratio_estimates
from plupseries.cycle_fast import r_cycle_series
from plupseries.evolution import EventSpec, event_series
from plupseries.exact import Poly, RationalFn, TruncSeries
from plupseries.golden import golden_cells, matches_display, parse_exact
from plupseries.montecarlo import (McConfig, crossing_point, mc_dynamics_equivalence, mc_reach_end,
                                   mc_steps_per_vertex)
from plupseries.plup import make_spec
from plupseries.rational import (cycle_r_spec, expected_steps_at, pole_report, reach_prob_at,
                                 reconstruct_rational_R, s_q_series, stabilized_line_coeffs)
from plupseries.tables import stabilized_coeffs_R
from plupseries.verify import decay_checks, oracle_suite, splitting_check, surgery_checks

RESULTS: dict = {}
FULL_MC = os.environ.get("PLUPSERIES_FULL_MC") == "1"


def record(num: int, ok: bool, detail: str):
    line = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS[num] = line
    print(line)
    assert ok, line


def test_criterion_01_r_table():
    t0 = time.perf_counter()
    bad = []
    for n in range(3, 9):
        s = r_cycle_series(n, 8)
        for _, k, text in golden_cells("R", [n], 8):
            if not matches_display(s[k], text):
                bad.append((n, k, text, s[k]))
    exact = r_cycle_series(3, 3)[3] == Fraction(10, 3) and all(
        r_cycle_series(n, 3)[3] == Fraction(11, 3) for n in range(4, 9))
    dt = time.perf_counter() - t0
    record(1, not bad and exact and dt < 300,
           f"a_k^(n), 3<=n<=8, k<=8: {54 - len(bad)}/54 cells match, exact a_3 ok={exact}, {dt:.1f}s")


def test_criterion_02_s_table():
    t0 = time.perf_counter()
    bad = []
    for n in range(3, 7):
        s = s_q_series(n, 8)
        for _, k, text in golden_cells("S", [n], 8):
            if not matches_display(s[k], text):
                bad.append((n, k, text, s[k]))
    b45 = s_q_series(5, 4)[4]
    dt = time.perf_counter() - t0
    record(2, not bad and b45 == Fraction(-33, 4) and dt < 600,
           f"b_k^[n], 3<=n<=6, k<=8: {36 - len(bad)}/36 cells match, b_4^[5] = {b45}, {dt:.1f}s")


def test_criterion_03_closed_form():
    p = Poly.x()
    expect = RationalFn(p * (6 - 12 * p + 10 * p ** 2 - 3 * p ** 3), 6 * (1 - p) ** 4)
    got = reconstruct_rational_R(4)
    record(3, got == expect, f"R_(4) = {got}")


@pytest.mark.slow
def test_criterion_04_pole():
    t0 = time.perf_counter()
    fn = reconstruct_rational_R(10)
    rep = pole_report(fn)
    dt = time.perf_counter() - t0
    mod = rep.min_modulus
    record(4, abs(mod - 0.9598) <= 0.0005 and dt < 1800,
           f"min |pole| of R_(10) = {mod:.7f} (degrees {fn.degrees}), {dt:.0f}s")


def test_criterion_05_stabilization():
    # cycles start at n = 3, so k = 0, 1 compare cycle(3) with cycle(4)
    r_bad = [k for k in range(13)
             if r_cycle_series(max(3, k + 1), k)[k] != r_cycle_series(max(4, k + 2), k)[k]]
    s_bad = [k for k in range(8) if s_q_series(k + 2, k)[k] != s_q_series(k + 3, k)[k]]
    record(5, not r_bad and not s_bad,
           f"a_k^(k+1) = a_k^(k+2) for k<=12 (violations {r_bad}), "
           f"b_k^[k+2] = b_k^[k+3] for k<=7 (violations {s_bad})")


def test_criterion_06_estimator_band():
    series = stabilized_coeffs_R(17).series()
    pade = pade_pc_estimate(series)
    ratio = ratio_estimates(series)
    ok = 0.625 <= pade.headline <= 0.645 and 0.60 <= ratio.headline <= 0.68
    record(6, ok, f"K=17: Pade p_c = {pade.headline:.5f} (spread {pade.spread:.4f}), "
                  f"ratio p_c = {ratio.headline:.5f}")


def _synthetic(qc: Fraction, beta: Fraction, order: int) -> TruncSeries:
    out, c = [], Fraction(1)
    for k in range(order + 1):
        out.append(c)
        c = c * (beta - k) / (k + 1) * (-1 / qc)
    return TruncSeries(out)


@pytest.mark.slow
def test_criterion_07_exponent():
    worst = 0.0
    for qc in (Fraction(3, 10), Fraction(127, 200)):
        for beta in (Fraction(1, 4), Fraction(277, 1000), Fraction(1, 2), Fraction(1)):
            rep = dlog_pade(_synthetic(qc, beta, 12))
            worst = max(worst, abs(rep.headline - float(qc)), abs(rep.headline_exponent - float(beta)))
    line = stabilized_line_coeffs(8).series()
    rep = dlog_pade(line)
    beta = rep.headline_exponent
    record(7, worst <= 1e-6 and 0.20 <= beta <= 0.36,
           f"synthetic max error {worst:.1e}; S_Z (q-order 8): q_c = {rep.headline:.4f}, beta = {beta:.4f}")


def test_criterion_08_oracle():
    checks = oracle_suite(order=4)
    failed = [c.name for c in checks if not c.passed]
    record(8, len(checks) == 18 and not failed, f"{len(checks) - len(failed)}/{len(checks)} oracle checks exact")


def test_criterion_09_lemmas():
    split = splitting_check(order=8)
    surgery = surgery_checks()
    decay = decay_checks(sizes=range(3, 7))
    ok = split.passed and len(surgery) >= 5 and all(c.passed for c in surgery) and all(c.passed for c in decay)
    record(9, ok, f"splitting {split.passed}; surgery {sum(c.passed for c in surgery)}/{len(surgery)}; "
                  f"decay {sum(c.passed for c in decay)}/{len(decay)} chains")


def test_criterion_10_cross_engine():
    p = Fraction(1, 100)
    K = 6
    series_ok = True
    for n in range(3, 9):
        r = r_cycle_series(n, K + 1)
        gap = abs(expected_steps_at(cycle_r_spec(n), p) - sum(r[k] * p ** k for k in range(K + 1)))
        series_ok &= gap <= 2 * abs(r[K + 1]) * p ** (K + 1)
        spec = make_spec("dbs", "chain", n, init="single-site", site=1)
        s = event_series(spec, EventSpec.build(ba=[[n]], divide_by_p=True), K + 1)
        gap = abs(reach_prob_at(n, p) - sum(s[k] * p ** k for k in range(K + 1)))
        series_ok &= gap <= 2 * abs(s[K + 1]) * p ** (K + 1)
    points = []
    for n, prob in ((10, 0.5), (6, 0.7)):
        res = mc_reach_end(n, McConfig(prob, 40000, seed=2024))
        points.append(abs(res.estimate - float(reach_prob_at(n, prob))) / res.stderr)
    res = mc_steps_per_vertex(8, McConfig(0.3, 40000, seed=2024))
    points.append(abs(res.estimate - float(expected_steps_at(cycle_r_spec(8), Fraction(3, 10)))) / res.stderr)
    eq = mc_dynamics_equivalence(10, 0.5, 40000, seed=77)
    ok = series_ok and all(z <= 3 for z in points) and abs(eq.z) < 4
    record(10, ok, f"series vs solve at p=1/100, n<=8: {series_ok}; MC |z| = "
                   f"{', '.join(f'{z:.2f}' for z in points)}; dynamics z = {eq.z:.2f}")


@pytest.mark.skipif(not FULL_MC, reason="set PLUPSERIES_FULL_MC=1 for the n=5000, 10^4-trial run")
def test_criterion_11_reach_curve():
    t0 = time.perf_counter()
    results = [mc_reach_end(5000, McConfig(p, 10_000, seed=11)) for p in
               (0.60, 0.61, 0.62, 0.63, 0.64, 0.65, 0.66, 0.67)]
    dt = time.perf_counter() - t0
    cross = crossing_point(results, 0.1)
    ok = cross is not None and 0.60 <= cross <= 0.67 and dt < 1200
    curve = ", ".join(f"{r.p:.2f}:{r.estimate:.3f}" for r in results)
    record(11, ok, f"crossing of 0.1 at p = {cross}, {dt:.0f}s on {os.cpu_count()} cores [{curve}]")


def test_criterion_11_gate_notice():
    if FULL_MC:
        pytest.skip("full run requested; see test_criterion_11_reach_curve")
    RESULTS[11] = ("criterion 11: SKIP - n=5000 reach curve needs PLUPSERIES_FULL_MC=1; "
                   f"about 4 core-hours, {os.cpu_count()} core(s) here, 20-minute budget not reachable")
    print(RESULTS[11])
