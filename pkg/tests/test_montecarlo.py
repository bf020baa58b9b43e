import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from plupseries.errors import UsageError
from plupseries.montecarlo import (McConfig, McResult, crossing_point, mc_dynamics_equivalence, mc_reach_end,
                                   mc_steps_per_vertex, trial_rngs)
from plupseries.rational import reach_prob_at


def test_config_validation():
    for bad in (dict(p=1.5, trials=1), dict(p=0.5, trials=0), dict(p=0.5, trials=1, dynamics="x"),
                dict(p=0.5, trials=1, process="ising"), dict(p=0.5, trials=1, seed=-1)):
        with pytest.raises(UsageError):
            McConfig(**bad)


def test_trial_streams_are_independent_of_count():
    a = trial_rngs(7, 3)
    b = trial_rngs(7, 5)
    assert [g.random() for g in a] == [g.random() for g in b[:3]]


def test_reproducible_across_worker_counts():
    r1 = mc_reach_end(12, McConfig(0.55, 400, seed=3, workers=1))
    r3 = mc_reach_end(12, McConfig(0.55, 400, seed=3, workers=3))
    assert r1.to_json() == r3.to_json()
    other = mc_reach_end(12, McConfig(0.55, 400, seed=4, workers=1))
    assert other.estimate != r1.estimate or other.seed != r1.seed


def test_extreme_parameters():
    assert mc_reach_end(20, McConfig(0.0, 50)).estimate == 0.0
    assert mc_reach_end(20, McConfig(1.0, 50)).estimate == 1.0
    assert mc_steps_per_vertex(10, McConfig(0.0, 50)).estimate == 0.0


def test_step_cap():
    res = mc_steps_per_vertex(10, McConfig(1.0, 5, step_cap=100), p_cap=1.0)
    assert res.capped_trials == 5 and res.trials_used == 0
    with pytest.raises(UsageError):
        mc_steps_per_vertex(10, McConfig(0.9, 5))


@pytest.mark.parametrize("n,p", [(5, 0.5), (6, 0.7)])
def test_reach_matches_exact(n, p):
    res = mc_reach_end(n, McConfig(p, 20000, seed=11))
    exact = float(reach_prob_at(n, p))
    assert abs(res.estimate - exact) < 4 * res.stderr


def test_cp_reach_is_a_probability():
    res = mc_reach_end(6, McConfig(0.7, 2000, seed=1, process="cp"))
    assert 0 < res.estimate < 1


@settings(max_examples=10)
@given(st.floats(0.05, 0.95), st.integers(0, 2**32))
def test_estimates_in_range(p, seed):
    res = mc_reach_end(8, McConfig(p, 200, seed=seed))
    assert 0 <= res.estimate <= 1
    assert res.trials_used + res.capped_trials == 200


def test_dynamics_equivalence_small():
    rep = mc_dynamics_equivalence(6, 0.6, 5000, seed=5)
    assert abs(rep.z) < 4
    assert rep.to_json()["active"]["dynamics"] == "active-sampling"


def test_result_json_roundtrip():
    res = mc_reach_end(6, McConfig(0.5, 100, seed=2))
    line = res.json_line()
    again = McResult.from_json(line)
    assert again.to_json() == res.to_json()
    assert "wall_time" not in json.loads(line)


def test_crossing_point():
    rs = [McResult("reach", 10, p, e, 0.0, 1, 0, 0.0, 0) for p, e in [(0.6, 0.0), (0.65, 0.05), (0.7, 0.25)]]
    assert crossing_point(rs, 0.1) == pytest.approx(0.6625)
    assert crossing_point(rs, 0.9) is None
    assert math.isclose(crossing_point(rs[:2], 0.0), 0.6)
