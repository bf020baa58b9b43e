"""Seeded Monte Carlo simulation of DBS and contact-process dynamics on large graphs.

Every trial draws from its own PCG64 stream seeded by SeedSequence([seed, trial]),
so results do not depend on the worker count. The numba kernel releases the
GIL and trials are spread over a thread pool.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .errors import UsageError

PROCESSES = {"dbs": 0, "cp": 1, "cp-basic": 1}
DYNAMICS = {"active-sampling": 0, "random-sampling": 1}
TOPOLOGIES = ("chain", "cycle")
DEFAULT_STEP_CAP = 10**9
STEPS_P_CAP = 0.6


@dataclass(frozen=True)
class McConfig:
    p: float
    trials: int
    seed: int = 0
    step_cap: int = DEFAULT_STEP_CAP
    dynamics: str = "active-sampling"
    process: str = "dbs"
    topology: str | None = None      # default: chain for reach, cycle for steps
    workers: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise UsageError("trials must be >= 1")
        if not 0 <= self.p <= 1:
            raise UsageError("p must lie in [0, 1]")
        if self.step_cap < 1:
            raise UsageError("step_cap must be >= 1")
        if self.dynamics not in DYNAMICS:
            raise UsageError(f"unknown dynamics {self.dynamics!r}")
        if self.process not in PROCESSES:
            raise UsageError(f"unknown process {self.process!r}")
        if self.topology is not None and self.topology not in TOPOLOGIES:
            raise UsageError(f"unknown topology {self.topology!r}")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must be a 64-bit unsigned integer")


@dataclass
class McResult:
    observable: str
    n: int
    p: float
    estimate: float
    stderr: float
    trials_used: int
    capped_trials: int
    wall_time: float
    seed: int
    dynamics: str = "active-sampling"

    def to_json(self) -> dict:
        return {"n": self.n, "p": self.p, "estimate": self.estimate, "stderr": self.stderr,
                "trials": self.trials_used, "capped": self.capped_trials, "seed": self.seed,
                "observable": self.observable, "dynamics": self.dynamics}

    def json_line(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, doc: dict | str) -> "McResult":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(doc["observable"], doc["n"], doc["p"], doc["estimate"], doc["stderr"],
                   doc["trials"], doc["capped"], 0.0, doc["seed"],
                   doc.get("dynamics", "active-sampling"))


@dataclass
class EquivalenceReport:
    n: int
    p: float
    active: McResult
    random: McResult
    z: float

    def to_json(self) -> dict:
        return {"n": self.n, "p": self.p, "z": self.z,
                "active": self.active.to_json(), "random": self.random.to_json()}


def trial_rngs(seed: int, trials: int) -> list:
    """One PCG64 stream per trial, spawned from (seed, trial index)."""
    return [np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, i]))) for i in range(trials)]


# ---------------------------------------------------------------------------
# kernel
#
# Vertices 0..n-1 on a chain or a cycle. Active vertices are kept in ``act``
# with back-pointers ``pos`` so uniform selection and removal are O(1).
# Coins come three at a time from one 51-bit draw split into 17-bit chunks;
# a chunk equal to the threshold falls back to a fresh draw, so each coin is
# exactly Bernoulli(p).

CHUNK = 17
CHUNK_MASK = (1 << CHUNK) - 1


@numba.njit(nogil=True, cache=True)
def _trial(rng, rule, dyn, cycle, n, p, iid, start, target, step_cap, active, pos, act):
    """One run. Returns (reached, steps, resamples, capped).

    State changes are written inline: helper calls taking the arrays cost
    more than the update itself.
    """
    scaled = p * (1 << CHUNK)
    thr = int(scaled)
    frac = scaled - thr
    count = 0
    for v in range(n):
        active[v] = False
        if (iid and rng.random() < p) or (not iid and v == start):
            active[v] = True
            pos[v] = count
            act[count] = v
            count += 1
    reached = target >= 0 and active[target]
    steps = 0
    res = 0
    while count > 0 and not reached:
        if steps >= step_cap:
            return reached, steps, res, True
        steps += 1
        if dyn == 0:
            v = act[int(rng.random() * count)]
        else:
            v = int(rng.random() * n)
            if not active[v]:
                continue
        res += 1
        left = v - 1
        right = v + 1
        if cycle:
            left %= n
            right %= n
        w = int(rng.random() * 2.0 ** 51)
        for slot in range(3):
            if rule == 0:
                # DBS: v and its neighbors each active with probability p
                if slot == 0:
                    u = v
                    chunk = w & CHUNK_MASK
                elif slot == 1:
                    u = left
                    chunk = (w >> CHUNK) & CHUNK_MASK
                else:
                    u = right
                    chunk = w >> (2 * CHUNK)
                if u < 0 or u >= n:
                    continue
                on = chunk < thr or (chunk == thr and rng.random() < frac)
            else:
                # CP: recover with probability 1 - p, else infect a uniform neighbor
                if slot > 0:
                    break
                chunk = w & CHUNK_MASK
                if not (chunk < thr or (chunk == thr and rng.random() < frac)):
                    u = v
                    on = False
                else:
                    has_l = left >= 0
                    has_r = right < n
                    if has_l and has_r:
                        u = left if (w >> CHUNK) & 1 else right
                    elif has_l:
                        u = left
                    elif has_r:
                        u = right
                    else:
                        break
                    on = True
            if on:
                if not active[u]:
                    active[u] = True
                    pos[u] = count
                    act[count] = u
                    count += 1
            elif active[u]:
                active[u] = False
                count -= 1
                last = act[count]
                act[pos[u]] = last
                pos[last] = pos[u]
        reached = target >= 0 and active[target]
    return reached, steps, res, False


def _simulate(n: int, cfg: McConfig, topology: str, iid: bool, start: int, target: int):
    if topology == "cycle" and n < 3:
        raise UsageError("cycle needs n >= 3")
    cycle = topology == "cycle"
    rngs = trial_rngs(cfg.seed, cfg.trials)
    reached = np.zeros(cfg.trials, dtype=bool)
    resamples = np.zeros(cfg.trials, dtype=np.int64)
    capped = np.zeros(cfg.trials, dtype=bool)
    args = (PROCESSES[cfg.process], DYNAMICS[cfg.dynamics], cycle, n, float(cfg.p), iid, start,
            target, cfg.step_cap)

    def work(chunk):
        active = np.zeros(n, dtype=np.bool_)
        pos = np.zeros(n, dtype=np.int64)
        act = np.zeros(n, dtype=np.int64)
        for i in chunk:
            r, _, res, c = _trial(rngs[i], *args, active, pos, act)
            reached[i], resamples[i], capped[i] = r, res, c

    workers = max(1, cfg.workers or os.cpu_count() or 1)
    chunks = [range(w, cfg.trials, workers) for w in range(workers)]
    if workers == 1:
        work(chunks[0])
    else:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(work, chunks))
    return reached, resamples, capped


# ---------------------------------------------------------------------------
# observables


def mc_reach_end(n: int, cfg: McConfig) -> McResult:
    """Fraction of runs started from the single active vertex 1 in which vertex n activates.

    The start is deterministic, so there is no 1/p normalization here.
    Capped runs are left out of the denominator and reported.
    """
    if n < 2:
        raise UsageError("reach-end needs n >= 2")
    t0 = time.perf_counter()
    reached, _, capped = _simulate(n, cfg, cfg.topology or "chain", False, 0, n - 1)
    ok = ~capped
    used = int(ok.sum())
    est = float(reached[ok].mean()) if used else float("nan")
    err = math.sqrt(est * (1 - est) / used) if used else float("nan")
    return McResult("reach", n, cfg.p, est, err, used, int(capped.sum()),
                    time.perf_counter() - t0, cfg.seed, cfg.dynamics)


def mc_steps_per_vertex(n: int, cfg: McConfig, p_cap: float = STEPS_P_CAP) -> McResult:
    """Mean total resamples per vertex from an i.i.d.(p) start on the cycle."""
    if n < 3:
        raise UsageError("steps-per-vertex needs n >= 3")
    if cfg.p > p_cap:
        raise UsageError(f"p = {cfg.p} above the cap {p_cap}; termination would be too slow")
    t0 = time.perf_counter()
    _, res, capped = _simulate(n, cfg, cfg.topology or "cycle", True, 0, -1)
    ok = ~capped
    used = int(ok.sum())
    vals = res[ok] / n
    est = float(vals.mean()) if used else float("nan")
    err = float(vals.std(ddof=1) / math.sqrt(used)) if used > 1 else float("nan")
    return McResult("steps", n, cfg.p, est, err, used, int(capped.sum()),
                    time.perf_counter() - t0, cfg.seed, cfg.dynamics)


def mc_dynamics_equivalence(n: int, p: float, trials: int, seed: int = 0, **kw) -> EquivalenceReport:
    """Reach-end under active sampling and under random sampling, with the z-score of the difference."""
    a = mc_reach_end(n, McConfig(p, trials, seed, dynamics="active-sampling", **kw))
    # an independent stream family for the second estimate
    r = mc_reach_end(n, McConfig(p, trials, (seed + 1) % 2**64, dynamics="random-sampling", **kw))
    r.seed = seed
    var = a.stderr ** 2 + r.stderr ** 2
    z = 0.0 if var == 0 else (a.estimate - r.estimate) / math.sqrt(var)
    return EquivalenceReport(n, p, a, r, z)


def crossing_point(results: list[McResult], level: float):
    """Linear interpolation of the first p where the estimate passes ``level``; None if it does not."""
    pts = sorted((r.p, r.estimate) for r in results)
    for (p0, e0), (p1, e1) in zip(pts, pts[1:]):
        if (e0 - level) * (e1 - level) <= 0 and e0 != e1:
            return p0 + (level - e0) * (p1 - p0) / (e1 - e0)
    return None
