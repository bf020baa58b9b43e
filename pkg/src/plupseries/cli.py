"""Command-line interface: ``plupseries <command> ...``.

Every command writes its outputs next to a ``<stem>.manifest.json`` that
records the parameters, tool version, timestamps and SHA-256 digests of all
inputs and outputs. Data files carry no timestamps, so reruns are
byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__
from .analysis import dlog_pade, pade_pc_estimate, ratio_estimates
from .cycle_fast import r_cycle_series
from .errors import ConsistencyError, PlupError, UsageError
from .evolution import expected_steps_series, t_chain_series
from .exact import rational_from_json, rational_to_json
from .plup import make_spec
from .rational import (StepsSystem, pole_report, reconstruct, reconstruct_rational_R, reconstruct_rational_S,
                       s_q_series, stabilized_coeffs_S, stabilized_line_coeffs, substitute_q)
from .tables import CoeffTable, load_table, stabilized_coeffs_R


@dataclass
class RunManifest:
    command: str
    parameters: dict
    version: str = __version__
    started: str = ""
    finished: str = ""
    inputs: dict = field(default_factory=dict)     # path -> sha256
    outputs: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class Run:
    """Collects outputs of one command and writes its manifest."""

    def __init__(self, command: str, args: argparse.Namespace, stem: Path):
        params = {k: v for k, v in vars(args).items() if k not in ("func", "command")}
        self.stem = Path(stem)
        self.stem.parent.mkdir(parents=True, exist_ok=True)
        self.manifest = RunManifest(command, params, started=_now())

    @property
    def manifest_name(self) -> str:
        return self.stem.name + ".manifest.json"

    def input(self, path: Path):
        self.manifest.inputs[str(path)] = _digest(path)

    def write_text(self, suffix: str, text: str) -> Path:
        path = self.stem.parent / (self.stem.name + suffix)
        path.write_text(text, encoding="utf-8")
        self.manifest.outputs[str(path)] = _digest(path)
        return path

    def write_json(self, suffix: str, doc: dict) -> Path:
        doc = {**doc, "manifest": self.manifest_name}
        return self.write_text(suffix, json.dumps(doc, indent=2, sort_keys=True) + "\n")

    def write_table(self, table: CoeffTable):
        self.write_text(".csv", table.to_csv())
        self.write_json(".json", table.to_json())

    def close(self) -> Path:
        self.manifest.finished = _now()
        path = self.stem.parent / self.manifest_name
        path.write_text(json.dumps(self.manifest.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path


# ---------------------------------------------------------------------------
# commands


def _series_table(args) -> CoeffTable:
    q = args.quantity
    if q == "R":
        if args.process == "dbs" and args.topology == "cycle":
            s = r_cycle_series(args.n, args.order)
        else:
            s = expected_steps_series(make_spec(args.process, args.topology, args.n), args.order) * Fraction(1, args.n)
        return CoeffTable.from_series("R", args.n, s, process=args.process, topology=args.topology)
    if q == "S":
        if args.process != "dbs" or args.topology != "chain":
            raise UsageError("quantity S is defined for the DBS process on a chain")
        return CoeffTable.from_series("S", args.n, s_q_series(args.n, args.order), variable="q",
                                      process="dbs", topology="chain")
    if q == "T":
        if args.process != "dbs" or args.topology != "chain":
            raise UsageError("quantity T is defined for the DBS process on a chain")
        s = t_chain_series(args.order, n=args.n)
        return CoeffTable.from_series("T", args.n or args.order + 2, s, process="dbs", topology="chain")
    raise UsageError(f"unknown quantity {q!r}")


def cmd_series(args) -> int:
    if args.n is None and args.quantity != "T":
        raise UsageError("--n is required for quantities R and S")
    stem = args.out or f"{args.quantity}_{args.process}_{args.topology}_n{args.n}_K{args.order}"
    run = Run("series", args, stem)
    run.write_table(_series_table(args))
    run.close()
    return 0


def cmd_stabilized(args) -> int:
    stem = Path(args.out or f"{args.quantity}_stabilized_K{args.order}")
    run = Run("stabilized", args, stem)
    try:
        if args.quantity == "R":
            table = stabilized_coeffs_R(args.order)
        elif args.quantity == "S":
            table = stabilized_coeffs_S(args.order)
        elif args.quantity == "S_Z":
            table = stabilized_line_coeffs(args.order)
        else:
            table = CoeffTable.from_series("T", args.order + 2, t_chain_series(args.order),
                                           threshold="n = K + 2", cross_check="n = K + 3",
                                           cross_check_status="passed")
    except ConsistencyError as exc:
        dump = {k: [str(c) for c in v] if hasattr(v, "__iter__") and not isinstance(v, str) else str(v)
                for k, v in exc.data.items()}
        run.write_json(".error.json", {"error": str(exc), "data": dump})
        run.close()
        raise
    run.write_table(table)
    run.close()
    return 0


def cmd_rational(args) -> int:
    stem = args.out or f"{args.quantity}_rational_n{args.n}"
    run = Run("rational", args, stem)
    t0 = time.perf_counter()
    if args.quantity == "R":
        if args.process == "dbs" and args.topology == "cycle":
            fn = reconstruct_rational_R(args.n)
        else:
            fn = reconstruct(StepsSystem(make_spec(args.process, args.topology, args.n))).fn
    else:
        if args.process != "dbs" or args.topology != "chain":
            raise UsageError("quantity S is defined for the DBS process on a chain")
        fn = reconstruct_rational_S(args.n)
    run.manifest.extra["seconds"] = round(time.perf_counter() - t0, 3)
    doc = {"quantity": args.quantity, "n": args.n, "process": args.process, "topology": args.topology,
           "function": rational_to_json(fn), "degrees": list(fn.degrees)}
    if args.quantity == "S":
        doc["function_q"] = rational_to_json(substitute_q(fn))
    run.write_json(".json", doc)
    run.close()
    return 0


def _load_rational(path: Path):
    doc = json.loads(path.read_text(encoding="utf-8"))
    return rational_from_json(doc.get("function", doc))


def cmd_poles(args) -> int:
    src = Path(args.input)
    if not src.exists():
        raise UsageError(f"no such file: {src}")
    stem = args.out or src.with_suffix("").name + "_poles"
    run = Run("poles", args, stem)
    run.input(src)
    rep = pole_report(_load_rational(src), precise=not args.fast)
    run.write_text(".csv", rep.to_csv())
    summary = {"count": len(rep.roots)}
    if rep.roots:
        c = rep.closest
        summary.update(min_modulus=rep.min_modulus, closest_re=c.value.real, closest_im=c.value.imag)
    run.write_json(".json", summary)
    run.close()
    return 0


def _parse_splits(text: str | None):
    if not text:
        return None
    out = []
    for part in text.split(","):
        try:
            m, mp = part.strip().strip("[]").split("/")
            out.append((int(m), int(mp)))
        except ValueError:
            raise UsageError(f"bad split {part!r}; expected m/m'") from None
    return out


def cmd_analyze(args) -> int:
    src = Path(args.coeffs)
    if not src.exists():
        raise UsageError(f"no such file: {src}")
    table = load_table(src)
    series = table.series(args.n)
    if args.order is not None:
        series = series.truncate(args.order)
    stem = args.out or f"{src.with_suffix('').name}_{args.method}"
    run = Run("analyze", args, stem)
    run.input(src)
    splits = _parse_splits(args.splits)
    if args.method == "ratio":
        rep = ratio_estimates(series, window=args.window)
    elif args.method == "pade":
        rep = pade_pc_estimate(series, splits)
    else:
        rep = dlog_pade(series, splits)
    run.write_json(".json", rep.to_json())
    run.write_text(".csv", rep.to_csv())
    run.close()
    return 0


def _p_grid(text: str) -> list[float]:
    if ":" in text:
        try:
            lo, hi, step = (float(x) for x in text.split(":"))
        except ValueError:
            raise UsageError("p grid must be start:stop:step or a comma list") from None
        if step <= 0:
            raise UsageError("grid step must be positive")
        count = int(round((hi - lo) / step)) + 1
        return [round(lo + i * step, 12) for i in range(count)]
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError("p grid must be start:stop:step or a comma list") from None


def cmd_mc(args) -> int:
    from .montecarlo import McConfig, mc_reach_end, mc_steps_per_vertex
    stem = args.out or f"mc_{args.observable}_n{args.n}"
    run = Run("mc", args, stem)
    lines = []
    times = {}
    for p in _p_grid(args.p):
        cfg = McConfig(p, args.trials, args.seed, step_cap=args.step_cap, dynamics=args.dynamics,
                       process=args.process, workers=args.workers)
        res = mc_reach_end(args.n, cfg) if args.observable == "reach" else mc_steps_per_vertex(args.n, cfg)
        times[str(p)] = round(res.wall_time, 3)
        lines.append(res.json_line())
        print(lines[-1], flush=True)
    run.manifest.extra["seconds_per_point"] = times
    run.write_text(".jsonl", "\n".join(lines) + "\n")
    run.close()
    return 0


def cmd_verify(args) -> int:
    from .verify import run_suite
    checks = run_suite(args.suite)
    doc = {"suite": args.suite, "passed": all(c.passed for c in checks),
           "checks": [c.to_json() for c in checks]}
    text = json.dumps(doc, indent=2)
    if args.out:
        run = Run("verify", args, args.out)
        run.write_json(".json", doc)
        run.close()
    print(text)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plupseries", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def proc(p):
        p.add_argument("--process", choices=["dbs", "cp"], default="dbs")
        p.add_argument("--topology", choices=["cycle", "chain"], default=None)

    s = sub.add_parser("series", help="exact coefficients of R, S or T for one system size")
    proc(s)
    s.add_argument("--n", type=int)
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--quantity", choices=["R", "S", "T"], default="R")
    s.add_argument("--out", help="output stem (without suffix)")
    s.set_defaults(func=cmd_series)

    s = sub.add_parser("stabilized", help="infinite-system coefficients with cross-check")
    s.add_argument("--quantity", choices=["R", "S", "S_Z", "T"], required=True)
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_stabilized)

    s = sub.add_parser("rational", help="exact rational function by reconstruction")
    proc(s)
    s.add_argument("--quantity", choices=["R", "S"], required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_rational)

    s = sub.add_parser("poles", help="poles of a rational function file")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out")
    s.add_argument("--fast", action="store_true", help="skip the extended-precision polish")
    s.set_defaults(func=cmd_poles)

    s = sub.add_parser("analyze", help="ratio, Padé or Dlog-Padé estimates from a coefficient file")
    s.add_argument("--method", choices=["ratio", "pade", "dlog"], required=True)
    s.add_argument("--coeffs", required=True)
    s.add_argument("--splits", help="comma list of m/m' (default: near-diagonal)")
    s.add_argument("--n", type=int, help="system size to take from a multi-size table")
    s.add_argument("--order", type=int, help="truncate the series first")
    s.add_argument("--window", type=int, default=5, help="ratio-method fit window")
    s.add_argument("--out")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("mc", help="Monte Carlo estimates over a p grid (JSON lines)")
    s.add_argument("--observable", choices=["reach", "steps"], required=True)
    s.add_argument("--process", choices=["dbs", "cp"], default="dbs")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--p", required=True, help="start:stop:step or comma list")
    s.add_argument("--trials", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int)
    s.add_argument("--step-cap", type=int, default=10**9)
    s.add_argument("--dynamics", choices=["active-sampling", "random-sampling"], default="active-sampling")
    s.add_argument("--out")
    s.set_defaults(func=cmd_mc)

    s = sub.add_parser("verify", help="run a check suite and print a pass/fail report")
    s.add_argument("suite", choices=["golden", "lemmas", "oracle"])
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "topology", "unset") is None:
        args.topology = "chain" if getattr(args, "quantity", "R") in ("S", "T") else "cycle"
    try:
        return args.func(args)
    except PlupError as exc:
        hint = ""
        if exc.exit_code == 3:
            hint = " (lower --n/--order or raise PLUPSERIES_MAX_STATES)"
        print(f"plupseries: {type(exc).__name__}: {exc}{hint}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
