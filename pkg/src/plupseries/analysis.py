"""Series analysis: ratio method, Padé pole estimates and Dlog-Padé exponents."""

from __future__ import annotations

import csv
import io
import json
import statistics
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateApproximantError, NoEstimateError, RootConvergenceError, UsageError
from .exact import PadeApprox, TruncSeries, pade, poly_roots

FROISSART_DISTANCE = 1e-3
REAL_TOL = 1e-8


@dataclass
class EstimateReport:
    method: str                                   # ratio | pade | dlog-pade
    estimates: list = field(default_factory=list)  # (label, value)
    headline: float = float("nan")
    spread: float = float("nan")
    exponents: list = field(default_factory=list)  # (label, beta), dlog-pade only
    headline_exponent: float | None = None
    exponent_spread: float | None = None
    excluded: list = field(default_factory=list)   # (label, reason)
    flags: list = field(default_factory=list)

    @property
    def reliable(self) -> bool:
        return "unreliable" not in self.flags

    def to_json(self) -> dict:
        doc = {"method": self.method, "headline": self.headline, "spread": self.spread,
               "estimates": [{"label": lab, "value": v} for lab, v in self.estimates],
               "excluded": [{"label": lab, "reason": r} for lab, r in self.excluded],
               "flags": list(self.flags)}
        if self.method == "dlog-pade":
            doc["exponents"] = [{"label": lab, "value": v} for lab, v in self.exponents]
            doc["headline_exponent"] = self.headline_exponent
            doc["exponent_spread"] = self.exponent_spread
        return doc

    @classmethod
    def from_json(cls, doc: dict | str) -> "EstimateReport":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(doc["method"], [(e["label"], e["value"]) for e in doc["estimates"]],
                   doc["headline"], doc["spread"],
                   [(e["label"], e["value"]) for e in doc.get("exponents", [])],
                   doc.get("headline_exponent"), doc.get("exponent_spread"),
                   [(e["label"], e["reason"]) for e in doc.get("excluded", [])], list(doc.get("flags", [])))

    def to_csv(self) -> str:
        """One row per order/split: label, coefficients used, estimate (and exponent)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        dlog = self.method == "dlog-pade"
        w.writerow(["label", "coefficients", "estimate"] + (["exponent"] if dlog else []))
        betas = dict(self.exponents)
        for lab, v in self.estimates:
            row = [lab, _coefficients_used(self.method, lab), repr(v)]
            if dlog:
                row.append(repr(betas.get(lab)))
            w.writerow(row)
        return buf.getvalue()


def _coefficients_used(method: str, label: str) -> int:
    if method == "ratio":
        return int(label) + 1
    m, mp = (int(x) for x in label.strip("[]").split("/"))
    # dlog-pade consumes one extra coefficient through the derivative
    return m + mp + (2 if method == "dlog-pade" else 1)


def _floats(coeffs) -> list[float]:
    if isinstance(coeffs, TruncSeries):
        return coeffs.to_floats()
    return [float(c) for c in coeffs]


# ---------------------------------------------------------------------------
# ratio method


def ratio_estimates(coeffs, window: int = 5) -> EstimateReport:
    """Ratios r_k = a_{k-1}/a_k, extrapolated linearly in 1/k.

    Each per-order estimate is the 1/k -> 0 intercept of a least-squares
    line through the last ``window`` usable ratios up to that order; the
    headline is the estimate at the highest order.
    """
    a = _floats(coeffs)
    ratios = []
    rep = EstimateReport("ratio")
    for k in range(1, len(a)):
        if a[k] == 0 or a[k - 1] == 0:
            if any(a[:k]):
                rep.excluded.append((str(k), "zero coefficient"))
                warnings.warn(f"zero coefficient near k={k}; ratio skipped", stacklevel=2)
            continue
        ratios.append((k, a[k - 1] / a[k]))
    if len(ratios) < 3:
        raise NoEstimateError("ratio method needs at least 3 usable ratios")
    for i in range(2, len(ratios)):
        win = ratios[max(0, i + 1 - window): i + 1]
        x = np.array([1.0 / k for k, _ in win])
        y = np.array([r for _, r in win])
        slope, icpt = np.polyfit(x, y, 1)
        rep.estimates.append((str(win[-1][0]), float(icpt)))
    last = [r for _, r in ratios[-window:]]
    if any(r < 0 for r in last):
        rep.flags.append("unreliable")
        rep.flags.append("alternating signs: dominant singularity off the positive axis")
    rep.headline = rep.estimates[-1][1]
    tail = [v for _, v in rep.estimates[-window:]]
    rep.spread = max(tail) - min(tail)
    return rep


# ---------------------------------------------------------------------------
# Padé


def near_diagonal_splits(order: int, min_total: int | None = None, max_offset: int = 1) -> list[tuple]:
    """(m, m') with m + m' between ``min_total`` and ``order`` and |m - m'| <= max_offset."""
    lo = max(2, order - 3) if min_total is None else min_total
    out = []
    for total in range(lo, order + 1):
        for mp in range(1, total + 1):
            m = total - mp
            if abs(m - mp) <= max_offset:
                out.append((m, mp))
    return out


def _label(m: int, mp: int) -> str:
    return f"[{m}/{mp}]"


def _positive_real_pole(approx: PadeApprox):
    """(pole, numerator roots) or a reason string when the split is defective."""
    if approx.den.degree < 1:
        return "no pole"
    try:
        poles = poly_roots(approx.den)
    except RootConvergenceError:
        return "root finder did not converge"
    cands = sorted(r.value.real for r in poles
                   if abs(r.value.imag) <= REAL_TOL * max(1.0, abs(r.value)) and r.value.real > 0)
    if not cands:
        return "no positive real pole"
    zeros = []
    if approx.num.degree >= 1:
        try:
            zeros = [r.value for r in poly_roots(approx.num)]
        except RootConvergenceError:
            return "root finder did not converge"
    return cands, zeros


def _pole_estimate(approx: PadeApprox):
    res = _positive_real_pole(approx)
    if isinstance(res, str):
        return res
    cands, zeros = res
    for pole in cands:
        if any(abs(z - pole) < FROISSART_DISTANCE for z in zeros):
            continue          # pole-zero doublet
        return pole
    return "Froissart doublet"


def _pade_reducing(coeffs: TruncSeries, m: int, mp: int):
    """Padé [m/mp], lowering mp while the system is singular. Returns (approx, mp used) or None."""
    while mp >= 1:
        try:
            return pade(coeffs, m, mp), mp
        except DegenerateApproximantError:
            mp -= 1
    return None


def pade_pc_estimate(coeffs: TruncSeries, splits=None) -> EstimateReport:
    """Smallest positive real pole of each [m/m'] approximant; headline = median."""
    if not isinstance(coeffs, TruncSeries):
        coeffs = TruncSeries(coeffs)
    splits = near_diagonal_splits(coeffs.order) if splits is None else list(splits)
    rep = EstimateReport("pade")
    seen: set = set()
    for m, mp in splits:
        if m + mp > coeffs.order:
            raise UsageError(f"split [{m}/{mp}] needs order {m + mp}")
        got = _pade_reducing(coeffs, m, mp)
        if got is None:
            rep.excluded.append((_label(m, mp), "degenerate for every denominator degree"))
            continue
        approx, used = got
        lab = _label(m, used)
        if lab in seen:
            continue
        seen.add(lab)
        est = _pole_estimate(approx)
        if isinstance(est, str):
            rep.excluded.append((lab, est))
        else:
            rep.estimates.append((lab, float(est)))
    if not rep.estimates:
        raise NoEstimateError("every Padé split is defective")
    vals = [v for _, v in rep.estimates]
    rep.headline = statistics.median(vals)
    rep.spread = max(vals) - min(vals)
    return rep


# ---------------------------------------------------------------------------
# Dlog-Padé


def log_derivative(coeffs: TruncSeries) -> TruncSeries:
    """S'/S through order K - 1, exact."""
    if coeffs.order < 1:
        raise UsageError("need order >= 1")
    if coeffs[0] == 0:
        raise UsageError("log-derivative needs a nonzero constant term")
    return coeffs.derivative() / coeffs.truncate(coeffs.order - 1)


def dlog_pade(coeffs: TruncSeries, splits=None) -> EstimateReport:
    """Critical point and exponent from Padé approximants of S'/S.

    For S ~ (x_c - x)^beta the log-derivative behaves like beta / (x - x_c),
    so the residue at the pole is beta itself.
    """
    if not isinstance(coeffs, TruncSeries):
        coeffs = TruncSeries(coeffs)
    rep = EstimateReport("dlog-pade")
    lead = coeffs.mindeg()
    if lead > coeffs.order:
        raise UsageError("zero series has no singularity to analyze")
    if lead > 0:
        # x^m S(x) has the same singularity and exponent as S
        coeffs = coeffs.shift_down(lead)
        rep.flags.append(f"leading factor x^{lead} divided out")
    ld = log_derivative(coeffs)
    splits = near_diagonal_splits(ld.order) if splits is None else list(splits)
    seen: set = set()
    for m, mp in splits:
        if m + mp > ld.order:
            raise UsageError(f"split [{m}/{mp}] needs order {m + mp} of the log-derivative")
        got = _pade_reducing(ld, m, mp)
        if got is None:
            rep.excluded.append((_label(m, mp), "degenerate for every denominator degree"))
            continue
        approx, used = got
        lab = _label(m, used)
        if lab in seen:
            continue
        seen.add(lab)
        est = _pole_estimate(approx)
        if isinstance(est, str):
            rep.excluded.append((lab, est))
            continue
        num = np.polynomial.Polynomial(approx.num.to_floats() or [0.0])
        dden = np.polynomial.Polynomial(approx.den.to_floats()).deriv()
        beta = float(num(est) / dden(est))
        rep.estimates.append((lab, float(est)))
        rep.exponents.append((lab, beta))
    if not rep.estimates:
        raise NoEstimateError("every Dlog-Padé split is defective")
    vals = [v for _, v in rep.estimates]
    betas = [b for _, b in rep.exponents]
    rep.headline = statistics.median(vals)
    rep.spread = max(vals) - min(vals)
    rep.headline_exponent = statistics.median(betas)
    rep.exponent_spread = max(betas) - min(betas)
    return rep
