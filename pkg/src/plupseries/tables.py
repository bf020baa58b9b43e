"""Coefficient tables and stabilized (infinite-system) R coefficients."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .cycle_fast import r_cycle_series
from .errors import StabilizationError, UsageError
from .exact import TruncSeries

CSV_FIELDS = ("quantity", "n", "k", "numerator", "denominator")


@dataclass
class CoeffTable:
    """Rows (n, k, coefficient) of one quantity.

    For stabilized tables ``n`` is the system size the coefficient was taken
    from and ``meta`` records the threshold and cross-check outcome.
    """

    quantity: str
    rows: list = field(default_factory=list)
    variable: str = "p"
    meta: dict = field(default_factory=dict)

    def add(self, n: int, k: int, value):
        self.rows.append((int(n), int(k), Fraction(value)))

    @classmethod
    def from_series(cls, quantity: str, n: int, series: TruncSeries, variable: str = "p", **meta) -> "CoeffTable":
        t = cls(quantity, variable=variable, meta=dict(meta))
        for k, c in enumerate(series):
            t.add(n, k, c)
        return t

    def sizes(self) -> list:
        return sorted({n for n, _, _ in self.rows})

    def value(self, n: int, k: int) -> Fraction:
        for nn, kk, v in self.rows:
            if nn == n and kk == k:
                return v
        raise KeyError((n, k))

    def series(self, n: int | None = None) -> TruncSeries:
        """Coefficients of one size, or (n=None) one coefficient per k as in a stabilized table."""
        rows = [(k, v) for nn, k, v in self.rows if n is None or nn == n]
        by_k = {}
        for k, v in rows:
            if k in by_k and by_k[k] != v:
                raise UsageError(f"table holds conflicting values for k={k}; pass n")
            by_k[k] = v
        if not by_k or sorted(by_k) != list(range(max(by_k) + 1)):
            raise UsageError("coefficients do not form a contiguous range from k=0")
        return TruncSeries([by_k[k] for k in range(len(by_k))])

    # serialization ----------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for n, k, v in self.rows:
            w.writerow((self.quantity, n, k, v.numerator, v.denominator))
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CoeffTable":
        reader = csv.DictReader(io.StringIO(text))
        if tuple(reader.fieldnames or ()) != CSV_FIELDS:
            raise UsageError(f"expected CSV columns {','.join(CSV_FIELDS)}")
        table = None
        for row in reader:
            if table is None:
                q = row["quantity"]
                table = cls(q, variable="q" if q.startswith("S") else "p")
            elif row["quantity"] != table.quantity:
                raise UsageError("mixed quantities in one table")
            table.add(int(row["n"]), int(row["k"]), Fraction(int(row["numerator"]), int(row["denominator"])))
        if table is None:
            raise UsageError("empty coefficient table")
        return table

    def to_json(self) -> dict:
        return {"quantity": self.quantity, "variable": self.variable, "meta": self.meta,
                "rows": [{"n": n, "k": k, "value": str(v)} for n, k, v in self.rows]}

    @classmethod
    def from_json(cls, doc: dict | str) -> "CoeffTable":
        if isinstance(doc, str):
            doc = json.loads(doc)
        t = cls(doc["quantity"], variable=doc.get("variable", "p"), meta=doc.get("meta", {}))
        for r in doc["rows"]:
            t.add(r["n"], r["k"], Fraction(r["value"]))
        return t

    def __eq__(self, other):
        if not isinstance(other, CoeffTable):
            return NotImplemented
        return (self.quantity, self.variable, self.rows) == (other.quantity, other.variable, other.rows)

    def write(self, stem: str | Path) -> list[Path]:
        stem = Path(stem)
        csv_path = stem.with_suffix(".csv")
        json_path = stem.with_suffix(".json")
        csv_path.write_text(self.to_csv(), encoding="utf-8")
        json_path.write_text(json.dumps(self.to_json(), indent=2) + "\n", encoding="utf-8")
        return [csv_path, json_path]


def load_table(path: str | Path) -> CoeffTable:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        return CoeffTable.from_json(text)
    return CoeffTable.from_csv(text)


def r_table(sizes, order: int) -> CoeffTable:
    t = CoeffTable("R")
    for n in sizes:
        for k, c in enumerate(r_cycle_series(n, order)):
            t.add(n, k, c)
    return t


def stabilized_coeffs_R(order: int) -> CoeffTable:
    """a_k of the infinite cycle, taken from cycle(k+1) and cross-checked on cycle(k+2).

    a_0..a_2 come from cycle(3).
    """
    if order < 2:
        raise UsageError("stabilized R table needs order >= 2")
    # one run per size n covers both a_{n-1}^(n) and the cross-check a_{n-2}^(n)
    runs = {n: r_cycle_series(n, min(n - 1, order)) for n in range(3, order + 3)}
    table = CoeffTable("R", meta={"threshold": "n = k + 1", "cross_check": "n = k + 2"})
    for k in range(order + 1):
        src = max(3, k + 1)
        val = runs[src][k]
        check = runs[src + 1][k]
        if val != check:
            raise StabilizationError(f"a_{k} differs between cycle({src}) and cycle({src + 1})",
                                     k=k, values=(val, check))
        table.add(src, k, val)
    table.meta["cross_check_status"] = "passed"
    return table
