"""Experiment reports and their CSV form.

CSV layout: one header row, one row per trial, then aggregate rows of the
form ``#agg,<name>,<value>``. Floats are written with 6 significant digits.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Any


def fmt(value: Any) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def binomial_sigma(p: float, trials: int) -> float:
    if trials <= 0:
        return 0.0
    return math.sqrt(max(p * (1 - p), 0.0) / trials)


@dataclass
class ExperimentReport:
    name: str
    params: dict = field(default_factory=dict)
    columns: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    aggregates: dict = field(default_factory=dict)

    def add_row(self, **row):
        if not self.columns:
            self.columns = list(row)
        self.rows.append(row)

    def column(self, name: str) -> list:
        return [r[name] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([fmt(row[c]) for c in self.columns])
        for key, value in self.params.items():
            w.writerow(["#agg", f"param.{key}", fmt(value)])
        for key, value in self.aggregates.items():
            w.writerow(["#agg", key, fmt(value)])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def read_csv(text: str) -> tuple[list[dict], dict]:
    """Parse a report CSV back into ``(rows, aggregates)`` (values as strings)."""
    rows, aggs = [], {}
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    for rec in reader:
        if rec and rec[0] == "#agg":
            aggs[rec[1]] = rec[2]
        elif rec:
            rows.append(dict(zip(header, rec)))
    return rows, aggs
