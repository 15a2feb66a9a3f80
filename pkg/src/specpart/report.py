"""Evaluation records for inequalities and their delimited-text form."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field


@dataclass
class BoundReport:
    """One evaluated inequality ``left <= right``; ``slack = right - left``.

    ``holds`` is decided against ``tolerance`` (slack >= -tolerance), so a
    check with a discretization allowance records it explicitly.
    """

    name: str
    left: float
    right: float
    inputs: dict = field(default_factory=dict)
    provenance: str = ""
    tolerance: float = 0.0
    notes: str = ""

    @property
    def slack(self):
        return self.right - self.left

    @property
    def holds(self):
        if math.isnan(self.left) or math.isnan(self.right):
            return False
        return self.slack >= -self.tolerance

    def row(self):
        return {
            "name": self.name,
            "left": _num(self.left),
            "right": _num(self.right),
            "slack": _num(self.slack),
            "tolerance": _num(self.tolerance),
            "holds": str(self.holds).lower(),
            "inputs": json.dumps(self.inputs, sort_keys=True, default=_jsonable),
            "provenance": self.provenance,
            "notes": self.notes,
        }


FIELDS = ["name", "left", "right", "slack", "tolerance", "holds", "inputs", "provenance", "notes"]


def _num(x):
    return f"{float(x):.12g}"


def _jsonable(x):
    if hasattr(x, "tolist"):
        return x.tolist()
    if hasattr(x, "to_dict"):
        return x.to_dict()
    return str(x)


def reports_to_csv(reports, header_lines=()):
    """Delimited text, one row per report, preceded by ``# ...`` header lines."""
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


def summary_table(reports):
    """Fixed-width human summary."""
    lines = [f"{'check':<34} {'left':>14} {'right':>14} {'slack':>12}  ok"]
    for r in reports:
        lines.append(f"{r.name:<34} {r.left:>14.6g} {r.right:>14.6g} {r.slack:>12.4g}  "
                     f"{'yes' if r.holds else 'NO'}")
    return "\n".join(lines)
