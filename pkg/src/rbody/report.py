"""Verification reports: named checks with measured values and verdicts."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

REPORT_VERSION = 1


def _plain(value: Any) -> Any:
    """Convert numpy scalars/arrays and non-finite floats to JSON-safe values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return value


@dataclass
class Check:
    name: str
    measured: Any
    tolerance: Any
    passed: bool
    anchor: str = ""
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"name": self.name, "measured": _plain(self.measured),
               "tolerance": _plain(self.tolerance), "passed": bool(self.passed),
               "anchor": self.anchor}
        if self.detail:
            out["detail"] = _plain(self.detail)
        return out


@dataclass
class VerificationReport:
    title: str
    checks: list[Check] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, measured, tolerance, passed: bool, anchor: str = "", **detail) -> Check:
        c = Check(name, measured, tolerance, bool(passed), anchor, detail)
        self.checks.append(c)
        return c

    def extend(self, other: "VerificationReport", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.measured, c.tolerance, c.passed,
                                     c.anchor, dict(c.detail)))

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {
            "report_version": REPORT_VERSION,
            "title": self.title,
            "overall": "pass" if self.passed else "fail",
            "metadata": _plain(self.metadata),
            "checks": [c.to_json() for c in self.checks],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def to_csv(self, delimiter: str = ",") -> str:
        buf = io.StringIO()
        w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
        w.writerow(["name", "measured", "tolerance", "passed", "anchor"])
        for c in self.checks:
            w.writerow([c.name, json.dumps(_plain(c.measured)), json.dumps(_plain(c.tolerance)),
                        "pass" if c.passed else "fail", c.anchor])
        return buf.getvalue()

    def summary_lines(self) -> list[str]:
        return [f"{'PASS' if c.passed else 'FAIL'}  {c.name}: measured={_plain(c.measured)} "
                f"tol={_plain(c.tolerance)}" for c in self.checks]
