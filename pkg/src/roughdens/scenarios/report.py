"""Check records, scenario reports and their byte-stable serialization."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional, Union

from ..errors import ParameterError
from ..estimators.scaling import ScalingFit

__all__ = ["CHECK_BASES", "CHECK_KINDS", "CheckRecord", "ScenarioReport", "emit_report", "load_report"]

# within: |value - predicted| <= tol; at_least: value >= predicted - tol;
# at_most: value <= predicted + tol
CHECK_KINDS = ("within", "at_least", "at_most")
# theory: predicted value is a rate or constant from the density method;
# derived: an independent closed form; structural: an exact identity
CHECK_BASES = ("theory", "derived", "structural")


@dataclass(frozen=True)
class CheckRecord:
    check_id: str
    anchor: str
    kind: str
    predicted: float
    fitted: Union[ScalingFit, float]
    tolerance: float
    basis: str = "theory"
    note: str = ""

    def __post_init__(self):
        if self.kind not in CHECK_KINDS:
            raise ParameterError(f"unknown check kind {self.kind!r}")
        if self.basis not in CHECK_BASES:
            raise ParameterError(f"unknown check basis {self.basis!r}")
        if not self.tolerance > 0:
            raise ParameterError(f"tolerance of {self.check_id} must be positive")

    @property
    def value(self) -> float:
        return self.fitted.slope if isinstance(self.fitted, ScalingFit) else float(self.fitted)

    @property
    def passed(self) -> bool:
        v, p, tol = self.value, self.predicted, self.tolerance
        if v != v:
            return False
        if self.kind == "within":
            return abs(v - p) <= tol
        if self.kind == "at_least":
            return v >= p - tol
        return v <= p + tol

    def to_dict(self) -> dict:
        fit = self.fitted.to_dict() if isinstance(self.fitted, ScalingFit) else None
        return {"check_id": self.check_id, "anchor": self.anchor, "kind": self.kind,
                "predicted": self.predicted, "value": self.value, "tolerance": self.tolerance,
                "pass": self.passed, "basis": self.basis, "fit": fit, "note": self.note}


@dataclass
class ScenarioReport:
    name: str
    checks: list
    config: dict
    wall_time: float = 0.0
    artifacts: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, check_id: str) -> CheckRecord:
        for c in self.checks:
            if c.check_id == check_id:
                return c
        raise KeyError(check_id)

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {"name": self.name, "pass": self.passed, "checks": [c.to_dict() for c in self.checks],
               "config": self.config}
        if include_timing:
            out["wall_time"] = self.wall_time
        return out

    def summary_lines(self) -> list:
        lines = []
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            lines.append(f"[{flag}] {self.name}.{c.check_id}: value={c.value:.6g} "
                         f"predicted={c.predicted:.6g} ({c.kind}, tol={c.tolerance:g})")
        return lines


_CSV_COLUMNS = ["check_id", "kind", "predicted", "value", "tolerance", "pass",
                "ci_low", "ci_high", "n_points", "basis", "anchor"]


def _csv_text(report: ScenarioReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_CSV_COLUMNS)
    for c in report.checks:
        if isinstance(c.fitted, ScalingFit):
            lo, hi = c.fitted.ci
            ci = [repr(lo), repr(hi), str(c.fitted.n_points)]
        else:
            ci = ["", "", ""]
        w.writerow([c.check_id, c.kind, repr(float(c.predicted)), repr(float(c.value)),
                    repr(float(c.tolerance)), "1" if c.passed else "0"] + ci + [c.basis, c.anchor])
    return buf.getvalue()


def emit_report(report: ScenarioReport, fmt: str, path, include_timing: bool = False) -> None:
    """Write ``report`` as ``json`` or ``csv``; identical reports give identical bytes.

    Wall-clock time is left out unless ``include_timing`` is set, since it
    would break byte stability.
    """
    if fmt == "json":
        text = json.dumps(report.to_dict(include_timing), indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        text = _csv_text(report)
    else:
        raise ParameterError(f"unknown report format {fmt!r}")
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def load_report(path) -> dict:
    """Parse a JSON or CSV report back into plain data."""
    with open(path, newline="") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return json.loads(text)
    rows = list(csv.DictReader(io.StringIO(text)))
    for r in rows:
        r["pass"] = r["pass"] == "1"
    return {"checks": rows, "pass": all(r["pass"] for r in rows)}
