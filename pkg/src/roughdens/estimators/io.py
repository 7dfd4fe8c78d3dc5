"""JSON / CSV records for estimates, fits and scaling sweeps."""

from __future__ import annotations

import csv
import json

from ..errors import ParameterError
from .montecarlo import EstimateWithError
from .scaling import ScalingFit

__all__ = ["estimate_to_json", "fit_to_json", "write_sweep_csv", "read_sweep_csv"]


def estimate_to_json(est: EstimateWithError) -> str:
    return json.dumps(est.to_dict(), sort_keys=True)


def fit_to_json(fit: ScalingFit) -> str:
    record = {"slope": fit.slope, "intercept": fit.intercept, "ci": list(fit.ci),
              "ci_halfwidth": fit.ci_halfwidth, "n_points": fit.n_points,
              "residual_rms": fit.residual_rms, "points": [list(p) for p in fit.points]}
    return json.dumps(record, sort_keys=True)


def write_sweep_csv(pairs, path) -> None:
    """Rows ``scale,value,stderr`` with ``repr``-exact floats."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scale", "value", "stderr"])
        for scale, est in pairs:
            if isinstance(est, EstimateWithError):
                w.writerow([repr(float(scale)), repr(float(est.value)), repr(float(est.stderr))])
            else:
                w.writerow([repr(float(scale)), repr(float(est)), repr(0.0)])


def read_sweep_csv(path) -> list:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0][:3]] != ["scale", "value", "stderr"]:
        raise ParameterError(f"{path}: expected header scale,value,stderr")
    out = []
    for row in rows[1:]:
        if not row:
            continue
        out.append((float(row[0]), EstimateWithError(float(row[1]), float(row[2]), 0)))
    return out
