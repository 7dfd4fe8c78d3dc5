"""Log-log power-law fits with a noise-floor filter."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from ..errors import InsufficientDataError, ParameterError
from .montecarlo import EstimateWithError

__all__ = ["NOISE_FLOOR", "ScalingFit", "fit_scaling"]

NOISE_FLOOR = 3.0


@dataclass(frozen=True)
class ScalingFit:
    """``log value = intercept + slope * log scale`` with a 95% interval on the slope."""

    slope: float
    intercept: float
    ci_halfwidth: float
    n_points: int
    residual_rms: float
    points: tuple = field(default=(), compare=False)

    @property
    def ci(self) -> tuple:
        return (self.slope - self.ci_halfwidth, self.slope + self.ci_halfwidth)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["ci"] = list(self.ci)
        out["points"] = [list(p) for p in self.points]
        return out


def _coerce(pair):
    scale, est = pair
    if isinstance(est, EstimateWithError):
        return float(scale), est.value, est.stderr
    return float(scale), float(est), 0.0


def fit_scaling(pairs: Sequence, noise_floor: float = NOISE_FLOOR) -> ScalingFit:
    """Weighted least squares of ``log value`` on ``log scale``.

    Points with ``value <= noise_floor * stderr`` (or non-positive values) are
    dropped.  Weights are ``(value / stderr)**2``, the inverse variance of
    ``log value`` by the delta method; if any kept point has zero stderr the
    fit is unweighted.  The slope variance is ``(X^T W X)^{-1}`` scaled by the
    reduced chi-square when that exceeds one, and the half-width uses the
    Student quantile with ``n - 2`` degrees of freedom.
    """
    rows = [_coerce(p) for p in pairs]
    if any(not s > 0 for s, _, _ in rows):
        raise ParameterError("scales must be positive")
    kept = [(s, v, e) for s, v, e in rows if v > 0 and v > noise_floor * e]
    if len(kept) < 3:
        raise InsufficientDataError(
            f"{len(kept)} usable points after the noise-floor filter (need >= 3)"
        )
    s, v, e = (np.array(c) for c in zip(*kept))
    xs, ys = np.log(s), np.log(v)
    n = xs.size
    weighted = bool(np.all(e > 0))
    w = (v / e) ** 2 if weighted else np.ones(n)
    design = np.column_stack([np.ones(n), xs])
    xtw = design.T * w
    cov = np.linalg.inv(xtw @ design)
    beta = cov @ (xtw @ ys)
    resid = ys - design @ beta
    dof = n - 2
    chi2 = float(np.sum(w * resid**2))
    if weighted:
        scale = max(1.0, chi2 / dof) if dof > 0 else 1.0
    else:
        scale = chi2 / dof if dof > 0 else 0.0
    var_slope = cov[1, 1] * scale
    quant = stats.t.ppf(0.975, dof) if dof > 0 else math.inf
    half = float(quant * math.sqrt(var_slope)) if var_slope > 0 else 0.0
    return ScalingFit(
        slope=float(beta[1]),
        intercept=float(beta[0]),
        ci_halfwidth=half,
        n_points=int(n),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        points=tuple((float(a), float(b), float(c)) for a, b, c in kept),
    )
