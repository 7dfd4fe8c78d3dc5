"""Exponent bookkeeping: epsilon schedule, predicted regularity, feasibility windows.

Conventions.  A bound of the form

    E[Delta_h^m phi(X_t)] <= K0^(alpha/theta) (eps^(alpha (1 + a0) / theta) + (|h| / eps^(1/theta))^m)

is summarized by ``(theta, a0)``.  Given the rate ``r`` of the approximation
error per unit of the test-function exponent (``Ae ~ eps^(alpha r)``) and the
time exponent ``s`` of the probabilistic estimate per difference order
(``Pe ~ eps^(-m s) |h|^m``), :func:`bulk_parameters_from_rates` returns
``theta = 1 / s`` and ``a0 = theta r - 1``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from ..errors import InfeasibleError, ParameterError

__all__ = [
    "ExponentParams",
    "RegularityPrediction",
    "LevyFeasibility",
    "bulk_parameters_from_rates",
    "epsilon_schedule",
    "predicted_regularity",
    "rough_drift_exponent",
    "levy_kappa",
    "levy_feasibility",
]


@dataclass(frozen=True)
class ExponentParams:
    alpha: float
    m: int
    theta: float
    a0: float
    K0: float = 1.0
    delta: float = 0.0
    beta: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError(f"alpha must lie in (0, 1), got {self.alpha}")
        if int(self.m) != self.m or self.m < 1:
            raise ParameterError(f"m must be a positive integer, got {self.m}")
        if not self.theta > 0:
            raise ParameterError(f"theta must be positive, got {self.theta}")
        if not self.a0 > 0:
            raise ParameterError(f"a0 must be positive for the method to apply, got {self.a0}")
        if not self.K0 >= 1:
            raise ParameterError(f"K0 must be >= 1, got {self.K0}")
        if not self.delta >= 0:
            raise ParameterError(f"delta must be non-negative, got {self.delta}")

    @property
    def delta1(self) -> float:
        return 2.0 * self.theta * self.a0 * self.delta / (2.0 + self.a0)

    @property
    def delta2(self) -> float:
        return self.delta1 / (2.0 * self.alpha * (1.0 + self.a0))

    @classmethod
    def for_target(cls, a: float, theta: float, a0: float, delta: float, K0: float = 1.0,
                   beta: Optional[float] = None) -> "ExponentParams":
        """Parameters chosen as in the regularity argument for a target ``a < a0``:
        ``alpha = (a + delta1) / a0`` and ``m`` the smallest integer with
        ``m / (m + alpha (1 + a0)) >= 1 - delta2``."""
        if not 0 < a < a0:
            raise ParameterError(f"need 0 < a < a0, got a={a}, a0={a0}")
        if not delta > 0:
            raise ParameterError("delta must be positive to pick a finite m")
        delta1 = 2.0 * theta * a0 * delta / (2.0 + a0)
        if not delta1 < a0 - a:
            raise ParameterError("delta too large: need delta1 < a0 - a")
        alpha = (a + delta1) / a0
        delta2 = delta1 / (2.0 * alpha * (1.0 + a0))
        c = alpha * (1.0 + a0)
        m = max(1, math.ceil(c * (1.0 - delta2) / delta2 - 1e-12))
        return cls(alpha, m, theta, a0, K0, delta, beta)


def bulk_parameters_from_rates(ae_rate: float, pe_time_exponent: float) -> tuple:
    """``(theta, a0)`` from ``Ae ~ eps^(alpha ae_rate)`` and ``Pe ~ eps^(-m pe_time_exponent)``."""
    if not pe_time_exponent > 0 or not ae_rate > 0:
        raise ParameterError("rates must be positive")
    theta = 1.0 / pe_time_exponent
    return theta, theta * ae_rate - 1.0


def epsilon_schedule(h_norm: float, t: float, params: ExponentParams) -> float:
    """``eps = |h|^(theta (1 - delta2)) / 2`` if that power is below ``t``, else ``t / 2``."""
    if not 0.0 < h_norm <= 1.0:
        raise ParameterError(f"h_norm must lie in (0, 1], got {h_norm}")
    if not t > 0:
        raise ParameterError(f"t must be positive, got {t}")
    if not isinstance(params, ExponentParams):
        raise ParameterError("params must be ExponentParams")
    power = h_norm ** (params.theta * (1.0 - params.delta2))
    if power < t:
        return 0.5 * power
    return 0.5 * t


@dataclass(frozen=True)
class RegularityPrediction:
    h_exponent: float
    a_max: float
    time_exponent: float
    k0_exponent: float
    a: float
    prefactor: float

    def to_dict(self) -> dict:
        return asdict(self)


def predicted_regularity(params: ExponentParams, t: float, a: Optional[float] = None) -> RegularityPrediction:
    """Exponents of the density bound ``K0^(k0_exponent) (1 ^ t)^(-time_exponent)`` in ``B^a_{1,inf}``.

    ``h_exponent = alpha m (1 + a0) / (m + alpha (1 + a0))`` is the |h| rate
    of the difference functional after optimizing eps; ``a_max = a0`` is the
    (open) supremum of admissible ``a``.  Without ``a``, the target implied by
    ``alpha`` is used: ``a = alpha a0 - delta1``.
    """
    if not t > 0:
        raise ParameterError(f"t must be positive, got {t}")
    p = params
    if a is None:
        a = p.alpha * p.a0 - p.delta1
    if not a < p.a0:
        raise ParameterError(f"a must be < a0 = {p.a0}, got {a}")
    if not a > 0:
        raise ParameterError(f"a must be positive, got {a}")
    c = p.alpha * (1.0 + p.a0)
    h_exp = p.m * c / (p.m + c)
    time_exp = (1.0 + p.a0) / (p.theta * p.a0) * a + p.delta
    k0_exp = a / (p.theta * p.a0) + p.delta
    prefactor = p.K0**k0_exp * min(1.0, t) ** (-time_exp)
    return RegularityPrediction(h_exp, p.a0, time_exp, k0_exp, float(a), prefactor)


def _conjugate(q: float) -> float:
    return math.inf if q == 1 else (1.0 if q == math.inf else q / (q - 1.0))


def rough_drift_exponent(p: float, q: float, d: int, gamma: float) -> float:
    """Lower bound ``(1 - 1/q) / (1 - 2/q - d/p) * gamma`` on the time-singularity exponent."""
    if not (p > 1 and q > 1 and d >= 1):
        raise ParameterError("need p > 1, q > 1, d >= 1")
    if gamma < 0:
        raise ParameterError("gamma must be non-negative")
    slack = 1.0 - 2.0 / q - d / p
    if not slack > 0:
        raise InfeasibleError(f"2/q + d/p = {2.0 / q + d / p:.6g} >= 1")
    if not gamma < 1.0 - 2.0 / q:
        raise ParameterError(f"gamma must be < 1 - 2/q = {1.0 - 2.0 / q:.6g}")
    return (1.0 - 1.0 / q) / slack * gamma


def levy_kappa(alpha_stable: float, beta: float, q: float, e: float,
               sigma_constant: bool = False) -> float:
    inv_qc = 1.0 / _conjugate(q)
    if sigma_constant:
        return inv_qc
    return min(inv_qc, (1.0 + beta) / alpha_stable,
               1.0 / alpha_stable + beta * inv_qc - 0.5 * beta * e)


@dataclass(frozen=True)
class LevyFeasibility:
    kappa: float
    e_window: Optional[tuple]
    feasible: bool
    method: str

    def to_dict(self) -> dict:
        out = asdict(self)
        out["e_window"] = None if self.e_window is None else list(self.e_window)
        return out


def _levy_ok(e, alpha, beta, p, q, d, sigma_constant):
    qc = _conjugate(q)
    kappa = levy_kappa(alpha, beta, q, e, sigma_constant)
    slack = alpha * kappa - 1.0
    if not (e * qc < 1 and slack > 0 and d / p < slack):
        return False
    return e > kappa * d / (p * slack - d)


def _bisect(f, lo, hi, iters=200):
    """Boundary of a predicate with ``f(lo) != f(hi)``."""
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if f(mid) == flo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def levy_feasibility(alpha_stable: float, beta: float, p: float, q: float, d: int,
                     sigma_constant: bool = False, method: str = "auto",
                     n_scan: int = 4001) -> LevyFeasibility:
    """Admissible window for ``e`` in the stable-driver rough-drift regularity statement.

    Conditions: ``e q' < 1``, ``alpha kappa > 1``, ``d/p < alpha kappa - 1`` and
    ``e > kappa d / (p (alpha kappa - 1) - d)`` with
    ``kappa = min(1/q', (1 + beta)/alpha, 1/alpha + beta/q' - beta e / 2)``
    (``kappa = 1/q'`` for constant sigma).  ``method="auto"`` uses the closed
    forms when one of the two sufficient regimes applies and scans ``e`` with
    bisection refinement otherwise; ``method="bisection"`` always scans.
    """
    if not alpha_stable > 1 or not alpha_stable <= 2:
        raise ParameterError(f"alpha_stable must lie in (1, 2], got {alpha_stable}")
    if not sigma_constant and not 0.0 < beta < 1.0:
        raise ParameterError(f"beta must lie in (0, 1), got {beta}")
    if not (p > 1 and q > 1 and d >= 1):
        raise ParameterError("need p > 1, q > 1, d >= 1")
    if method not in ("auto", "bisection"):
        raise ParameterError(f"unknown method {method!r}")
    a = alpha_stable
    qc = _conjugate(q)
    e_max = 1.0 / qc

    if method == "auto":
        closed = None
        if sigma_constant:
            closed = "constant_sigma"
        elif (2.0 * d / p + a / q < a - 1 and q >= a / (2.0 - a)
              and (beta >= a - 1 or q <= a / (a - beta - 1))):
            closed = "large_p"
        if closed is not None:
            kappa = e_max
            slack = a * kappa - 1.0
            if closed == "constant_sigma" and not (slack > 0 and d / p < slack):
                return LevyFeasibility(kappa, None, False, closed)
            lo = kappa * d / (p * slack - d)
            if not lo < e_max:
                return LevyFeasibility(kappa, None, False, closed)
            return LevyFeasibility(kappa, (lo, e_max), True, closed)

    def ok(e):
        return _levy_ok(e, a, beta, p, q, d, sigma_constant)

    grid = np.linspace(0.0, e_max, n_scan)
    flags = [ok(float(e)) for e in grid]
    if not any(flags):
        kappa = levy_kappa(a, beta, q, 0.0, sigma_constant)
        return LevyFeasibility(kappa, None, False, "bisection")
    i0 = flags.index(True)
    i1 = i0
    while i1 + 1 < len(flags) and flags[i1 + 1]:
        i1 += 1
    lo = float(grid[i0]) if i0 == 0 else _bisect(ok, float(grid[i0 - 1]), float(grid[i0]))[1]
    hi = e_max if i1 == len(flags) - 1 else _bisect(ok, float(grid[i1]), float(grid[i1 + 1]))[0]
    kappa = levy_kappa(a, beta, q, lo, sigma_constant)
    return LevyFeasibility(kappa, (lo, hi), True, "bisection")
