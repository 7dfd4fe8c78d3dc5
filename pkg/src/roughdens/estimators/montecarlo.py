"""Monte Carlo difference functionals and the approximation / probabilistic split."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from ..auxiliary import CoupledEnsemble
from ..besov import DifferenceProbe, binomial_weights
from ..errors import EstimationError, ParameterError
from ..models.core import ModelSpec

__all__ = [
    "MIN_BATCHES",
    "EstimateWithError",
    "batch_means",
    "difference_values",
    "mc_weighted_difference",
    "ae_pe_split",
    "coupling_error_moments",
    "cutoff_weight",
    "inverse_sigma_weight",
]

MIN_BATCHES = 16
DEFAULT_BATCHES = 32


@dataclass(frozen=True)
class EstimateWithError:
    value: float
    stderr: float
    n: int

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, record: dict) -> "EstimateWithError":
        return cls(float(record["value"]), float(record["stderr"]), int(record["n"]))


def batch_means(samples, n_batches: int = DEFAULT_BATCHES) -> EstimateWithError:
    """Sample mean with a batch-means standard error.

    The samples are cut into ``n_batches`` contiguous batches (sizes differ
    by at most one).  With fewer samples than batches every sample is its own
    batch.
    """
    x = np.asarray(samples, dtype=float).reshape(-1)
    n = x.size
    if n == 0:
        raise EstimationError("no samples")
    if n_batches < MIN_BATCHES:
        raise ParameterError(f"need at least {MIN_BATCHES} batches")
    if not np.isfinite(x).all():
        raise EstimationError("non-finite sample values")
    value = float(np.mean(x))
    nb = min(n_batches, n)
    if nb < 2:
        return EstimateWithError(value, 0.0, n)
    means = np.array([b.mean() for b in np.array_split(x, nb)])
    stderr = float(np.std(means, ddof=1) / math.sqrt(nb))
    return EstimateWithError(value, stderr, n)


def _as_points(endpoints) -> np.ndarray:
    x = np.asarray(endpoints, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ParameterError("endpoints must be an (n, d) matrix")
    return x


def _check_h(h, d: int) -> np.ndarray:
    h = np.atleast_1d(np.asarray(h, dtype=float))
    if h.size != d:
        raise ParameterError(f"h has length {h.size}, state dimension is {d}")
    if np.linalg.norm(h) > 1.0 + 1e-12:
        raise ParameterError("|h| must be <= 1")
    return h


def difference_values(x, phi: Callable, m: int, h) -> np.ndarray:
    """Per-path ``Delta_h^m phi(x_i)``; ``phi`` maps ``(n, d)`` points to ``(n,)``."""
    x = _as_points(x)
    h = _check_h(h, x.shape[1])
    if m < 1:
        raise ParameterError("m must be >= 1")
    w = binomial_weights(m)
    out = np.zeros(x.shape[0])
    # non-finite values are reported below, not warned about
    with np.errstate(invalid="ignore", over="ignore"):
        for j in range(m + 1):
            out = out + w[j] * np.asarray(phi(x + j * h), dtype=float)
    if not np.isfinite(out).all():
        raise EstimationError("test function returned non-finite values")
    return out


def _weights(weight, x) -> Optional[np.ndarray]:
    if weight is None or (isinstance(weight, str) and weight == "unit"):
        return None
    if callable(weight):
        w = np.asarray(weight(x), dtype=float)
    else:
        w = np.asarray(weight, dtype=float)
    w = np.broadcast_to(w.reshape(-1) if w.ndim else w, (x.shape[0],))
    if not np.isfinite(w).all():
        raise EstimationError("weight returned non-finite values")
    return w


def mc_weighted_difference(endpoints, probe: DifferenceProbe, h,
                           weight: Union[None, str, Callable, np.ndarray] = None) -> EstimateWithError:
    """Estimate ``E[Delta_h^m phi(X) w(X)]``.

    ``weight`` is ``None``/``"unit"``, a callable on the ``(n, d)`` sample
    matrix, or a per-path array (for weights that depend on other variables,
    such as the checkpoint).
    """
    x = _as_points(endpoints)
    vals = difference_values(x, probe.phi, probe.m, h)
    w = _weights(weight, x)
    if w is not None:
        vals = vals * w
    return batch_means(vals)


def ae_pe_split(coupled: CoupledEnsemble, probe: DifferenceProbe, h,
                weight=None) -> tuple:
    """``(Ae, Pe)`` with Ae from the pathwise difference of the coupled pair.

    An optional per-path ``weight`` multiplies both terms (weighted functionals).
    """
    dx = difference_values(coupled.x_end, probe.phi, probe.m, h)
    dy = difference_values(coupled.y_end, probe.phi, probe.m, h)
    if weight is not None:
        w = _weights(weight, _as_points(coupled.checkpoint))
        dx, dy = dx * w, dy * w
    return batch_means(dx - dy), batch_means(dy)


def coupling_error_moments(coupled: CoupledEnsemble, powers: Sequence[float],
                           component: Optional[int] = None) -> list:
    """``E|X_t - Y_t|^r`` for each ``r`` (Euclidean norm, or one coordinate)."""
    powers = [float(r) for r in powers]
    if any(not r > 0 for r in powers):
        raise ParameterError("powers must be positive")
    if coupled.alpha_stable is not None:
        bad = [r for r in powers if r >= coupled.alpha_stable]
        if bad:
            raise ParameterError(
                f"moments of order {bad} are infinite under an alpha={coupled.alpha_stable} stable driver"
            )
    diff = np.asarray(coupled.x_end) - np.asarray(coupled.y_end)
    if component is None:
        dist = np.linalg.norm(diff, axis=1)
    else:
        dist = np.abs(diff[:, component])
    return [batch_means(dist**r) for r in powers]


def _smooth_step(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1."""
    u = np.clip(u, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
        b = np.where(u < 1, np.exp(-1.0 / np.where(u < 1, 1.0 - u, 1.0)), 0.0)
    return a / (a + b)


def cutoff_weight(radius: float) -> Callable:
    """Smooth cutoff ``eta_R``: 1 on ``|x| <= R``, 0 on ``|x| >= R + 1``."""
    if not radius > 0:
        raise ParameterError("radius must be positive")

    def eta(x):
        r = np.linalg.norm(_as_points(x), axis=1)
        return 1.0 - _smooth_step(r - radius)

    return eta


def inverse_sigma_weight(model: ModelSpec, m: int, time: float = 0.0) -> Callable:
    """``x -> |sigma^{-1}(x)|^{-m}``, i.e. the m-th power of the smallest singular value of sigma."""
    if model.coefficients.path_dependent:
        raise ParameterError("needs Markovian coefficients")

    def w(x):
        x = _as_points(x)
        _, s = model.coefficients.evaluate(time, x, x.shape[0])
        # inf over unit z of |sigma z|; zero when sigma has a kernel (d' > d)
        smin = np.linalg.svd(s, compute_uv=False)[:, -1]
        if s.shape[2] > s.shape[1]:
            smin = np.zeros(x.shape[0])
        return smin**m

    return w
