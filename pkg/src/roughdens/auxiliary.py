"""Auxiliary processes built on the window ``[t - epsilon, t]`` of a checkpointed ensemble.

Each auxiliary restarts from the checkpoint ``c = X_{t-epsilon}`` and is driven
by the same retained increments ``dZ_k`` that produced ``X_t``.  With
``W_k = sigma(c) (Z_{t_k} - Z_{t-epsilon})`` (left-point sums of the window
increments) the recursions are::

    frozen       Y_{k+1} = Y_k + sigma(c) dZ_k
    drift_frozen Y_{k+1} = Y_k + b(c) dt + sigma(c) dZ_k
    taylor       Y_{k+1} = Y_k + (b(c) + Db(c) W_k) dt + sigma(c) dZ_k
    hypo_taylor  Y1_{k+1} = Y1_k + (b1(c) + d1 b1(c) W_k) dt + sigma_1(c) dZ_k
                 Y2_{k+1} = Y2_k + (b2(c) + d1 b2(c) (Y1_k - c1)) dt
    levy_frozen  Y_{k+1} = Y_k + sigma(c) dZ_k      (stable increments)

They are evaluated with the same floating-point update as the Euler step, so
constant coefficients give ``Y_t == X_t`` bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ParameterError, StateError
from .models.core import ModelSpec, PathEnsemble, PathView

__all__ = [
    "AUX_TAGS",
    "AuxKind",
    "CoupledEnsemble",
    "build_coupled",
    "hypo_conditional_covariance",
    "taylor_conditional_variance",
    "window_brownian_pair",
]

AUX_TAGS = ("frozen", "drift_frozen", "taylor", "hypo_taylor", "levy_frozen")


@dataclass(frozen=True)
class AuxKind:
    """Auxiliary tag plus, for the Taylor kinds, the drift Jacobian
    ``jacobian(time, x) -> (n, d, d)``."""

    tag: str
    derivative_handles: Optional[Callable] = None

    def __post_init__(self):
        if self.tag not in AUX_TAGS:
            raise ParameterError(f"unknown auxiliary {self.tag!r}; known: {AUX_TAGS}")
        if self.tag in ("taylor", "hypo_taylor") and self.derivative_handles is None:
            raise ParameterError(f"auxiliary {self.tag!r} needs derivative handles")


@dataclass
class CoupledEnsemble:
    x_end: np.ndarray
    y_end: np.ndarray
    checkpoint: np.ndarray
    epsilon: float
    t: float
    aux: AuxKind
    alpha_stable: Optional[float] = None

    @property
    def n_paths(self) -> int:
        return self.x_end.shape[0]


def _check_consistent(model: ModelSpec, aux: AuxKind):
    c = model.coefficients
    if aux.tag == "levy_frozen" and not model.is_stable:
        raise ParameterError("levy_frozen needs a stable driver")
    if aux.tag != "levy_frozen" and model.is_stable:
        raise ParameterError(f"auxiliary {aux.tag!r} needs a Brownian driver; use levy_frozen")
    if aux.tag == "hypo_taylor" and (c.dim_state != 2 or c.dim_noise != 1):
        raise ParameterError("hypo_taylor needs the two-block structure (d = 2, d' = 1)")


def build_coupled(ensemble: PathEnsemble, model: ModelSpec, aux: AuxKind) -> CoupledEnsemble:
    """Pair each endpoint ``X_t`` with the auxiliary ``Y_t`` driven by the same noise."""
    if ensemble.checkpoints is None or ensemble.retained_noise is None:
        raise StateError("ensemble has no checkpoint / retained noise; use simulate_with_checkpoint")
    if not isinstance(aux, AuxKind):
        raise ParameterError("aux must be an AuxKind")
    _check_consistent(model, aux)
    coeffs = model.coefficients
    c = ensemble.checkpoints
    n = c.shape[0]
    cidx = ensemble.checkpoint_index
    t_check = float(ensemble.times[cidx])
    if coeffs.path_dependent:
        if ensemble.paths is None:
            raise StateError("path-dependent coefficients need the path history (keep_paths=True)")
        view = ensemble.paths[: cidx + 1].view()
        view.flags.writeable = False
        arg = PathView(ensemble.times[: cidx + 1], view)
    else:
        arg = c
    b, s = coeffs.evaluate(t_check, arg, n)
    jac = None
    if aux.tag in ("taylor", "hypo_taylor"):
        if coeffs.path_dependent:
            raise ParameterError("Taylor auxiliaries need Markovian coefficients")
        jac = np.broadcast_to(np.asarray(aux.derivative_handles(t_check, c), dtype=float),
                              (n, coeffs.dim_state, coeffs.dim_state))
    noise = ensemble.retained_noise
    dt = ensemble.window_dt
    y = c.copy()
    w = np.zeros((n, coeffs.dim_state))
    zero = np.zeros_like(b)
    for k in range(noise.shape[1]):
        dz = noise[:, k, :]
        if aux.tag in ("frozen", "levy_frozen"):
            a = zero
        elif aux.tag == "drift_frozen":
            a = b
        elif aux.tag == "taylor":
            a = b + np.matmul(jac, w[:, :, None])[:, :, 0]
        else:
            a = np.column_stack([
                b[:, 0] + jac[:, 0, 0] * w[:, 0],
                b[:, 1] + jac[:, 1, 0] * (y[:, 0] - c[:, 0]),
            ])
        step = np.matmul(s, dz[:, :, None])[:, :, 0]
        y = y + a * dt + step
        w = w + step
    alpha = model.driver.alpha_stable if model.is_stable else None
    return CoupledEnsemble(ensemble.endpoints, y, c, ensemble.epsilon, ensemble.t, aux, alpha)


def hypo_conditional_covariance(epsilon: float, b1_deriv: float = 0.0,
                                b2_deriv: Optional[float] = None) -> np.ndarray:
    """Covariance of ``(B_eps + b1_deriv * C_eps, C_eps)``, ``C_eps = int_0^eps B_s ds``.

    With ``b1_deriv = 0`` this is ``[[eps, eps^2/2], [eps^2/2, eps^3/3]]``.  If
    ``b2_deriv`` is given, the second coordinate is scaled by it, giving the
    conditional covariance of the two-block Taylor auxiliary at time ``t``.
    """
    eps = float(epsilon)
    if eps < 0:
        raise ParameterError("epsilon must be non-negative")
    base = np.array([[eps, eps**2 / 2.0], [eps**2 / 2.0, eps**3 / 3.0]])
    a = 1.0 if b2_deriv is None else float(b2_deriv)
    tmat = np.array([[1.0, float(b1_deriv)], [0.0, a]])
    return tmat @ base @ tmat.T


def taylor_conditional_variance(epsilon: float, b_deriv: float) -> float:
    """``eps + b' eps^2 + b'^2 eps^3 / 3``, the conditional variance of the 1-d Taylor auxiliary."""
    return float(hypo_conditional_covariance(epsilon, b_deriv)[0, 0])


def window_brownian_pair(ensemble: PathEnsemble) -> np.ndarray:
    """Per-path ``(B_eps, int_0^eps B_s ds)`` from the retained window increments.

    The time integral is the left-point Riemann sum on the window grid, the
    same discretization the Taylor auxiliaries use.
    """
    if ensemble.retained_noise is None:
        raise StateError("ensemble has no retained noise")
    dz = ensemble.retained_noise[:, :, 0]
    partial = np.cumsum(dz, axis=1)
    left = partial - dz
    return np.column_stack([partial[:, -1], left.sum(axis=1) * ensemble.window_dt])
