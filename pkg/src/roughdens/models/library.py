"""Built-in coefficient families.

Every factory returns a :class:`ModelSpec`.  Rough coefficients are built from
lacunary Weierstrass sums, which are Hoelder of the declared exponent at every
point (a single kink only lowers the regularity at one point and gives much
faster coupling rates than the worst case).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict

import numpy as np

from ..drivers import StableDriverSpec
from ..errors import ParameterError
from .core import CoefficientSpec, ModelSpec, PathView

_GOLDEN_ANGLE = 2.399963229728653


@dataclass(frozen=True)
class Weierstrass:
    """``x -> offset + amplitude * sum_k 2**(-k * exponent) * cos(2**k x + k * golden_angle)``.

    For ``exponent`` in (0, 1) the sum is ``exponent``-Hoelder; for exponent in
    (1, 2) it is C^1 with an ``(exponent - 1)``-Hoelder derivative.
    """

    exponent: float
    amplitude: float = 1.0
    n_terms: int = 16
    offset: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.exponent < 2.0 or self.exponent == 1.0:
            raise ParameterError("exponent must lie in (0, 1) or (1, 2)")
        if self.n_terms < 1:
            raise ParameterError("n_terms must be >= 1")

    def _terms(self):
        k = np.arange(self.n_terms)
        return 2.0 ** k, 2.0 ** (-k * self.exponent), k * _GOLDEN_ANGLE

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        freq, amp, phase = self._terms()
        arg = x[..., None] * freq + phase
        return self.offset + self.amplitude * np.cos(arg) @ amp

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        freq, amp, phase = self._terms()
        arg = x[..., None] * freq + phase
        return -self.amplitude * np.sin(arg) @ (amp * freq)

    @property
    def sup_bound(self) -> float:
        return abs(self.offset) + abs(self.amplitude) * float(np.sum(self._terms()[1]))


def _const(value, shape):
    value = np.asarray(value, dtype=float)

    def f(time, x):
        n = x.current.shape[0] if isinstance(x, PathView) else np.shape(x)[0]
        return np.broadcast_to(value, (n,) + shape)

    return f


def brownian_model(dim: int = 1, sigma: float = 1.0, drift=0.0, x0=None) -> ModelSpec:
    """Constant coefficients ``b = drift``, ``sigma = sigma * I``."""
    drift = np.broadcast_to(np.asarray(drift, dtype=float), (dim,)).copy()
    coeffs = CoefficientSpec(
        drift=_const(drift, (dim,)),
        diffusion=_const(sigma * np.eye(dim), (dim, dim)),
        dim_state=dim,
        dim_noise=dim,
        drift_bound=float(np.max(np.abs(drift))),
        diffusion_bound=abs(sigma),
        nondegeneracy_floor=sigma ** (2 * dim) if sigma != 0 else None,
    )
    return ModelSpec(coeffs, "brownian", np.zeros(dim) if x0 is None else x0)


def holder_kink_model(beta: float = 0.5, x0: float = 0.0) -> ModelSpec:
    """``sigma(x) = 2 + min(1, |x|**beta)``, ``b = 0``; rough only at the origin."""

    def diffusion(time, x):
        return (2.0 + np.minimum(1.0, np.abs(x) ** beta))[:, :, None]

    coeffs = CoefficientSpec(_const(0.0, (1,)), diffusion, 1, 1, holder_beta=beta,
                             drift_bound=0.0, diffusion_bound=3.0, nondegeneracy_floor=4.0)
    return ModelSpec(coeffs, "brownian", [x0])


def weierstrass_sigma_model(beta: float = 0.5, amplitude: float = 0.25, center: float = 2.0,
                            x0: float = 0.0) -> ModelSpec:
    """``sigma = center + W_beta(x)``, ``b = 0``; Hoelder-``beta`` everywhere."""
    w = Weierstrass(beta, amplitude, offset=center)
    low = center - (w.sup_bound - center)
    if not low > 0:
        raise ParameterError("amplitude too large: sigma would not stay positive")

    def diffusion(time, x):
        return w(x)[:, :, None]

    coeffs = CoefficientSpec(_const(0.0, (1,)), diffusion, 1, 1, holder_beta=beta, drift_bound=0.0,
                             diffusion_bound=w.sup_bound, nondegeneracy_floor=low**2)
    return ModelSpec(coeffs, "brownian", [x0])


def weierstrass_drift_model(beta: float = 0.5, amplitude: float = 0.5, x0: float = 0.0) -> ModelSpec:
    """``b = W_beta(x)``, ``sigma = 1``."""
    w = Weierstrass(beta, amplitude)

    def drift(time, x):
        return w(x)

    coeffs = CoefficientSpec(drift, _const(np.eye(1), (1, 1)), 1, 1, holder_beta=beta,
                             drift_bound=w.sup_bound, diffusion_bound=1.0, nondegeneracy_floor=1.0)
    return ModelSpec(coeffs, "brownian", [x0])


def taylor_drift_model(beta: float = 0.5, amplitude: float = 0.5, x0: float = 0.0):
    """``b = W_{1+beta}(x)`` (C^{1+beta}), ``sigma = 1``.

    Returns ``(model, jacobian)`` where ``jacobian(time, x)`` has shape ``(n, 1, 1)``.
    """
    w = Weierstrass(1.0 + beta, amplitude)

    def drift(time, x):
        return w(x)

    def jacobian(time, x):
        return w.derivative(x)[:, :, None]

    coeffs = CoefficientSpec(drift, _const(np.eye(1), (1, 1)), 1, 1, holder_beta=beta,
                             drift_bound=w.sup_bound, diffusion_bound=1.0, nondegeneracy_floor=1.0)
    return ModelSpec(coeffs, "brownian", [x0]), jacobian


def linear_hypoelliptic_model() -> ModelSpec:
    """``dX1 = dB``, ``dX2 = X1 dt``; ``X2_t`` is the time integral of Brownian motion."""

    def drift(time, x):
        return np.column_stack([np.zeros(x.shape[0]), x[:, 0]])

    coeffs = CoefficientSpec(drift, _const([[1.0], [0.0]], (2, 1)), 2, 1, diffusion_bound=1.0)
    return ModelSpec(coeffs, "brownian", np.zeros(2))


def hypoelliptic_model(beta: float = 0.5, amplitude: float = 0.5):
    """Two-block system with ``b1 = W_{1+beta}(x1) + 0.3 cos(x2)`` and
    ``b2 = x1 + 0.5 sin(x1) + 0.3 sin(x2)``, so ``d b2 / d x1 >= 1/2``.

    Returns ``(model, jacobian)`` with ``jacobian(time, x)`` of shape ``(n, 2, 2)``.
    """
    w = Weierstrass(1.0 + beta, amplitude)

    def drift(time, x):
        b1 = w(x[:, 0]) + 0.3 * np.cos(x[:, 1])
        b2 = x[:, 0] + 0.5 * np.sin(x[:, 0]) + 0.3 * np.sin(x[:, 1])
        return np.column_stack([b1, b2])

    def jacobian(time, x):
        jac = np.empty((x.shape[0], 2, 2))
        jac[:, 0, 0] = w.derivative(x[:, 0])
        jac[:, 0, 1] = -0.3 * np.sin(x[:, 1])
        jac[:, 1, 0] = 1.0 + 0.5 * np.cos(x[:, 0])
        jac[:, 1, 1] = 0.3 * np.cos(x[:, 1])
        return jac

    coeffs = CoefficientSpec(drift, _const([[1.0], [0.0]], (2, 1)), 2, 1, holder_beta=beta,
                             diffusion_bound=1.0)
    return ModelSpec(coeffs, "brownian", np.zeros(2)), jacobian


def running_max_profile(beta: float) -> Callable:
    """``f(r) = 1 + 0.5 * min(1, r)**beta``, the map applied to the running maximum."""
    return lambda r: 1.0 + 0.5 * np.minimum(1.0, r) ** beta


def running_max_model(beta: float = 0.5) -> ModelSpec:
    """Path-dependent ``sigma(t, w) = f(sup_{r <= t} |w_r|)``, ``b = 0``, started at 0.

    ``|f(M_t) - f(M_s)| <= 0.5 * sup_{r in [s, t]} |w_r - w_s|**beta``.
    """
    f = running_max_profile(beta)

    def diffusion(time, view):
        running = np.abs(view.states).max(axis=0)
        return f(running)[:, :, None]

    coeffs = CoefficientSpec(_const(0.0, (1,)), diffusion, 1, 1, holder_beta=beta, drift_bound=0.0,
                             diffusion_bound=1.5, nondegeneracy_floor=1.0, path_dependent=True)
    return ModelSpec(coeffs, "brownian", [0.0])


def stable_model(alpha_stable: float = 1.5, sigma: float = 1.0, scale: float = 1.0,
                 x0: float = 0.0) -> ModelSpec:
    """``dX = sigma dZ`` with ``Z`` symmetric ``alpha_stable``-stable."""
    coeffs = CoefficientSpec(_const(0.0, (1,)), _const(sigma * np.eye(1), (1, 1)), 1, 1,
                             drift_bound=0.0, diffusion_bound=abs(sigma))
    return ModelSpec(coeffs, StableDriverSpec(alpha_stable, scale), [x0])


def stable_holder_model(alpha_stable: float = 1.5, beta: float = 0.5, amplitude: float = 0.25,
                        center: float = 1.0, x0: float = 0.0) -> ModelSpec:
    """``dX = (center + W_beta(X)) dZ`` with a stable driver."""
    w = Weierstrass(beta, amplitude, offset=center)

    def diffusion(time, x):
        return w(x)[:, :, None]

    coeffs = CoefficientSpec(_const(0.0, (1,)), diffusion, 1, 1, holder_beta=beta,
                             drift_bound=0.0, diffusion_bound=w.sup_bound)
    return ModelSpec(coeffs, StableDriverSpec(alpha_stable), [x0])


def singular_sigma_model(beta: float = 0.5, x0: float = 0.5) -> ModelSpec:
    """``sigma(x) = min(1, |x|**beta)``, ``b = 0``: degenerate at the origin."""

    def diffusion(time, x):
        return np.minimum(1.0, np.abs(x) ** beta)[:, :, None]

    coeffs = CoefficientSpec(_const(0.0, (1,)), diffusion, 1, 1, holder_beta=beta,
                             drift_bound=0.0, diffusion_bound=1.0)
    return ModelSpec(coeffs, "brownian", [x0])


def squared_bessel_model(x0: float = 0.0) -> ModelSpec:
    """``dX = dt + 2 sqrt(|X|) dW``; from 0 its law at time t is that of ``B_t**2``."""

    def diffusion(time, x):
        return (2.0 * np.sqrt(np.abs(x)))[:, :, None]

    coeffs = CoefficientSpec(_const(1.0, (1,)), diffusion, 1, 1, holder_beta=0.5, drift_bound=1.0)
    return ModelSpec(coeffs, "brownian", [x0])


def truncated_singular_drift(gamma_sing: float, cap: float, radius: float = 1.0) -> Callable:
    """``x -> sign(x) * min(cap, |x|**-gamma_sing)`` on ``|x| <= radius``, zero outside."""

    def b(x):
        x = np.asarray(x, dtype=float)
        r = np.abs(x)
        with np.errstate(divide="ignore"):
            mag = np.minimum(cap, np.where(r > 0, r, np.inf) ** -gamma_sing)
        mag = np.where(r > 0, mag, cap)
        return np.where(r <= radius, np.sign(x) * mag, 0.0)

    return b


def truncated_singular_drift_model(gamma_sing: float = 0.3, cap: float = 50.0,
                                   radius: float = 1.0, x0: float = 0.0) -> ModelSpec:
    """``b(x) = sign(x) min(cap, |x|^-gamma_sing) 1{|x| <= radius}``, ``sigma = 1``.

    The untruncated drift is time independent (``q = inf``) and lies in
    ``L^p(R)`` exactly for ``p < 1 / gamma_sing``; see :func:`drift_lp_membership`.
    """
    if not 0.0 < gamma_sing < 1.0:
        raise ParameterError("gamma_sing must lie in (0, 1)")
    if not cap > 0:
        raise ParameterError("cap must be positive")
    b = truncated_singular_drift(gamma_sing, cap, radius)

    def drift(time, x):
        return b(x)

    coeffs = CoefficientSpec(drift, _const(np.eye(1), (1, 1)), 1, 1, drift_bound=cap,
                             diffusion_bound=1.0, nondegeneracy_floor=1.0)
    return ModelSpec(coeffs, "brownian", [x0])


def drift_lp_membership(gamma_sing: float, dim: int = 1) -> float:
    """Supremum of the ``p`` with ``|x|^-gamma_sing 1{|x|<=1}`` in ``L^p(R^dim)``."""
    if not gamma_sing > 0:
        return float("inf")
    return dim / gamma_sing


def _first(model_or_pair):
    return model_or_pair[0] if isinstance(model_or_pair, tuple) else model_or_pair


BUILTIN_MODELS: Dict[str, Callable] = {
    "brownian": brownian_model,
    "holder_kink": holder_kink_model,
    "weierstrass_sigma": weierstrass_sigma_model,
    "weierstrass_drift": weierstrass_drift_model,
    "taylor_drift": lambda **kw: _first(taylor_drift_model(**kw)),
    "linear_hypoelliptic": linear_hypoelliptic_model,
    "hypoelliptic": lambda **kw: _first(hypoelliptic_model(**kw)),
    "running_max": running_max_model,
    "stable": stable_model,
    "stable_holder": stable_holder_model,
    "singular_sigma": singular_sigma_model,
    "squared_bessel": squared_bessel_model,
    "singular_drift": truncated_singular_drift_model,
}


def build_model(name: str, **params) -> ModelSpec:
    """Instantiate a registered model family by name."""
    try:
        factory = BUILTIN_MODELS[name]
    except KeyError:
        raise ParameterError(f"unknown model {name!r}; known: {sorted(BUILTIN_MODELS)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ParameterError(f"bad parameters for model {name!r}: {exc}") from None
