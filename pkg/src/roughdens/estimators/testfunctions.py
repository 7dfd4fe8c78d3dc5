"""Hoelder test functions with certified ``C^alpha_b`` norm bounds.

The norm is ``||phi||_inf + [phi]_alpha`` with
``[phi]_alpha = sup |phi(x + h) - phi(x)| / |h|^alpha``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..besov import DifferenceProbe
from ..errors import ParameterError

__all__ = ["TestFunction", "TEST_FAMILIES", "make_test_function", "make_probe"]

TEST_FAMILIES = ("cosine", "bump", "kink")


@dataclass(frozen=True)
class TestFunction:
    family: str
    alpha: float
    phi: Callable
    phi_norm_bound: float
    seminorm_bound: float
    sup_bound: float
    params: dict = field(default_factory=dict)

    __test__ = False  # not a pytest class

    def __call__(self, x):
        return self.phi(x)


def _points(x):
    x = np.asarray(x, dtype=float)
    return x[..., None] if x.ndim == 1 else x


def _cosine(alpha, omega):
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    w = float(np.linalg.norm(omega))

    def phi(x):
        return np.cos(_points(x) @ omega)

    # |cos a - cos b| <= min(2, |a - b|) <= 2^(1 - alpha) |a - b|^alpha
    semi = 2.0 ** (1.0 - alpha) * w**alpha
    return phi, semi, 1.0, {"omega": omega.tolist()}


def _kink(alpha, center):
    center = np.atleast_1d(np.asarray(center, dtype=float))

    def phi(x):
        r = np.linalg.norm(_points(x) - center, axis=-1)
        return np.minimum(1.0, r**alpha)

    # r -> min(1, r^alpha) is alpha-Hoelder with constant 1 and r = |x - c| is 1-Lipschitz
    return phi, 1.0, 1.0, {"center": center.tolist()}


def _bump(alpha, center, radius, height):
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if not radius > 0:
        raise ParameterError("bump radius must be positive")

    def phi(x):
        u = np.linalg.norm(_points(x) - center, axis=-1) / radius
        inside = u < 1.0
        out = np.zeros_like(u)
        out[inside] = height * np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
        return out

    # profile g(u) = exp(1 - 1/(1 - u^2)); Lipschitz constant max|g'| from a fine
    # grid plus a bound on g'' times the grid step, so the maximum is certified
    u = np.linspace(0.0, 1.0, 200001)[:-1]
    v = 1.0 - u**2
    g = np.exp(1.0 - 1.0 / v)
    g1 = -2.0 * u / v**2 * g
    g2 = g * (4.0 * u**2 / v**4 - 2.0 / v**2 - 8.0 * u**2 / v**3)
    lip_profile = float(np.max(np.abs(g1)) + np.max(np.abs(g2)) * (u[1] - u[0]))
    lip = abs(height) * lip_profile / radius
    sup = abs(height)
    # |f(x) - f(y)| <= min(2 sup, lip |h|) <= (2 sup)^(1 - alpha) lip^alpha |h|^alpha
    semi = (2.0 * sup) ** (1.0 - alpha) * lip**alpha
    return phi, semi, sup, {"center": center.tolist(), "radius": radius, "height": height}


def make_test_function(family: str, alpha: float, **params) -> TestFunction:
    """Build a test function from a fixed family.

    ``cosine(omega)``: ``cos(<omega, x>)``; ``kink(center)``:
    ``min(1, |x - c|^alpha)``; ``bump(center, radius, height)``: a smooth
    compactly supported bump.  Defaults are one-dimensional.
    """
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    if family == "cosine":
        phi, semi, sup, rec = _cosine(alpha, params.pop("omega", 1.0))
    elif family == "kink":
        phi, semi, sup, rec = _kink(alpha, params.pop("center", 0.0))
    elif family == "bump":
        phi, semi, sup, rec = _bump(alpha, params.pop("center", 0.0), float(params.pop("radius", 1.0)),
                                    float(params.pop("height", 1.0)))
    else:
        raise ParameterError(f"unknown test-function family {family!r}; known: {TEST_FAMILIES}")
    if params:
        raise ParameterError(f"unexpected parameters for {family!r}: {sorted(params)}")
    return TestFunction(family, alpha, phi, sup + semi, semi, sup, rec)


def make_probe(test_function: TestFunction, m: int, h_set) -> DifferenceProbe:
    return DifferenceProbe(m, h_set, test_function.phi, test_function.alpha, test_function.phi_norm_bound)
