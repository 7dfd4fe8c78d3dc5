"""Finite differences, Besov / Triebel-Lizorkin seminorms and grid densities.

Grid functions live on a uniform box (same spacing on every axis, d <= 3) and
are extended by zero outside it.  Differences of a grid function are taken on
the zero extension, so ``delta_m`` returns a grid function on an enlarged box
that carries the whole support of the difference.  ``L^p`` norms and inner
products use the rectangle rule.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate, ndimage, special

from .errors import ParameterError

__all__ = [
    "GridDomain",
    "GridFunction",
    "DifferenceProbe",
    "binomial_weights",
    "delta_m",
    "delta_recursive",
    "lp_norm",
    "besov_seminorm",
    "dyadic_h_grid",
    "lizorkin_maximal",
    "triebel_lizorkin_seminorm",
    "mollified_density",
    "gaussian_difference_l1",
    "write_grid_csv",
    "read_grid_csv",
]

_ALIGN_TOL = 1e-9


@dataclass(frozen=True)
class GridDomain:
    origin: np.ndarray
    spacing: float
    shape: tuple

    def __post_init__(self):
        origin = np.atleast_1d(np.asarray(self.origin, dtype=float))
        shape = tuple(int(n) for n in np.atleast_1d(self.shape))
        if not self.spacing > 0:
            raise ParameterError(f"spacing must be positive, got {self.spacing}")
        if len(shape) != origin.size or not 1 <= len(shape) <= 3:
            raise ParameterError("origin and shape must have the same length d in {1, 2, 3}")
        if min(shape) < 1:
            raise ParameterError("every axis needs at least one grid point")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "shape", shape)

    @classmethod
    def box(cls, lower, upper, spacing: float) -> "GridDomain":
        """Grid with points ``lower + k * spacing`` covering ``[lower, upper]``."""
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        shape = tuple(int(math.floor((u - l) / spacing + 1e-9)) + 1 for l, u in zip(lower, upper))
        return cls(lower, spacing, shape)

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.dim

    def axes(self):
        return [self.origin[a] + self.spacing * np.arange(n) for a, n in enumerate(self.shape)]

    def points(self) -> np.ndarray:
        """All grid points, shape ``shape + (d,)``."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack(mesh, axis=-1)


@dataclass(frozen=True)
class GridFunction:
    origin: np.ndarray
    spacing: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        origin = np.atleast_1d(np.asarray(self.origin, dtype=float))
        if not self.spacing > 0:
            raise ParameterError(f"spacing must be positive, got {self.spacing}")
        if values.ndim != origin.size or not 1 <= values.ndim <= 3:
            raise ParameterError("values.ndim must equal len(origin) and lie in {1, 2, 3}")
        if not np.isfinite(values).all():
            raise ParameterError("grid values must be finite")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "origin", origin)

    @classmethod
    def from_function(cls, f: Callable, domain: GridDomain) -> "GridFunction":
        """Sample ``f`` (points of shape ``(..., d)`` -> values) on ``domain``."""
        return cls(domain.origin, domain.spacing, np.asarray(f(domain.points()), dtype=float))

    @classmethod
    def constant(cls, c: float, domain: GridDomain) -> "GridFunction":
        return cls(domain.origin, domain.spacing, np.full(domain.shape, float(c)))

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def domain(self) -> GridDomain:
        return GridDomain(self.origin, self.spacing, self.values.shape)

    def integral(self) -> float:
        return float(self.values.sum() * self.spacing ** self.dim)

    def cells(self, v) -> np.ndarray:
        """Vector ``v`` in units of grid cells; raises unless grid-aligned."""
        v = np.atleast_1d(np.asarray(v, dtype=float))
        if v.size != self.dim:
            raise ParameterError(f"vector of length {v.size} for a {self.dim}-d grid")
        k = v / self.spacing
        r = np.rint(k)
        if np.any(np.abs(k - r) > _ALIGN_TOL * np.maximum(1.0, np.abs(k))):
            raise ParameterError(f"displacement {v} is not a multiple of the spacing {self.spacing}")
        return r.astype(int)

    def offset_to(self, other: "GridFunction") -> np.ndarray:
        """Integer cell offset of ``other.origin`` relative to ``self.origin``."""
        if not math.isclose(self.spacing, other.spacing, rel_tol=1e-12):
            raise ParameterError("grid functions have different spacings")
        return self.cells(other.origin - self.origin)

    def translate(self, a) -> "GridFunction":
        """``x -> f(x - a)`` for a grid-aligned shift ``a``."""
        self.cells(a)
        return GridFunction(self.origin + np.atleast_1d(a), self.spacing, self.values)

    def embed(self, origin_cells, shape) -> np.ndarray:
        """Values on the box starting ``origin_cells`` from our origin, zero outside."""
        out = np.zeros(shape)
        src, dst = [], []
        for a, n in enumerate(self.values.shape):
            lo = max(0, origin_cells[a])
            hi = min(n, origin_cells[a] + shape[a])
            if hi <= lo:
                return out
            src.append(slice(lo, hi))
            dst.append(slice(lo - origin_cells[a], hi - origin_cells[a]))
        out[tuple(dst)] = self.values[tuple(src)]
        return out

    def _union(self, other):
        off = self.offset_to(other)
        lo = np.minimum(0, off)
        hi = np.maximum(np.array(self.values.shape), off + np.array(other.values.shape))
        shape = tuple(int(n) for n in hi - lo)
        a = self.embed(lo, shape)
        b = other.embed(lo - off, shape)
        return self.origin + lo * self.spacing, a, b

    def __add__(self, other):
        origin, a, b = self._union(other)
        return GridFunction(origin, self.spacing, a + b)

    def __sub__(self, other):
        origin, a, b = self._union(other)
        return GridFunction(origin, self.spacing, a - b)

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            origin, a, b = self._union(other)
            return GridFunction(origin, self.spacing, a * b)
        return GridFunction(self.origin, self.spacing, self.values * float(other))

    __rmul__ = __mul__

    def inner(self, other: "GridFunction") -> float:
        _, a, b = self._union(other)
        return float(np.sum(a * b) * self.spacing ** self.dim)


@dataclass(frozen=True)
class DifferenceProbe:
    """Test function plus the displacements it is probed with."""

    m: int
    h_set: Sequence
    phi: Callable
    alpha: float
    phi_norm_bound: float

    def __post_init__(self):
        if self.m < 1:
            raise ParameterError("difference order m must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError("alpha must lie in (0, 1)")
        if not self.phi_norm_bound > 0:
            raise ParameterError("phi_norm_bound must be positive")
        hs = tuple(np.atleast_1d(np.asarray(h, dtype=float)) for h in self.h_set)
        for h in hs:
            if np.linalg.norm(h) > 1.0 + 1e-12:
                raise ParameterError(f"|h| must be <= 1, got {np.linalg.norm(h)}")
        object.__setattr__(self, "h_set", hs)


def binomial_weights(m: int) -> np.ndarray:
    """Coefficients ``(-1)**(m-j) * C(m, j)`` for ``j = 0..m``."""
    return np.array([(-1) ** (m - j) * math.comb(m, j) for j in range(m + 1)], dtype=float)


def _shifted(values: np.ndarray, s) -> np.ndarray:
    """``out[u] = values[u + s]``, zero where ``u + s`` falls outside."""
    out = np.zeros_like(values)
    src, dst = [], []
    for n, k in zip(values.shape, s):
        if abs(k) >= n:
            return out
        if k >= 0:
            src.append(slice(k, n))
            dst.append(slice(0, n - k))
        else:
            src.append(slice(0, n + k))
            dst.append(slice(-k, n))
    out[tuple(dst)] = values[tuple(src)]
    return out


def delta_m(f, m: int, h):
    """m-th forward difference ``sum_j (-1)**(m-j) C(m,j) f(x + j h)``.

    For a callable, returns a callable with the same calling convention.  For a
    :class:`GridFunction`, ``h`` must be a whole number of cells per axis and
    the result lives on the box supporting the difference of the zero extension.
    """
    if m < 0:
        raise ParameterError("m must be non-negative")
    w = binomial_weights(m)
    if callable(f) and not isinstance(f, GridFunction):
        h = np.asarray(h, dtype=float)

        def diff(x):
            x = np.asarray(x, dtype=float)
            return sum(w[j] * np.asarray(f(x + j * h), dtype=float) for j in range(m + 1))

        return diff
    if not isinstance(f, GridFunction):
        raise ParameterError("delta_m needs a GridFunction or a callable")
    s = f.cells(h)
    pad = m * np.abs(s)
    padded = np.pad(f.values, [(int(p), int(p)) for p in pad])
    out = sum(w[j] * _shifted(padded, j * s) for j in range(m + 1))
    # drop the padding that cannot carry support: keep i in [-m s, n-1] (s >= 0) or [0, n-1+m|s|]
    keep = []
    lower = []
    for a, (n, k) in enumerate(zip(f.values.shape, s)):
        p = int(pad[a])
        if k >= 0:
            keep.append(slice(0, p + n))
            lower.append(-p)
        else:
            keep.append(slice(p, 2 * p + n))
            lower.append(0)
    origin = f.origin + np.array(lower) * f.spacing
    return GridFunction(origin, f.spacing, out[tuple(keep)])


def delta_recursive(f, m: int, h):
    """``m``-fold composition of first differences (reference for :func:`delta_m`)."""
    g = f
    for _ in range(m):
        g = delta_m(g, 1, h)
    return g


def lp_norm(f: GridFunction, p: float) -> float:
    if p == math.inf:
        return float(np.max(np.abs(f.values))) if f.values.size else 0.0
    if p < 1:
        raise ParameterError("p must be >= 1")
    vol = f.spacing ** f.dim
    return float((np.sum(np.abs(f.values) ** p) * vol) ** (1.0 / p))


def dyadic_h_grid(dim: int, k_min: int, k_max: int, include_diagonal: bool = True) -> list:
    """Displacements ``2**-k e`` for axis directions ``e`` (and the all-ones diagonal)."""
    out = []
    for k in range(k_min, k_max + 1):
        r = 2.0 ** -k
        for a in range(dim):
            e = np.zeros(dim)
            e[a] = r
            out.append(e)
        if include_diagonal and dim > 1:
            out.append(np.full(dim, r))
    return out


def besov_seminorm(f: GridFunction, s: float, p: float, m: int, h_grid: Iterable,
                   q: float = math.inf) -> float:
    """``max_h ||Delta_h^m f||_{L^p} / |h|^s`` over ``h_grid`` (the q = inf seminorm)."""
    if q != math.inf:
        raise ParameterError("only q = inf is supported")
    if not m > s:
        raise ParameterError(f"need m > s, got m={m}, s={s}")
    h_grid = [np.atleast_1d(np.asarray(h, dtype=float)) for h in h_grid]
    if not h_grid:
        raise ParameterError("h_grid is empty")
    best = 0.0
    for h in h_grid:
        r = float(np.linalg.norm(h))
        if r == 0:
            raise ParameterError("h_grid must not contain the zero vector")
        best = max(best, lp_norm(delta_m(f, m, h), p) / r**s)
    return best


def lizorkin_maximal(phi: Callable, alpha: float, domain: GridDomain, h_grid: Iterable) -> GridFunction:
    """Pointwise ``max_h |phi(x + h) - phi(x)| / |h|**alpha`` on the grid points.

    ``phi`` maps points of shape ``(..., d)`` to values of shape ``(...)``.
    """
    h_grid = [np.atleast_1d(np.asarray(h, dtype=float)) for h in h_grid]
    if not h_grid:
        raise ParameterError("h_grid is empty")
    x = domain.points()
    base = np.asarray(phi(x), dtype=float)
    out = np.zeros(domain.shape)
    for h in h_grid:
        r = float(np.linalg.norm(h))
        if r == 0:
            raise ParameterError("h_grid must not contain the zero vector")
        out = np.maximum(out, np.abs(np.asarray(phi(x + h), dtype=float) - base) / r**alpha)
    return GridFunction(domain.origin, domain.spacing, out)


def triebel_lizorkin_seminorm(phi: Callable, alpha: float, q: float, domain: GridDomain,
                              h_grid: Iterable) -> float:
    """``||Phi||_{L^q}`` of the Lizorkin maximal function over ``domain``."""
    return lp_norm(lizorkin_maximal(phi, alpha, domain, h_grid), q)


def _linear_binning(samples: np.ndarray, domain: GridDomain) -> np.ndarray:
    n, d = samples.shape
    rel = (samples - domain.origin) / domain.spacing
    base = np.floor(rel).astype(np.int64)
    frac = rel - base
    shape = np.array(domain.shape)
    counts = np.zeros(int(np.prod(shape)))
    strides = np.array([int(np.prod(shape[a + 1:])) for a in range(d)], dtype=np.int64)
    for corner in range(2**d):
        bits = np.array([(corner >> a) & 1 for a in range(d)])
        idx = base + bits
        wgt = np.prod(np.where(bits == 1, frac, 1.0 - frac), axis=1)
        ok = np.all((idx >= 0) & (idx < shape), axis=1) & (wgt > 0)
        flat = idx[ok] @ strides
        counts += np.bincount(flat, weights=wgt[ok], minlength=counts.size)
    return counts.reshape(domain.shape)


def mollified_density(samples, bandwidth: float, target: GridDomain,
                      truncation: float = 8.0) -> GridFunction:
    """Gaussian-kernel density estimate of ``samples`` on the grid ``target``.

    Samples are linearly binned onto the grid extended by ``truncation``
    bandwidths on every side, then convolved axis by axis with the Gaussian
    kernel sampled at the grid offsets.  The result is divided by the total
    sample count, so mass escaping the box shows up as a deficit below 1.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    if samples.shape[0] == 0:
        raise ParameterError("no samples")
    if not bandwidth > 0:
        raise ParameterError("bandwidth must be positive")
    if samples.shape[1] != target.dim:
        raise ParameterError("sample dimension differs from grid dimension")
    k = int(math.ceil(truncation * bandwidth / target.spacing))
    ext = GridDomain(target.origin - k * target.spacing, target.spacing,
                     tuple(n + 2 * k for n in target.shape))
    counts = _linear_binning(samples, ext)
    offsets = target.spacing * np.arange(-k, k + 1)
    kernel = np.exp(-0.5 * (offsets / bandwidth) ** 2) / (math.sqrt(2 * math.pi) * bandwidth)
    dens = counts
    for a in range(target.dim):
        dens = ndimage.convolve1d(dens, kernel, axis=a, mode="constant", cval=0.0)
    inner = tuple(slice(k, k + n) for n in target.shape)
    values = np.maximum(dens[inner], 0.0) / samples.shape[0]
    return GridFunction(target.origin, target.spacing, values)


_SMALL_SHIFT = 0.5


def _spline_pieces(m: int, n_nodes: int = 12):
    """Gauss-Legendre nodes and weights for ``int_0^m F(s) M_m(s) ds``.

    ``M_m`` is the cardinal B-spline on ``[0, m]`` (unit mass); it is a
    polynomial of degree ``m - 1`` on each unit interval, so the rule is
    exact up to the smoothness of ``F``.
    """
    from scipy.interpolate import BSpline

    spline = BSpline.basis_element(np.arange(m + 1, dtype=float), extrapolate=False)
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    nodes = np.concatenate([k + 0.5 * (x + 1.0) for k in range(m)])
    weights = np.concatenate([0.5 * w for _ in range(m)]) * np.nan_to_num(spline(nodes))
    return nodes, weights


def _std_normal_difference_l1(a: float, m: int) -> float:
    """``|| sum_j w_j phi(x + j a) ||_{L^1(R)}`` for the standard normal density.

    Large shifts use the binomial sum directly.  Small shifts use
    ``Delta_a^m phi(x) = a^m int_0^m phi^(m)(x + a s) M_m(s) ds``, which
    avoids the cancellation of the binomial sum.
    """
    a = abs(a)
    if a == 0.0 or m == 0:
        return 0.0 if m > 0 else 1.0
    if m == 1:
        return 2.0 * (2.0 * special.ndtr(a / 2.0) - 1.0)
    w = binomial_weights(m)
    norm = 1.0 / math.sqrt(2 * math.pi)
    if a < _SMALL_SHIFT:
        nodes, weights = _spline_pieces(m)
        herm = np.zeros(m + 1)
        herm[m] = 1.0

        def g(x):
            y = x + a * nodes
            dm = (-1) ** m * np.polynomial.hermite_e.hermeval(y, herm) * np.exp(-0.5 * y * y) * norm
            return abs(float(np.dot(weights, dm)))

        scale = a**m
        roots = list(np.polynomial.hermite_e.hermeroots(herm))
        # sign changes sit near the Hermite roots shifted by the spline mean
        pts = [r - 0.5 * m * a for r in roots]
    else:

        def g(x):
            return abs(float(np.dot(w, np.exp(-0.5 * (x + a * np.arange(m + 1)) ** 2)))) * norm

        scale = 1.0
        centers = -a * np.arange(m + 1)
        pts = list(centers) + [c + s for c in centers for s in (-1.0, 1.0)]
    lo, hi = -m * a - 14.0, 14.0
    pts = sorted(p for p in pts if lo < p < hi)
    # split at the bumps and sign changes so the adaptive rule sees each piece separately
    edges = [lo] + pts + [hi]
    total = 0.0
    for x0, x1 in zip(edges[:-1], edges[1:]):
        if x1 > x0:
            val, _ = integrate.quad(g, x0, x1, epsabs=1e-15, epsrel=1e-11, limit=200)
            total += val
    return scale * total


def gaussian_difference_l1(cov, epsilon: float, h, m: int) -> float:
    """``||Delta_{-h}^m g||_{L^1}`` for ``g`` the N(0, epsilon * cov) density.

    Whitening ``x = L z`` with ``epsilon * cov = L L^T`` maps the norm to the
    standard normal case with displacement ``L^{-1} h``; the standard normal
    factorizes along that direction, leaving a one-dimensional integral that is
    evaluated by adaptive quadrature (closed form for ``m = 1``).
    """
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    h = np.atleast_1d(np.asarray(h, dtype=float))
    if cov.shape != (h.size, h.size):
        raise ParameterError("cov must be d x d with d = len(h)")
    if not epsilon > 0:
        raise ParameterError("epsilon must be positive")
    if m < 1:
        raise ParameterError("m must be >= 1")
    if not np.allclose(cov, cov.T, rtol=1e-12, atol=0):
        raise ParameterError("cov must be symmetric")
    try:
        chol = np.linalg.cholesky(epsilon * cov)
    except np.linalg.LinAlgError:
        raise ParameterError(
            "cov is not positive definite; use a weighted estimator for singular diffusions"
        ) from None
    a = float(np.linalg.norm(np.linalg.solve(chol, h)))
    return _std_normal_difference_l1(a, m)


def write_grid_csv(f: GridFunction, path) -> None:
    """CSV ``x_1..x_d,value`` plus a ``<path>.json`` sidecar with origin/spacing/shape."""
    pts = f.domain.points().reshape(-1, f.dim)
    data = np.column_stack([pts, f.values.reshape(-1)])
    header = ",".join([f"x_{a + 1}" for a in range(f.dim)] + ["value"])
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")
    meta = {"origin": f.origin.tolist(), "spacing": f.spacing, "shape": list(f.values.shape)}
    with open(f"{path}.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)


def read_grid_csv(path) -> GridFunction:
    with open(f"{path}.json") as fh:
        meta = json.load(fh)
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    values = data[:, -1].reshape(meta["shape"])
    return GridFunction(np.array(meta["origin"]), float(meta["spacing"]), values)
