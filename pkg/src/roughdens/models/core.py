"""Coefficient specifications and Euler-Maruyama simulation of path ensembles.

Coefficient handles are vectorized over paths.  A Markovian handle is called
as ``f(time, x)`` with ``x`` of shape ``(n, d)``; a path-dependent handle
(``path_dependent=True``) is called as ``f(time, view)`` where ``view`` is a
:class:`PathView` exposing only the states simulated up to ``time``.  Drift
handles return ``(n, d)`` arrays, diffusion handles ``(n, d, d')`` arrays
(anything broadcastable to those shapes is accepted).

Paths are simulated in fixed-size chunks.  Path ``i`` always draws its noise
from stream ``seed.stream_id + i``, so the output does not depend on how the
chunks are distributed over worker threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from ..drivers import SeedSpec, StableDriverSpec, normal_block, stable_block
from ..errors import ParameterError, SimulationError, StateError

CHUNK_PATHS = 8192
STEP_BLOCK = 64
WORKERS_ENV = "ROUGHDENS_WORKERS"
_NONDEGENERACY_PROBES = 64

Driver = Union[str, StableDriverSpec]


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        value = int(raw)
    except ValueError:
        raise ParameterError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ParameterError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    return value


class PathView:
    """Read-only window on the states at times ``times[0] .. times[-1]``."""

    __slots__ = ("times", "states")

    def __init__(self, times: np.ndarray, states: np.ndarray):
        self.times = times
        self.states = states

    @property
    def current(self) -> np.ndarray:
        return self.states[-1]

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True)
class CoefficientSpec:
    drift: Callable
    diffusion: Callable
    dim_state: int
    dim_noise: int
    holder_beta: Optional[float] = None
    drift_bound: Optional[float] = None
    diffusion_bound: Optional[float] = None
    nondegeneracy_floor: Optional[float] = None
    path_dependent: bool = False

    def __post_init__(self):
        if self.dim_state < 1 or self.dim_noise < 1:
            raise ParameterError("dimensions must be positive")
        if self.holder_beta is not None and not 0.0 < self.holder_beta <= 1.0:
            raise ParameterError(f"holder_beta must lie in (0, 1], got {self.holder_beta}")
        for name in ("drift_bound", "diffusion_bound", "nondegeneracy_floor"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ParameterError(f"{name} must be non-negative")

    def evaluate(self, time: float, arg, n: int):
        """Drift ``(n, d)`` and diffusion ``(n, d, d')`` at ``arg`` (state or path view)."""
        d, dn = self.dim_state, self.dim_noise
        b = np.asarray(self.drift(time, arg), dtype=float)
        s = np.asarray(self.diffusion(time, arg), dtype=float)
        try:
            b = np.broadcast_to(b, (n, d))
            s = np.broadcast_to(s, (n, d, dn))
        except ValueError:
            raise ParameterError(
                f"coefficient shapes {b.shape}, {s.shape} incompatible with "
                f"(n={n}, d={d}, d'={dn})"
            ) from None
        return b, s


@dataclass(frozen=True)
class ModelSpec:
    coefficients: CoefficientSpec
    driver: Driver = "brownian"
    x0: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        x0 = np.atleast_1d(np.asarray(self.x0, dtype=float))
        if x0.shape != (self.coefficients.dim_state,):
            raise ParameterError(
                f"x0 has shape {x0.shape}, expected ({self.coefficients.dim_state},)"
            )
        object.__setattr__(self, "x0", x0)
        if isinstance(self.driver, StableDriverSpec):
            if self.coefficients.dim_noise != self.coefficients.dim_state:
                raise ParameterError("a stable driver needs dim_noise == dim_state")
        elif self.driver != "brownian":
            raise ParameterError(f"unknown driver {self.driver!r}")

    @property
    def is_stable(self) -> bool:
        return isinstance(self.driver, StableDriverSpec)


@dataclass
class PathEnsemble:
    endpoints: np.ndarray
    t: float
    epsilon: float
    n_steps: int
    checkpoints: Optional[np.ndarray] = None
    retained_noise: Optional[np.ndarray] = None
    window_dt: Optional[float] = None
    times: Optional[np.ndarray] = None
    paths: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.checkpoints is not None and not self.epsilon > 0:
            raise ParameterError("checkpoints require epsilon > 0")

    @property
    def n_paths(self) -> int:
        return self.endpoints.shape[0]

    @property
    def checkpoint_index(self) -> int:
        if self.times is None or self.checkpoints is None:
            raise StateError("ensemble has no checkpoint")
        return len(self.times) - 1 - self.retained_noise.shape[1]


def time_grid(t: float, n_steps: int, epsilon: float = 0.0, window_steps: Optional[int] = None):
    """Return ``(times, dts, checkpoint_index)`` for a plain or checkpointed grid.

    Without a checkpoint the grid is uniform.  With one, it is the union of a
    uniform grid on ``[0, t - epsilon]`` and a uniform grid on ``[t - epsilon, t]``.
    """
    if not t > 0:
        raise ParameterError(f"t must be positive, got {t}")
    if n_steps < 1:
        raise ParameterError(f"n_steps must be >= 1, got {n_steps}")
    if epsilon == 0.0:
        dt = t / n_steps
        times = dt * np.arange(n_steps + 1)
        times[-1] = t
        return times, np.full(n_steps, dt), None
    if not 0.0 < epsilon < t:
        raise ParameterError(f"need 0 < epsilon < t, got epsilon={epsilon}, t={t}")
    t_check = t - epsilon
    n_pre = max(1, math.ceil(n_steps * t_check / t - 1e-9))
    n_win = window_steps if window_steps is not None else max(1, math.ceil(n_steps * epsilon / t - 1e-9))
    if n_win < 1:
        raise ParameterError("window_steps must be >= 1")
    dt_pre = t_check / n_pre
    dt_win = epsilon / n_win
    times = np.concatenate([dt_pre * np.arange(n_pre + 1), t_check + dt_win * np.arange(1, n_win + 1)])
    times[n_pre] = t_check
    times[-1] = t
    dts = np.concatenate([np.full(n_pre, dt_pre), np.full(n_win, dt_win)])
    return times, dts, n_pre


def _noise(model: ModelSpec, master_seed: int, ids: np.ndarray, first_step: int, n_block: int, dts):
    dn = model.coefficients.dim_noise
    if model.is_stable:
        alpha = model.driver.alpha_stable
        raw = stable_block(master_seed, ids, first_step * dn, n_block * dn, alpha)
        scale = model.driver.scale * dts ** (1.0 / alpha)
    else:
        raw = normal_block(master_seed, ids, first_step * dn, n_block * dn)
        scale = np.sqrt(dts)
    return raw.reshape(ids.size, n_block, dn) * scale[None, :, None]


def euler_increment(model: ModelSpec, time: float, arg, x: np.ndarray, dz: np.ndarray, dt: float,
                    step: int, path_offset: int = 0) -> np.ndarray:
    """One explicit Euler step ``x + b dt + sigma dz``; the single source of
    truth for both forward simulation and window re-integration."""
    n = x.shape[0]
    coeffs = model.coefficients
    b, s = coeffs.evaluate(time, arg, n)
    bad = ~(np.isfinite(b).all(axis=1) & np.isfinite(s).all(axis=(1, 2)))
    if bad.any():
        i = int(np.argmax(bad))
        raise SimulationError(
            f"non-finite coefficient at path {path_offset + i}, step {step} (time {time:.6g})",
            path=path_offset + i,
            step=step,
        )
    floor = coeffs.nondegeneracy_floor
    if floor is not None:
        probe = s[:_NONDEGENERACY_PROBES]
        det = np.linalg.det(probe @ np.swapaxes(probe, 1, 2))
        if (det < floor * (1 - 1e-12)).any():
            i = int(np.argmax(det < floor * (1 - 1e-12)))
            raise SimulationError(
                f"det(sigma sigma*) = {det[i]:.3g} below declared floor {floor} "
                f"at path {path_offset + i}, step {step}",
                path=path_offset + i,
                step=step,
            )
    return x + b * dt + np.matmul(s, dz[:, :, None])[:, :, 0]


def _simulate_chunk(model, master_seed, ids, path_offset, times, dts, checkpoint_index, keep_paths):
    n = ids.size
    d = model.coefficients.dim_state
    n_steps = dts.size
    path_dep = model.coefficients.path_dependent
    x = np.broadcast_to(model.x0, (n, d)).copy()
    history = None
    if path_dep or keep_paths:
        history = np.empty((n_steps + 1, n, d))
        history[0] = x
    checkpoint = None
    retained = None
    if checkpoint_index is not None:
        retained = np.empty((n, n_steps - checkpoint_index, model.coefficients.dim_noise))
    for k0 in range(0, n_steps, STEP_BLOCK):
        nb = min(STEP_BLOCK, n_steps - k0)
        dz_block = _noise(model, master_seed, ids, k0, nb, dts[k0:k0 + nb])
        for j in range(nb):
            k = k0 + j
            if checkpoint_index is not None and k == checkpoint_index:
                checkpoint = x.copy()
            dz = dz_block[:, j, :]
            if checkpoint_index is not None and k >= checkpoint_index:
                retained[:, k - checkpoint_index, :] = dz
            if path_dep:
                view = history[: k + 1]
                view = view.view()
                view.flags.writeable = False
                arg = PathView(times[: k + 1], view)
            else:
                arg = x
            x = euler_increment(model, times[k], arg, x, dz, dts[k], k, path_offset)
            if history is not None:
                history[k + 1] = x
    return x, checkpoint, retained, history if keep_paths else None


def _run(model, t, n_steps, n_paths, seed, epsilon, window_steps, keep_paths, workers):
    if n_paths < 1:
        raise ParameterError(f"n_paths must be >= 1, got {n_paths}")
    if not isinstance(seed, SeedSpec):
        raise ParameterError("seed must be a SeedSpec")
    times, dts, cidx = time_grid(t, n_steps, epsilon, window_steps)
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise ParameterError("workers must be >= 1")
    starts = list(range(0, n_paths, CHUNK_PATHS))

    def job(start):
        stop = min(start + CHUNK_PATHS, n_paths)
        ids = np.arange(seed.stream_id + start, seed.stream_id + stop, dtype=np.uint64)
        return _simulate_chunk(model, seed.master_seed, ids, start, times, dts, cidx, keep_paths)

    if workers == 1 or len(starts) == 1:
        results = [job(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, starts))
    endpoints = np.concatenate([r[0] for r in results])
    checkpoints = retained = paths = None
    if cidx is not None:
        checkpoints = np.concatenate([r[1] for r in results])
        retained = np.concatenate([r[2] for r in results])
    if keep_paths:
        paths = np.concatenate([r[3] for r in results], axis=1)
    return PathEnsemble(
        endpoints=endpoints,
        t=float(t),
        epsilon=float(epsilon),
        n_steps=int(dts.size),
        checkpoints=checkpoints,
        retained_noise=retained,
        window_dt=None if cidx is None else float(dts[-1]),
        times=times,
        paths=paths,
    )


def simulate_ensemble(model: ModelSpec, t: float, n_steps: int, n_paths: int, seed: SeedSpec,
                      keep_paths: bool = False, workers: Optional[int] = None) -> PathEnsemble:
    """Euler(-Maruyama) endpoints at time ``t`` on a uniform grid of ``n_steps`` steps."""
    return _run(model, t, n_steps, n_paths, seed, 0.0, None, keep_paths, workers)


def simulate_with_checkpoint(model: ModelSpec, t: float, epsilon: float, n_steps: int, n_paths: int,
                             seed: SeedSpec, window_steps: Optional[int] = None,
                             keep_paths: bool = False, workers: Optional[int] = None) -> PathEnsemble:
    """Like :func:`simulate_ensemble` but records ``X_{t-epsilon}`` and the
    driver increments on ``[t - epsilon, t]``.

    ``n_steps`` sets the resolution of the pre-window part; the window uses
    ``window_steps`` steps (default: the same step size as the pre-window part).
    """
    if not 0 < epsilon < t:
        raise ParameterError(f"need 0 < epsilon < t, got epsilon={epsilon}, t={t}")
    return _run(model, t, n_steps, n_paths, seed, epsilon, window_steps, keep_paths, workers)


def reintegrate_window(model: ModelSpec, ensemble: PathEnsemble) -> np.ndarray:
    """Replay the retained window increments from the checkpoints.

    Reproduces ``ensemble.endpoints`` bit for bit.  Path-dependent models need
    the full history (simulate with ``keep_paths=True``).
    """
    if ensemble.checkpoints is None or ensemble.retained_noise is None:
        raise StateError("ensemble carries no checkpoint / retained noise")
    cidx = ensemble.checkpoint_index
    times = ensemble.times
    x = ensemble.checkpoints.copy()
    n_win = ensemble.retained_noise.shape[1]
    path_dep = model.coefficients.path_dependent
    if path_dep:
        if ensemble.paths is None:
            raise StateError("path-dependent re-integration needs keep_paths=True")
        history = ensemble.paths[: cidx + 1].copy()
    for j in range(n_win):
        k = cidx + j
        if path_dep:
            view = history.view()
            view.flags.writeable = False
            arg = PathView(times[: k + 1], view)
        else:
            arg = x
        x = euler_increment(model, times[k], arg, x, ensemble.retained_noise[:, j, :], ensemble.window_dt, k)
        if path_dep:
            history = np.concatenate([history, x[None]], axis=0)
    return x


def write_ensemble_csv(ensemble: PathEnsemble, path) -> None:
    """CSV dump with columns ``path_id, x_1..x_d`` and, when present, ``c_1..c_d``."""
    d = ensemble.endpoints.shape[1]
    cols = ["path_id"] + [f"x_{j + 1}" for j in range(d)]
    blocks = [np.arange(ensemble.n_paths)[:, None].astype(float), ensemble.endpoints]
    if ensemble.checkpoints is not None:
        cols += [f"c_{j + 1}" for j in range(d)]
        blocks.append(ensemble.checkpoints)
    data = np.hstack(blocks)
    fmt = ["%d"] + ["%.17g"] * (data.shape[1] - 1)
    np.savetxt(path, data, delimiter=",", header=",".join(cols), comments="", fmt=fmt)


def read_ensemble_csv(path):
    """Inverse of :func:`write_ensemble_csv`: returns ``(endpoints, checkpoints or None)``."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    if not header or header[0] != "path_id":
        raise ParameterError(f"{path}: not an ensemble dump (missing path_id header)")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    xcols = [i for i, c in enumerate(header) if c.startswith("x_")]
    ccols = [i for i, c in enumerate(header) if c.startswith("c_")]
    endpoints = data[:, xcols]
    checkpoints = data[:, ccols] if ccols else None
    return endpoints, checkpoints
