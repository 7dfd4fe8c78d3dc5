"""Scenario configuration: defaults, flat ``key=value`` files and validation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

from ..drivers import SeedSpec
from ..errors import ParameterError, UsageError

__all__ = ["CONFIG_KEYS", "ScenarioConfig", "parse_config_text", "read_config_file", "dyadic"]

# every accepted key with its meaning; "model.<name>" and "tol.<check_id>"
# are validated against the scenario's own tables
CONFIG_KEYS: Dict[str, str] = {
    "seed": "master seed (unsigned 64-bit integer)",
    "stream_id": "stream id of path 0; path i uses stream_id + i",
    "n_paths": "Monte Carlo paths per sweep point",
    "t": "terminal time",
    "epsilon_sweep": "comma-separated dyadic list t * 2^-k of auxiliary window lengths",
    "h_sweep": "comma-separated dyadic list 2^-k of difference step sizes",
    "n_steps": "Euler steps per unit t before the window (ceil(n_steps (t - epsilon) / t) on [0, t - epsilon])",
    "window_steps": "Euler steps inside the auxiliary window [t - epsilon, t]",
    "m": "difference order",
    "alpha": "Hoelder exponent of the test functions",
    "workers": "worker threads for ensemble generation (never changes results)",
    "output_dir": "directory for CSV/JSON artifacts (empty: write nothing)",
    "model.<name>": "override a model parameter of the scenario",
    "tol.<check_id>": "override the tolerance of one check",
}

_SCALAR_KEYS = {"seed": int, "stream_id": int, "n_paths": int, "t": float, "n_steps": int,
                "window_steps": int, "m": int, "alpha": float, "workers": int, "output_dir": str}


def dyadic(k_first: int, k_last: int, base: float = 1.0) -> Tuple[float, ...]:
    return tuple(base * 2.0 ** -k for k in range(k_first, k_last + 1))


def _is_dyadic(x: float, base: float) -> bool:
    if not x > 0:
        return False
    k = math.log2(base / x)
    return abs(k - round(k)) < 1e-9 and round(k) >= 0


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    seed: SeedSpec = field(default_factory=lambda: SeedSpec(20240601))
    n_paths: int = 100_000
    t: float = 1.0
    epsilon_sweep: Tuple[float, ...] = dyadic(3, 8)
    h_sweep: Tuple[float, ...] = dyadic(2, 7)
    n_steps: int = 32
    window_steps: int = 32
    m: int = 2
    alpha: float = 0.5
    workers: Optional[int] = None
    output_dir: Optional[str] = None
    model: Dict[str, float] = field(default_factory=dict)
    tolerances: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "epsilon_sweep", tuple(float(e) for e in self.epsilon_sweep))
        object.__setattr__(self, "h_sweep", tuple(float(h) for h in self.h_sweep))
        object.__setattr__(self, "model", dict(self.model))
        object.__setattr__(self, "tolerances", dict(self.tolerances))

    def validate(self, model_keys=(), check_ids=()) -> "ScenarioConfig":
        """Raise :class:`ParameterError` on any inconsistent field."""
        if self.n_paths < 1:
            raise ParameterError("n_paths must be >= 1")
        if not self.t > 0:
            raise ParameterError("t must be positive")
        if self.n_steps < 1 or self.window_steps < 1:
            raise ParameterError("n_steps and window_steps must be >= 1")
        if self.m < 1:
            raise ParameterError("m must be >= 1")
        if not 0 < self.alpha < 1:
            raise ParameterError("alpha must lie in (0, 1)")
        if self.workers is not None and self.workers < 1:
            raise ParameterError("workers must be >= 1")
        if not self.epsilon_sweep or not self.h_sweep:
            raise ParameterError("sweeps must be non-empty")
        for e in self.epsilon_sweep:
            if not e < self.t:
                raise ParameterError(f"epsilon {e} must be < t = {self.t}")
            if not _is_dyadic(e, self.t):
                raise ParameterError(f"epsilon {e} is not of the form t * 2^-k")
        for h in self.h_sweep:
            if not _is_dyadic(h, 1.0):
                raise ParameterError(f"h {h} is not of the form 2^-k with |h| <= 1")
        unknown = sorted(set(self.model) - set(model_keys))
        if unknown:
            raise ParameterError(f"unknown model parameters {unknown}; known: {sorted(model_keys)}")
        unknown = sorted(set(self.tolerances) - set(check_ids))
        if unknown:
            raise ParameterError(f"unknown tolerance keys {unknown}; known: {sorted(check_ids)}")
        for key, value in self.tolerances.items():
            if not value > 0:
                raise ParameterError(f"tolerance {key} must be positive")
        return self

    def echo(self) -> dict:
        """Plain-data copy of every field, enough to rerun the scenario."""
        return {
            "name": self.name,
            "seed": self.seed.master_seed,
            "stream_id": self.seed.stream_id,
            "n_paths": self.n_paths,
            "t": self.t,
            "epsilon_sweep": list(self.epsilon_sweep),
            "h_sweep": list(self.h_sweep),
            "n_steps": self.n_steps,
            "window_steps": self.window_steps,
            "m": self.m,
            "alpha": self.alpha,
            "model": dict(sorted(self.model.items())),
            "tolerances": dict(sorted(self.tolerances.items())),
        }

    def updated(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)


def _parse_list(raw: str) -> Tuple[float, ...]:
    out = []
    for tok in raw.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if tok.startswith("2^"):
            out.append(2.0 ** float(tok[2:]))
        else:
            out.append(float(tok))
    return tuple(out)


def parse_config_text(text: str, base: ScenarioConfig) -> ScenarioConfig:
    """Apply ``key=value`` lines (``#`` comments, blank lines ignored) to ``base``.

    Unknown keys and malformed values raise :class:`UsageError`.
    """
    changes: dict = {}
    model = dict(base.model)
    tols = dict(base.tolerances)
    seed, stream = base.seed.master_seed, base.seed.stream_id
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"line {lineno}: expected key=value, got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        try:
            if key.startswith("model."):
                model[key[6:]] = float(raw)
            elif key.startswith("tol."):
                tols[key[4:]] = float(raw)
            elif key in ("epsilon_sweep", "h_sweep"):
                changes[key] = _parse_list(raw)
            elif key == "seed":
                seed = int(raw)
            elif key == "stream_id":
                stream = int(raw)
            elif key == "output_dir":
                changes[key] = raw or None
            elif key == "workers":
                changes[key] = int(raw) if raw else None
            elif key in _SCALAR_KEYS:
                changes[key] = _SCALAR_KEYS[key](raw)
            else:
                raise UsageError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, UsageError):
                raise
            raise UsageError(f"line {lineno}: bad value for {key!r}: {raw!r}") from None
    try:
        seed_spec = SeedSpec(seed, stream)
    except ParameterError as exc:
        raise UsageError(str(exc)) from None
    return replace(base, seed=seed_spec, model=model, tolerances=tols, **changes)


def read_config_file(path, base: ScenarioConfig) -> ScenarioConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text, base)
