"""Counter-based random sources for Brownian and symmetric stable drivers.

Every variate is a pure function of ``(master_seed, stream_id, lane, position)``.
The generator is Philox4x32-10 (Salmon et al., Random123).  The integer rounds
run in a small numba kernel over whole arrays of (stream, block) counters, so a
path ensemble draws the increments of all its paths for a block of time steps
in one call, and splitting the paths between workers never changes a single
bit of output.  A pure-numpy twin of the kernel is kept for cross-checking.

Counter layout of one Philox block::

    c0 = block index, low 32 bits
    c1 = (lane << 24) | block index bits 32..55
    c2, c3 = stream_id, low / high 32 bits
    key = master_seed, low / high 32 bits

Each block yields four 32-bit words, i.e. two uniforms on a 2^-52 lattice strictly inside (0, 1).
Gaussian variates use the Box-Muller transform on one block (cosine branch
for even positions, sine branch for odd positions).  Stable variates use the
Chambers-Mallows-Stuck transform with one block per variate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import ParameterError

__all__ = [
    "SeedSpec",
    "StableDriverSpec",
    "Stream",
    "make_stream",
    "philox4x32",
    "gaussian_increments",
    "stable_increments",
    "normal_block",
    "stable_block",
    "symmetric_stable_cms",
]

_MASK32 = np.uint64(0xFFFFFFFF)
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_ROUNDS = 10

GAUSSIAN_LANE = 0
STABLE_LANE = 1

_U64_MAX = 2**64 - 1
_MAX_BLOCK = 2**56 - 1


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not 0 <= int(value) <= _U64_MAX:
                raise ParameterError(f"{name} must be an unsigned 64-bit integer, got {value!r}")

    def with_stream(self, stream_id: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, stream_id)


@dataclass(frozen=True)
class StableDriverSpec:
    """Symmetric ``alpha_stable``-stable law with characteristic function
    ``exp(-scale**alpha * |u|**alpha)`` at unit time."""

    alpha_stable: float
    scale: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha_stable <= 2.0:
            raise ParameterError(f"alpha_stable must lie in (0, 2], got {self.alpha_stable}")
        if not self.scale > 0.0:
            raise ParameterError(f"scale must be positive, got {self.scale}")

    def require_levy_regime(self):
        if not self.alpha_stable > 1.0:
            raise ParameterError(
                f"Levy scenarios need alpha_stable > 1, got {self.alpha_stable}"
            )


@dataclass(frozen=True)
class Stream:
    """Immutable handle on one random stream.

    ``offset`` is the position of the first variate handed out; use
    :meth:`advanced` to obtain a handle on a later, non-overlapping segment.
    """

    seed: SeedSpec
    offset: int = 0

    def advanced(self, n: int) -> "Stream":
        return Stream(self.seed, self.offset + int(n))


def make_stream(seed: SeedSpec) -> Stream:
    return Stream(seed)


def _u64(x) -> np.ndarray:
    return np.asarray(x, dtype=np.uint64)


def philox4x32(c0, c1, c2, c3, k0, k1):
    """Philox4x32-10 bijection on broadcastable arrays of 32-bit words.

    Words are carried in ``uint64`` arrays so that the 32x32 -> 64 bit
    products of the round function need no special handling.
    """
    c0, c1, c2, c3, k0, k1 = np.broadcast_arrays(
        _u64(c0), _u64(c1), _u64(c2), _u64(c3), _u64(k0), _u64(k1)
    )
    k0 = k0.copy()
    k1 = k1.copy()
    for r in range(_ROUNDS):
        p0 = _M0 * c0
        p1 = _M1 * c2
        hi0, lo0 = p0 >> np.uint64(32), p0 & _MASK32
        hi1, lo1 = p1 >> np.uint64(32), p1 & _MASK32
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
        if r < _ROUNDS - 1:
            k0 = (k0 + _W0) & _MASK32
            k1 = (k1 + _W1) & _MASK32
    return c0, c1, c2, c3


@numba.njit(cache=True, nogil=True)
def _philox_words(seed, stream_ids, lane, first_block, n_blocks):  # pragma: no cover - jitted
    mask = np.uint64(0xFFFFFFFF)
    s32 = np.uint64(32)
    k0_init = np.uint64(seed) & mask
    k1_init = np.uint64(seed) >> s32
    lane_bits = np.uint64(lane) << np.uint64(24)
    hi = np.empty((stream_ids.size, n_blocks), np.uint64)
    lo = np.empty((stream_ids.size, n_blocks), np.uint64)
    for i in range(stream_ids.size):
        sid = stream_ids[i]
        for j in range(n_blocks):
            b = np.uint64(first_block) + np.uint64(j)
            c0 = b & mask
            c1 = lane_bits | (b >> s32)
            c2 = sid & mask
            c3 = sid >> s32
            k0 = k0_init
            k1 = k1_init
            for _ in range(10):
                p0 = np.uint64(0xD2511F53) * c0
                p1 = np.uint64(0xCD9E8D57) * c2
                n0 = (p1 >> s32) ^ c1 ^ k0
                n2 = (p0 >> s32) ^ c3 ^ k1
                c1 = p1 & mask
                c3 = p0 & mask
                c0 = n0
                c2 = n2
                k0 = (k0 + np.uint64(0x9E3779B9)) & mask
                k1 = (k1 + np.uint64(0xBB67AE85)) & mask
            hi[i, j] = (c0 << s32) | c1
            lo[i, j] = (c2 << s32) | c3
    return hi, lo


def _to_unit(words: np.ndarray) -> np.ndarray:
    # top 52 bits plus a half step: every value lies strictly inside (0, 1)
    return ((words >> np.uint64(12)).astype(np.float64) + 0.5) * 2.0**-52


def _uniform_pairs(master_seed: int, stream_ids, lane: int, first_block: int, n_blocks: int):
    """Two open-interval uniforms per (stream, block) pair, shape (n, n_blocks).

    Blocks ``first_block .. first_block + n_blocks - 1`` are used.
    """
    if first_block + n_blocks - 1 > _MAX_BLOCK:
        raise ParameterError("stream exhausted: block counter exceeds 56 bits")
    stream_ids = np.ascontiguousarray(stream_ids, dtype=np.uint64)
    hi, lo = _philox_words(np.uint64(master_seed), stream_ids, lane, first_block, n_blocks)
    return _to_unit(hi), _to_unit(lo)


def _uniform_pairs_reference(master_seed: int, stream_ids, lane: int, first_block: int, n_blocks: int):
    """Pure-numpy twin of :func:`_uniform_pairs`, used to cross-check the jitted kernel."""
    stream_ids = _u64(stream_ids)[:, None]
    blocks = np.arange(first_block, first_block + n_blocks, dtype=np.uint64)[None, :]
    c0 = blocks & _MASK32
    c1 = (np.uint64(lane) << np.uint64(24)) | (blocks >> np.uint64(32))
    seed = int(master_seed)
    x0, x1, x2, x3 = philox4x32(
        c0, c1, stream_ids & _MASK32, stream_ids >> np.uint64(32), seed & 0xFFFFFFFF, seed >> 32
    )
    shift = np.uint64(32)
    return _to_unit((x0 << shift) | x1), _to_unit((x2 << shift) | x3)


def normal_block(master_seed: int, stream_ids, start: int, count: int) -> np.ndarray:
    """Standard normals at positions ``start .. start+count-1`` of each stream.

    Returns an array of shape ``(len(stream_ids), count)``.
    """
    stream_ids = np.atleast_1d(np.asarray(stream_ids, dtype=np.uint64))
    if count <= 0:
        return np.empty((stream_ids.size, 0))
    first = start // 2
    n_blocks = (start + count - 1) // 2 - first + 1
    u1, u2 = _uniform_pairs(master_seed, stream_ids, GAUSSIAN_LANE, first, n_blocks)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    z = np.empty((stream_ids.size, 2 * n_blocks))
    z[:, 0::2] = radius * np.cos(angle)
    z[:, 1::2] = radius * np.sin(angle)
    lead = start - 2 * first
    return z[:, lead:lead + count]


def symmetric_stable_cms(alpha: float, u1, u2) -> np.ndarray:
    """Chambers-Mallows-Stuck map from two uniforms to a standard symmetric
    stable variate (characteristic function ``exp(-|u|**alpha)``)."""
    v = np.pi * (u1 - 0.5)
    w = -np.log(u2)
    if alpha == 1.0:
        return np.tan(v)
    if alpha == 2.0:
        # limit of the general formula; avoids 0 * inf at the endpoints
        return 2.0 * np.sin(v) * np.sqrt(w)
    return (np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha)) * (
        np.cos(v - alpha * v) / w
    ) ** ((1.0 - alpha) / alpha)


def stable_block(master_seed: int, stream_ids, start: int, count: int, alpha: float) -> np.ndarray:
    """Standard symmetric stable variates at positions ``start ..`` of each stream."""
    stream_ids = np.atleast_1d(np.asarray(stream_ids, dtype=np.uint64))
    if count <= 0:
        return np.empty((stream_ids.size, 0))
    u1, u2 = _uniform_pairs(master_seed, stream_ids, STABLE_LANE, start, count)
    return symmetric_stable_cms(alpha, u1, u2)


def gaussian_increments(stream: Stream, n: int, dim: int, dt: float) -> np.ndarray:
    """``n`` i.i.d. rows distributed as N(0, dt I_dim), drawn row-major."""
    if not dt > 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    if n < 0 or dim < 1:
        raise ParameterError("need n >= 0 and dim >= 1")
    z = normal_block(stream.seed.master_seed, [stream.seed.stream_id], stream.offset, n * dim)
    return np.sqrt(dt) * z[0].reshape(n, dim)


def stable_increments(stream: Stream, n: int, spec: StableDriverSpec, dt: float) -> np.ndarray:
    """``n`` i.i.d. increments of a symmetric stable process over time ``dt``."""
    if not isinstance(spec, StableDriverSpec):
        raise ParameterError("spec must be a StableDriverSpec")
    if not dt > 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    if n < 0:
        raise ParameterError("n must be non-negative")
    s = stable_block(stream.seed.master_seed, [stream.seed.stream_id], stream.offset, n, spec.alpha_stable)
    return spec.scale * dt ** (1.0 / spec.alpha_stable) * s[0]
