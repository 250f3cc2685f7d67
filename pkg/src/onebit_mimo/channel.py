"""Seeded i.i.d. Rayleigh channels and complex AWGN.

Randomness is keyed by ``(master_seed, purpose, trial)`` through numpy's
``SeedSequence`` spawn keys, so every Monte Carlo trial owns an independent
stream regardless of how trials are scheduled across workers.

A channel matrix is a ``(K, M)`` complex array whose row ``k`` is
``h_k^H``; the noiseless receive signal is ``sqrt(P/M) * H @ x``.
"""
from __future__ import annotations

from dataclasses import dataclass
import math
import zlib

import numpy as np

from .errors import InvalidParameterError

__all__ = ["SeedSpec", "generate_channel", "sample_noise", "standard_complex_normal", "channel_norms"]

_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class SeedSpec:
    """Label of one reproducible random stream."""

    master_seed: int
    purpose: str = "default"
    trial: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master_seed) <= _UINT64_MAX:
            raise InvalidParameterError("master_seed must be a 64-bit unsigned integer")
        if int(self.trial) < 0:
            raise InvalidParameterError("trial index must be non-negative")

    def generator(self) -> np.random.Generator:
        tag = zlib.crc32(self.purpose.encode("utf-8"))
        seq = np.random.SeedSequence(int(self.master_seed), spawn_key=(tag, int(self.trial)))
        return np.random.Generator(np.random.PCG64(seq))

    def child(self, purpose: str, trial: int | None = None) -> "SeedSpec":
        return SeedSpec(self.master_seed, purpose, self.trial if trial is None else trial)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, SeedSpec):
        return seed.generator()
    if isinstance(seed, np.random.Generator):
        return seed
    return SeedSpec(int(seed)).generator()


def standard_complex_normal(shape, seed) -> np.ndarray:
    """Complex samples with unit variance per real dimension."""
    rng = _rng(seed)
    z = rng.standard_normal(tuple(np.atleast_1d(shape)) + (2,))
    return z[..., 0] + 1j * z[..., 1]


def generate_channel(k_users: int, m_antennas: int, seed) -> np.ndarray:
    """Draw a ``(K, M)`` channel with i.i.d. CN(0, 1) entries.

    ``seed`` is a :class:`SeedSpec` (or a plain integer, meaning
    ``SeedSpec(seed)``).
    """
    if k_users < 1 or m_antennas < 1:
        raise InvalidParameterError(f"channel dimensions must be positive, got {k_users}x{m_antennas}")
    return standard_complex_normal((k_users, m_antennas), seed) / math.sqrt(2)


def sample_noise(sigma: float, count: int, seed) -> np.ndarray:
    """``count`` samples of CN(0, 2 sigma^2) noise (variance sigma^2 per real dimension)."""
    if not sigma >= 0:
        raise InvalidParameterError(f"sigma must be non-negative, got {sigma}")
    if count < 0:
        raise InvalidParameterError("count must be non-negative")
    return sigma * standard_complex_normal(count, seed)


def channel_norms(h) -> tuple[float, float]:
    """``(||h||_1, ||h||_2)`` of one channel row."""
    h = np.asarray(h, dtype=complex).ravel()
    if h.size == 0:
        raise InvalidParameterError("channel row must be non-empty")
    mag = np.abs(h)
    scale = mag.max()
    if scale == 0:
        return 0.0, 0.0
    # rescale so tiny or huge entries do not under/overflow when squared
    return float(mag.sum()), float(scale * np.sqrt(np.sum((mag / scale) ** 2)))
