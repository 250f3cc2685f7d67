"""Square QAM constellations, the QPSK transmit alphabet and symbol detection.

Points of an ``N^2``-QAM constellation with range ``c`` are ordered
row-major: the imaginary level is the outer index, the real level the inner
one, so index ``i = b * N + a`` refers to ``(-c/2 + a d) + 1j (-c/2 + b d)``
with ``d = c / (N - 1)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import InvalidInputError, InvalidParameterError

__all__ = [
    "QPSK_ALPHABET",
    "QamConstellation",
    "build_qam",
    "quantize",
    "quantize_array",
    "symbol_power_moments",
    "avg_neighbor_count",
]

#: One-bit DAC output alphabet, in the fixed tie-breaking order
#: (+1+i), (+1-i), (-1+i), (-1-i), all divided by sqrt(2).
QPSK_ALPHABET = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / math.sqrt(2)


def _check_side(n_side) -> int:
    if isinstance(n_side, bool) or int(n_side) != n_side:
        raise InvalidParameterError(f"n_side must be an integer, got {n_side!r}")
    n_side = int(n_side)
    if n_side < 2 or n_side % 2:
        raise InvalidParameterError(f"n_side must be even and >= 2, got {n_side}")
    return n_side


def _check_range(range_c) -> float:
    range_c = float(range_c)
    if not math.isfinite(range_c) or range_c <= 0:
        raise InvalidParameterError(f"range_c must be positive and finite, got {range_c}")
    return range_c


@dataclass(frozen=True)
class QamConstellation:
    """An ``N^2``-point square QAM grid.

    Attributes
    ----------
    n_side : int
        Number of levels per real dimension (``N``).
    range_c : float
        Full extent of the grid per real dimension.
    min_distance_d : float
        Spacing between adjacent levels, ``c / (N - 1)``.
    points : np.ndarray
        The ``N^2`` complex points in row-major order.
    neighbor_counts : np.ndarray
        Number of minimum-distance neighbours of every point (2, 3 or 4).
    """

    n_side: int
    range_c: float
    min_distance_d: float
    points: np.ndarray = field(repr=False)
    neighbor_counts: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.n_side * self.n_side

    @property
    def levels(self) -> np.ndarray:
        """The ``N`` per-dimension amplitude levels, ascending."""
        return -self.range_c / 2 + self.min_distance_d * np.arange(self.n_side)

    @property
    def max_modulus(self) -> float:
        return self.range_c / math.sqrt(2)


def build_qam(n_side: int, range_c: float) -> QamConstellation:
    """Build the square ``n_side**2``-QAM constellation with range ``range_c``."""
    n_side = _check_side(n_side)
    range_c = _check_range(range_c)
    d = range_c / (n_side - 1)
    levels = -range_c / 2 + d * np.arange(n_side)
    # last level pinned so that the extent equals c exactly
    levels[-1] = range_c / 2
    re, im = np.meshgrid(levels, levels)  # im varies along axis 0 -> row-major (b, a)
    points = (re + 1j * im).ravel()
    points.setflags(write=False)

    per_dim = np.full(n_side, 2)
    per_dim[0] = per_dim[-1] = 1
    counts = (per_dim[None, :] + per_dim[:, None]).ravel()
    counts.setflags(write=False)
    return QamConstellation(n_side, range_c, d, points, counts)


def quantize_array(constellation: QamConstellation, y) -> np.ndarray:
    """Vectorised nearest-point detector; returns symbol indices with the shape of ``y``.

    Exact ties go to the smallest row-major index, i.e. the lower level in
    each real dimension.
    """
    y = np.asarray(y, dtype=complex)
    if not np.all(np.isfinite(y)):
        raise InvalidInputError("received samples must be finite")
    n = constellation.n_side
    d = constellation.min_distance_d
    half = constellation.range_c / 2
    a = np.clip(np.ceil((y.real + half) / d - 0.5), 0, n - 1).astype(np.int64)
    b = np.clip(np.ceil((y.imag + half) / d - 0.5), 0, n - 1).astype(np.int64)
    return b * n + a


def quantize(constellation: QamConstellation, y: complex) -> int:
    """Index of the constellation point nearest to ``y``."""
    return int(quantize_array(constellation, y))


def symbol_power_moments(n_side: int, range_c: float) -> tuple[float, float]:
    """Mean and variance of ``|s|^2`` for ``s`` uniform over the constellation.

    Returns ``(mu_s, sigma_s_sq)`` with ``mu_s = (N+1) c^2 / (6 (N-1))`` and
    ``sigma_s_sq = (N+1)(N^2-4) c^4 / (90 (N-1)^3)``.
    """
    n = _check_side(n_side)
    c = _check_range(range_c)
    mu = (n + 1) / (6 * (n - 1)) * c**2
    var = (n + 1) * (n * n - 4) / (90 * (n - 1) ** 3) * c**4
    return mu, var


def avg_neighbor_count(n_side: int) -> float:
    """Average number of nearest neighbours, ``4 (1 - 1/N)``."""
    if n_side < 2:
        raise InvalidParameterError(f"n_side must be >= 2, got {n_side}")
    return 4.0 * (1.0 - 1.0 / n_side)
