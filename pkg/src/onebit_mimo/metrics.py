"""Analytic error-rate expressions for symbol-level precoding with QAM."""
from __future__ import annotations

from enum import Enum
import math

import numpy as np
from scipy.special import erfc

from .constellation import QamConstellation, avg_neighbor_count
from .errors import InvalidParameterError
from .range_design import ONE_BIT_FACTOR, load_factor_f

__all__ = [
    "Scheme",
    "q_function",
    "q_approx",
    "pairwise_error_prob",
    "ser_upper_bound",
    "ser_nearest_neighbor",
    "analytic_ser",
    "analytic_min_distance",
    "power_gap_db",
    "antenna_factor",
    "max_side_for_mse",
    "snr_db_to_sigma",
    "sigma_to_snr_db",
]


class Scheme(Enum):
    ZF_INFINITE = "zf"
    ONE_BIT = "onebit"


def q_function(u):
    """Gaussian tail probability ``Q(u) = erfc(u / sqrt(2)) / 2``."""
    out = 0.5 * erfc(np.asarray(u, dtype=float) / math.sqrt(2))
    return float(out) if np.ndim(out) == 0 else out


def q_approx(u):
    """Two-exponential surrogate ``exp(-u^2/2)/12 + exp(-2u^2/3)/4`` for ``u >= 0``.

    Only used to reason about which symbols dominate the error rate; never
    used for predictions.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise InvalidParameterError("q_approx is defined for u >= 0")
    out = np.exp(-(u**2) / 2) / 12 + np.exp(-2 * u**2 / 3) / 4
    return float(out) if np.ndim(out) == 0 else out


def pairwise_error_prob(s_hat_i: complex, s_i: complex, s_j: complex, sigma: float) -> float:
    """Probability that ``s_hat_i + z`` is closer to ``s_j`` than to ``s_i``.

    ``z ~ CN(0, 2 sigma^2)``; equals ``Q((|s_hat_i - s_j|^2 - |s_hat_i - s_i|^2) / (2 |s_i - s_j| sigma))``.
    """
    if not sigma > 0:
        raise InvalidParameterError("sigma must be positive")
    d_ij = abs(s_i - s_j)
    if d_ij == 0:
        raise InvalidParameterError("s_i and s_j must differ")
    num = abs(s_hat_i - s_j) ** 2 - abs(s_hat_i - s_i) ** 2
    return q_function(num / (2 * d_ij * sigma))


def _clip01(x):
    return float(min(max(x, 0.0), 1.0))


def ser_upper_bound(constellation: QamConstellation, dhat_ii, sigma: float) -> float:
    """``sum_i g_i / N^2 Q((d - 2 dhat_ii) / (2 sigma))``, clipped to [0, 1].

    ``dhat_ii[i]`` is the distance between the noiseless receive point for
    symbol ``i`` and the symbol itself.
    """
    dhat = np.asarray(dhat_ii, dtype=float).ravel()
    if dhat.size != constellation.size:
        raise InvalidParameterError(f"expected {constellation.size} distortions, got {dhat.size}")
    if np.any(dhat < 0):
        raise InvalidParameterError("distortions must be non-negative")
    if not sigma > 0:
        raise InvalidParameterError("sigma must be positive")
    g = constellation.neighbor_counts
    terms = g * q_function((constellation.min_distance_d - 2 * dhat) / (2 * sigma))
    return _clip01(np.sum(terms) / constellation.size)


def ser_nearest_neighbor(constellation: QamConstellation, s_hat, sigma: float) -> float:
    """Nearest-neighbour pairwise-error approximation of the SER.

    ``s_hat[i]`` is the noiseless receive point when symbol ``i`` is sent;
    sums :func:`pairwise_error_prob` over the minimum-distance neighbours of
    each symbol and averages over symbols.
    """
    s_hat = np.asarray(s_hat, dtype=complex).ravel()
    pts = constellation.points
    if s_hat.size != pts.size:
        raise InvalidParameterError(f"expected {pts.size} receive points, got {s_hat.size}")
    n = constellation.n_side
    total = 0.0
    for i in range(pts.size):
        b, a = divmod(i, n)
        for db, da in ((0, 1), (0, -1), (1, 0), (-1, 0)):
            if 0 <= a + da < n and 0 <= b + db < n:
                j = (b + db) * n + a + da
                total += pairwise_error_prob(s_hat[i], pts[i], pts[j], sigma)
    return _clip01(total / pts.size)


def analytic_ser(n_side: int, min_distance, sigma):
    """``g_N Q(d / (2 sigma))`` with ``g_N = 4 (1 - 1/N)``, clipped to [0, 1]."""
    g = avg_neighbor_count(n_side)
    sigma = np.asarray(sigma, dtype=float)
    with np.errstate(divide="ignore"):
        arg = np.where(sigma > 0, np.asarray(min_distance, dtype=float) / (2 * np.where(sigma > 0, sigma, 1)), np.inf)
    out = np.clip(g * q_function(arg), 0.0, 1.0)
    return float(out) if np.ndim(out) == 0 else out


def analytic_min_distance(p: float, m_antennas: int, k_users: int, n_side: int,
                          scheme: Scheme | str = Scheme.ZF_INFINITE, kappa: float = 2.0) -> float:
    """Designed minimum distance ``sqrt(2PM / ((N-1)^2 f(K, N)))``, times ``sqrt(2/pi)`` for one-bit."""
    if not p > 0 or m_antennas < 1:
        raise InvalidParameterError("power and antenna count must be positive")
    scheme = Scheme(scheme)
    f_tilde = (n_side - 1) ** 2 * load_factor_f(k_users, n_side, kappa)
    d = math.sqrt(2 * p * m_antennas / f_tilde)
    return d * ONE_BIT_FACTOR if scheme is Scheme.ONE_BIT else d


def power_gap_db() -> float:
    """Extra power one-bit precoding needs for the same SER: ``10 log10(pi/2)`` dB."""
    return 10 * math.log10(math.pi / 2)


def antenna_factor() -> float:
    """Antenna-count multiplier for one-bit precoding to match infinite resolution."""
    return math.pi / 2


def max_side_for_mse(m_antennas: int) -> float:
    """Largest ``N`` for which a precoding MSE of ``1e-5 P`` stays negligible: ``17.9 sqrt(M) + 1``."""
    if m_antennas < 1:
        raise InvalidParameterError("m_antennas must be >= 1")
    return 17.9 * math.sqrt(m_antennas) + 1


def snr_db_to_sigma(snr_db, p: float):
    """Per-dimension noise std for ``SNR = 10 log10(P / (2 sigma^2))``."""
    out = np.sqrt(p / (2 * 10 ** (np.asarray(snr_db, dtype=float) / 10)))
    return float(out) if np.ndim(out) == 0 else out


def sigma_to_snr_db(sigma, p: float):
    out = 10 * np.log10(p / (2 * np.asarray(sigma, dtype=float) ** 2))
    return float(out) if np.ndim(out) == 0 else out
