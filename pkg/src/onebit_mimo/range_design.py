"""Constellation range rules for infinite-resolution and one-bit precoding.

All single-user rules take the channel vector ``h`` (the receive signal is
``sqrt(P/M) h^H x``); with ``asymptotic=True`` the channel-hardened forms
``||h||_2 ~ sqrt(M)`` and ``||h||_1 ~ sqrt(pi/4) M`` are used and only
``len(h)`` matters.

The multi-user rules rely on a central-limit argument over the users and
are loose for ``K < 4``.
"""
from __future__ import annotations

from enum import Enum
import math

import numpy as np

from .channel import channel_norms
from .constellation import _check_side
from .errors import DegenerateChannelError, InvalidParameterError

__all__ = [
    "ONE_BIT_FACTOR",
    "PER_ANTENNA_FACTOR",
    "RangeRule",
    "range_inf_total",
    "range_inf_per_antenna",
    "range_one_bit_single",
    "load_factor_f",
    "range_zf_multi",
    "range_one_bit_multi",
    "range_for_rule",
    "lambda_param",
    "lambda_param_multi",
    "gamma_param",
    "INFINITY",
    "approximation_ratio",
]

#: Range reduction of one-bit precoding relative to total-power precoding.
ONE_BIT_FACTOR = math.sqrt(2 / math.pi)
#: Asymptotic ratio of the per-antenna to the total-power range.
PER_ANTENNA_FACTOR = math.sqrt(math.pi / 4)


class RangeRule(Enum):
    INF_TOTAL_POWER = "inf_total"
    INF_PER_ANTENNA = "inf_per_antenna"
    ZF_MULTI_USER = "zf"
    ONE_BIT_SINGLE = "onebit_single"
    ONE_BIT_MULTI = "onebit_multi"


def _check_power(p):
    if not p > 0:
        raise InvalidParameterError(f"power must be positive, got {p}")


def _norms(h, asymptotic):
    h = np.asarray(h, dtype=complex).ravel()
    m = h.size
    if m == 0:
        raise InvalidParameterError("channel must be non-empty")
    if asymptotic:
        return math.sqrt(math.pi / 4) * m, math.sqrt(m), m
    l1, l2 = channel_norms(h)
    if l2 == 0:
        raise DegenerateChannelError("channel vector is zero")
    return l1, l2, m


def range_inf_total(p: float, h, asymptotic: bool = False) -> float:
    """``sqrt(2P) ||h||_2`` (or ``sqrt(2PM)`` when asymptotic)."""
    _check_power(p)
    _, l2, _ = _norms(h, asymptotic)
    return math.sqrt(2 * p) * l2


def range_inf_per_antenna(p: float, h, asymptotic: bool = False) -> float:
    """``sqrt(2P/M) ||h||_1`` (or ``sqrt(pi/4) sqrt(2PM)`` when asymptotic)."""
    _check_power(p)
    l1, _, m = _norms(h, asymptotic)
    return math.sqrt(2 * p / m) * l1


def range_one_bit_single(p: float, h, asymptotic: bool = False) -> float:
    """Single-user one-bit range, ``sqrt(2/pi)`` times :func:`range_inf_total`."""
    return ONE_BIT_FACTOR * range_inf_total(p, h, asymptotic)


def load_factor_f(k_users: int, n_side: int, kappa: float = 2.0) -> float:
    """Multi-user load factor ``f(K, N)``.

    ``f * c^2 / 2 = K mu_s + kappa sqrt(K) sigma_s``: the summed symbol power
    of ``K`` users sits ``kappa`` standard deviations below the budget.
    """
    if k_users < 1:
        raise InvalidParameterError(f"k_users must be >= 1, got {k_users}")
    if kappa < 0:
        raise InvalidParameterError("kappa must be non-negative")
    n = _check_side(n_side)
    mean_term = k_users * (n + 1) / (3 * (n - 1))
    std_term = kappa * math.sqrt(k_users * (n + 1) * (n * n - 4) / (22.5 * (n - 1) ** 3))
    return mean_term + std_term


def range_zf_multi(p: float, m_antennas: int, k_users: int, n_side: int, kappa: float = 2.0) -> float:
    """ZF range with per-symbol power constraint, ``sqrt(2PM / f(K, N))``."""
    _check_power(p)
    if m_antennas < 1:
        raise InvalidParameterError("m_antennas must be >= 1")
    return math.sqrt(2 * p * m_antennas / load_factor_f(k_users, n_side, kappa))


def range_one_bit_multi(p: float, m_antennas: int, k_users: int, n_side: int, kappa: float = 2.0) -> float:
    return ONE_BIT_FACTOR * range_zf_multi(p, m_antennas, k_users, n_side, kappa)


def range_for_rule(rule: RangeRule, p: float, *, h=None, m_antennas=None, k_users=1, n_side=4,
                   asymptotic=False, kappa=2.0) -> float:
    """Dispatch on :class:`RangeRule`; single-user rules need ``h``, multi-user ones ``m_antennas``."""
    rule = RangeRule(rule)
    if rule is RangeRule.INF_TOTAL_POWER:
        return range_inf_total(p, h, asymptotic)
    if rule is RangeRule.INF_PER_ANTENNA:
        return range_inf_per_antenna(p, h, asymptotic)
    if rule is RangeRule.ONE_BIT_SINGLE:
        return range_one_bit_single(p, h, asymptotic)
    if m_antennas is None:
        m_antennas = np.asarray(h).size
    if rule is RangeRule.ZF_MULTI_USER:
        return range_zf_multi(p, m_antennas, k_users, n_side, kappa)
    return range_one_bit_multi(p, m_antennas, k_users, n_side, kappa)


def lambda_param(c: float, reference_range: float) -> float:
    """Normalised range ``c / reference_range``."""
    if not reference_range > 0:
        raise InvalidParameterError("reference range must be positive")
    return c / reference_range


def lambda_param_multi(c: float, p: float, m_antennas: int, k_users: int, n_side: int,
                       kappa: float = 2.0) -> float:
    """``c / sqrt(2PM / f(K, N))``."""
    return lambda_param(c, range_zf_multi(p, m_antennas, k_users, n_side, kappa))


def gamma_param(s: complex, p: float, h) -> float:
    """``|s| / (sqrt(P) ||h||_2)``: symbol magnitude relative to the reachable radius."""
    _check_power(p)
    _, l2, _ = _norms(h, False)
    return abs(s) / (math.sqrt(p) * l2)


INFINITY = math.inf


def approximation_ratio(q) -> float:
    """SDP randomisation constant alpha_q for the q-th roots of unity.

    ``q = math.inf`` returns the limit pi/4.
    """
    if q == math.inf:
        return math.pi / 4
    if int(q) != q or q < 2:
        raise InvalidParameterError(f"q must be an integer >= 2 or infinity, got {q}")
    q = int(q)
    if q == 2:
        return 2 / math.pi
    return q * q * 2 * math.sin(math.pi / q) ** 2 / (8 * math.pi)  # 1 - cos(2t) = 2 sin(t)^2
