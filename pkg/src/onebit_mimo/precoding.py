"""Transmit-signal designs.

Single-user functions take the channel vector ``h``; multi-user functions
take ``H`` of shape ``(K, M)`` whose rows are ``h_k^H``. In both cases the
noiseless receive signal is ``sqrt(P/M) h^H x`` (resp. ``sqrt(P/M) H x``)
for a normalised transmit word ``x`` with ``||x||_2^2 <= M``.

One-bit words are carried as alphabet indices into
:data:`~onebit_mimo.constellation.QPSK_ALPHABET`.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from . import _kernels
from .constellation import QPSK_ALPHABET
from .errors import (
    ComplexityCapError,
    DegenerateChannelError,
    InfeasibleError,
    InvalidParameterError,
    SingularChannelError,
)

__all__ = [
    "DEFAULT_M2",
    "MAX_M2",
    "ORACLE_MAX_M",
    "ZF_MAX_CONDITION",
    "PrecodeOutcome",
    "noiseless_receive",
    "precode_inf_total",
    "precode_inf_per_antenna",
    "precode_zf",
    "precode_quantized_zf",
    "precode_one_bit_single",
    "precode_one_bit_multi",
    "one_bit_batch",
    "oracle_exhaustive",
    "all_receive_points",
    "one_bit_word",
]

DEFAULT_M2 = 8
MAX_M2 = 16
ORACLE_MAX_M = 12
ZF_MAX_CONDITION = 1e12


@dataclass(frozen=True)
class PrecodeOutcome:
    """Result of one precoding call.

    ``signal`` is the normalised transmit word ``x``; for one-bit designs
    ``indices`` holds the alphabet indices and ``signal == QPSK_ALPHABET[indices]``.
    ``residual_inf`` / ``residual_l2`` are the inf- and 2-norms of
    ``noiseless_rx - s``. ``power`` is ``||x||_2^2``; ``power_violated`` is
    only meaningful for ZF (``True`` when the unconstrained solution needed
    more than ``M``).
    """

    signal: np.ndarray
    target: np.ndarray
    noiseless_rx: np.ndarray
    residual_inf: float
    residual_l2: float
    indices: np.ndarray | None = None
    power: float = float("nan")
    power_violated: bool = False
    greedy_order: np.ndarray | None = None

    @property
    def residual(self) -> np.ndarray:
        return self.noiseless_rx - self.target

    @property
    def is_one_bit(self) -> bool:
        return self.indices is not None


def _as_row_matrix(H) -> np.ndarray:
    H = np.asarray(H, dtype=complex)
    if H.ndim == 1:
        H = H[None, :]
    if H.ndim != 2 or H.shape[1] == 0:
        raise InvalidParameterError(f"channel must be a (K, M) array, got shape {H.shape}")
    return H


def _single_row(h) -> np.ndarray:
    h = np.asarray(h, dtype=complex).ravel()
    if h.size == 0:
        raise InvalidParameterError("channel vector must be non-empty")
    if not np.any(h):
        raise DegenerateChannelError("channel vector is zero")
    return h.conj()[None, :]


def _check_power(p):
    if not p > 0:
        raise InvalidParameterError(f"power must be positive, got {p}")


def noiseless_receive(H, x, p: float) -> np.ndarray:
    """``sqrt(P/M) H x`` for a ``(K, M)`` channel (a 1-D ``H`` is one row ``h^H``)."""
    H = _as_row_matrix(H)
    x = np.asarray(x, dtype=complex)
    if x.shape[-1] != H.shape[1]:
        raise InvalidParameterError(f"word length {x.shape[-1]} does not match M={H.shape[1]}")
    return math.sqrt(p / H.shape[1]) * (x @ H.T)


def _outcome(H, x, s, p, **extra) -> PrecodeOutcome:
    rx = noiseless_receive(H, x, p)
    err = np.abs(rx - s)
    extra.setdefault("power", float(np.sum(np.abs(x) ** 2)))
    return PrecodeOutcome(
        signal=x,
        target=np.asarray(s, dtype=complex),
        noiseless_rx=rx,
        residual_inf=float(err.max()),
        residual_l2=float(np.sqrt(np.sum(err**2))),
        **extra,
    )


def one_bit_word(indices) -> np.ndarray:
    """Map alphabet indices to the normalised one-bit transmit word."""
    return QPSK_ALPHABET[np.asarray(indices, dtype=np.int64)]


# -- infinite resolution ---------------------------------------------------

def precode_inf_total(h, s: complex, p: float) -> PrecodeOutcome:
    """Matched-filter precoder under the per-symbol total power constraint.

    ``x = sqrt(M) h / ||h|| * min(1, |s| / (sqrt(P) ||h||)) * exp(1j angle(s))``;
    the residual is ``max(0, |s| - sqrt(P) ||h||)``.
    """
    _check_power(p)
    row = _single_row(h)
    hv = row.conj().ravel()
    m = hv.size
    norm = np.linalg.norm(hv)
    scale = min(1.0, abs(s) / (math.sqrt(p) * norm))
    x = math.sqrt(m) * hv / norm * scale * np.exp(1j * np.angle(s))
    return _outcome(row, x, np.array([s]), p)


def precode_inf_per_antenna(h, s: complex, p: float) -> PrecodeOutcome:
    """Phase-aligned precoder under ``|x_m| <= 1``.

    Every antenna uses the same amplitude ``min(sqrt(M/P) |s| / ||h||_1, 1)``;
    ``s`` is reached exactly iff ``|s| <= sqrt(P/M) ||h||_1``.
    """
    _check_power(p)
    row = _single_row(h)
    hv = row.conj().ravel()
    m = hv.size
    l1 = np.sum(np.abs(hv))
    amp = min(math.sqrt(m / p) * abs(s) / l1, 1.0)
    x = amp * np.exp(1j * (np.angle(hv) + np.angle(s)))
    return _outcome(row, x, np.array([s]), p)


def _zf_solution(H, s_vec, p):
    k, m = H.shape
    if k > m:
        raise InfeasibleError(f"zero-forcing needs K <= M, got K={k}, M={m}")
    gram = H @ H.conj().T
    cond = np.linalg.cond(gram)
    if not cond <= ZF_MAX_CONDITION:
        raise SingularChannelError(f"H H^H condition number {cond:.3g} exceeds {ZF_MAX_CONDITION:g}")
    coef = np.linalg.solve(gram, np.asarray(s_vec, dtype=complex).T)
    return math.sqrt(m / p) * (H.conj().T @ coef).T


def precode_zf(H, s_vec, p: float, enforce_power: bool = False) -> PrecodeOutcome:
    """Zero-forcing ``x = sqrt(M/P) H^H (H H^H)^{-1} s``.

    ``power_violated`` flags ``||x||^2 > M``. With ``enforce_power`` the word
    is scaled back onto the sphere ``||x||^2 = M`` in that case, which leaves
    a residual proportional to ``s``.
    """
    _check_power(p)
    H = _as_row_matrix(H)
    s_vec = np.atleast_1d(np.asarray(s_vec, dtype=complex))
    if s_vec.shape != (H.shape[0],):
        raise InvalidParameterError(f"expected {H.shape[0]} symbols, got shape {s_vec.shape}")
    x = _zf_solution(H, s_vec, p)
    m = H.shape[1]
    power = float(np.sum(np.abs(x) ** 2))
    violated = power > m
    if enforce_power and violated:
        x = x * math.sqrt(m / power)
    return _outcome(H, x, s_vec, p, power=power, power_violated=violated)


def precode_quantized_zf(H, s_vec, p: float) -> PrecodeOutcome:
    """Linear-quantised baseline: the one-bit sign pattern of the ZF word."""
    _check_power(p)
    H = _as_row_matrix(H)
    s_vec = np.atleast_1d(np.asarray(s_vec, dtype=complex))
    x_zf = _zf_solution(H, s_vec, p)
    idx = 2 * (x_zf.real < 0) + (x_zf.imag < 0)
    return _outcome(H, one_bit_word(idx), s_vec, p, indices=idx.astype(np.int64))


# -- one-bit two-step precoder ----------------------------------------------

def _check_m2(m2, m):
    if int(m2) != m2 or m2 < 0:
        raise InvalidParameterError(f"m2 must be a non-negative integer, got {m2}")
    if m2 > MAX_M2:
        raise ComplexityCapError(f"m2={m2} exceeds the exhaustive-search cap {MAX_M2}")
    if m2 > m:
        raise InvalidParameterError(f"m2={m2} exceeds the number of antennas M={m}")
    return int(m2)


def _two_step(H, s_vec, p, m2) -> PrecodeOutcome:
    k, m = H.shape
    m2 = _check_m2(m2, m)
    hcols = np.ascontiguousarray(H.T)
    col_norm2 = np.sum(np.abs(hcols) ** 2, axis=1)
    x_idx = np.zeros(m, dtype=np.int64)
    order_j = np.zeros(m, dtype=np.int64)
    order_x = np.zeros(m, dtype=np.int64)
    _kernels.two_step(hcols, col_norm2, s_vec.astype(complex), math.sqrt(p / m), m2, True,
                      x_idx, order_j, order_x)
    order = np.stack([order_j[: m - m2], order_x[: m - m2]], axis=1)
    return _outcome(H, one_bit_word(x_idx), s_vec, p, indices=x_idx, greedy_order=order)


def precode_one_bit_single(h, s: complex, p: float, m2: int = DEFAULT_M2) -> PrecodeOutcome:
    """Single-user two-step one-bit precoder.

    Step 1 greedily assigns ``M - m2`` antennas, each time picking the
    (antenna, symbol) pair that brings the residual closest to zero; step 2
    exhaustively searches the remaining ``m2`` antennas. Ties go to the
    smallest antenna index, then the smallest alphabet index. ``m2 = 0``
    skips step 2.
    """
    _check_power(p)
    row = _single_row(h)
    return _two_step(row, np.array([s], dtype=complex), p, m2)


def precode_one_bit_multi(H, s_vec, p: float, m2: int = DEFAULT_M2) -> PrecodeOutcome:
    """Multi-user two-step one-bit precoder.

    The greedy step minimises the 2-norm of the residual symbol vector, the
    exhaustive step its inf-norm (the worst user's error). For ``K = 1`` the
    result coincides with :func:`precode_one_bit_single`.
    """
    _check_power(p)
    H = _as_row_matrix(H)
    if not np.any(H):
        raise DegenerateChannelError("channel matrix is zero")
    s_vec = np.atleast_1d(np.asarray(s_vec, dtype=complex))
    if s_vec.shape != (H.shape[0],):
        raise InvalidParameterError(f"expected {H.shape[0]} symbols, got shape {s_vec.shape}")
    return _two_step(H, s_vec, p, m2)


def one_bit_batch(H, s_batch, p: float, m2: int = DEFAULT_M2) -> np.ndarray:
    """Two-step precoder for many symbol vectors over one channel.

    ``s_batch`` has shape ``(T, K)``; returns ``(T, M)`` alphabet indices,
    identical row by row to :func:`precode_one_bit_multi`.
    """
    _check_power(p)
    H = _as_row_matrix(H)
    m = H.shape[1]
    m2 = _check_m2(m2, m)
    s_batch = np.ascontiguousarray(np.asarray(s_batch, dtype=complex).reshape(-1, H.shape[0]))
    hcols = np.ascontiguousarray(H.T)
    return _kernels.two_step_batch(hcols, s_batch, math.sqrt(p / m), m2, True).astype(np.int64)


# -- exhaustive oracle -------------------------------------------------------

def _all_words(m, start, stop):
    codes = np.arange(start, stop, dtype=np.int64)
    powers = 4 ** np.arange(m - 1, -1, -1, dtype=np.int64)
    return (codes[:, None] // powers[None, :]) % 4


def all_receive_points(H, p: float, chunk: int = 4**8):
    """Yield ``(code_offset, points)`` with the noiseless receive points of all
    ``4**M`` one-bit words, in lexicographic word order (antenna 0 most significant)."""
    H = _as_row_matrix(H)
    k, m = H.shape
    if m > ORACLE_MAX_M:
        raise ComplexityCapError(f"exhaustive enumeration capped at M={ORACLE_MAX_M}, got M={m}")
    total = 4**m
    g = math.sqrt(p / m)
    for start in range(0, total, chunk):
        words = QPSK_ALPHABET[_all_words(m, start, min(start + chunk, total))]
        yield start, g * (words @ H.T)


def oracle_exhaustive(H, s_vec, p: float, norm: str = "inf") -> PrecodeOutcome:
    """Global minimiser of ``||sqrt(P/M) H x - s||`` over all ``x`` in ``X^M``.

    ``norm`` is ``"inf"`` or ``"l2"``. Ties go to the lexicographically
    smallest index sequence. ``M`` is capped at 12.
    """
    _check_power(p)
    H = _as_row_matrix(H)
    s_vec = np.atleast_1d(np.asarray(s_vec, dtype=complex))
    if norm not in ("inf", "l2"):
        raise InvalidParameterError(f"norm must be 'inf' or 'l2', got {norm!r}")
    best_cost = np.inf
    best_code = -1
    for start, pts in all_receive_points(H, p):
        err2 = np.abs(pts - s_vec[None, :]) ** 2
        cost = err2.max(axis=1) if norm == "inf" else err2.sum(axis=1)
        i = int(np.argmin(cost))
        if cost[i] < best_cost:
            best_cost = cost[i]
            best_code = start + i
    idx = _all_words(H.shape[1], best_code, best_code + 1)[0]
    return _outcome(H, one_bit_word(idx), s_vec, p, indices=idx)
