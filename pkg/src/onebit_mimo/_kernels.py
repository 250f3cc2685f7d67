"""Compiled inner loops of the two-step one-bit precoder.

Alphabet indices follow ``constellation.QPSK_ALPHABET``: index
``2 * (Re x < 0) + (Im x < 0)``.
"""
import math

import numba as nb
import numpy as np

_SQRT2 = math.sqrt(2.0)
_ALPHABET = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / math.sqrt(2.0)


@nb.njit(cache=True)
def greedy_step(hcols, col_norm2, s, g, m1, used, x_idx, order_j, order_x):
    """Assign ``m1`` antennas one at a time, each time taking the (antenna, symbol)
    pair that minimises ``||s_r - g h_j x||_2``. Returns the final residual.

    For fixed ``j`` the best ``x`` is the sign pattern of ``w = h_j^H s_r``,
    and the squared residual is ``||s_r||^2 + g^2 ||h_j||^2 - sqrt(2) g (|Re w| + |Im w|)``.
    """
    m, k_users = hcols.shape
    s_r = s.copy()
    for it in range(m1):
        best = np.inf
        best_j = -1
        best_w = 0j
        for j in range(m):
            if used[j]:
                continue
            w = 0j
            for k in range(k_users):
                w += np.conj(hcols[j, k]) * s_r[k]
            cost = g * g * col_norm2[j] - _SQRT2 * g * (abs(w.real) + abs(w.imag))
            if cost < best:
                best = cost
                best_j = j
                best_w = w
        xi = 0
        if best_w.real < 0:
            xi += 2
        if best_w.imag < 0:
            xi += 1
        used[best_j] = True
        x_idx[best_j] = xi
        order_j[it] = best_j
        order_x[it] = xi
        xv = _ALPHABET[xi]
        for k in range(k_users):
            s_r[k] -= g * hcols[best_j, k] * xv
    return s_r


@nb.njit(cache=True)
def exhaustive_step(vals, target, use_inf, best_digits):
    """Search all ``4**L`` choices for the ``L`` remaining antennas.

    ``vals[l, x]`` is the receive contribution of antenna ``l`` sending symbol
    ``x``. Completions are visited in lexicographic order (antenna 0 most
    significant) and only a strictly better cost replaces the incumbent, so the
    lexicographically smallest minimiser wins. The last (up to) three levels
    are tabulated once; the leading levels run as an odometer whose partial
    sums are recomputed only below the digit that changed.
    Returns the squared cost (inf-norm or 2-norm of ``target - sum``).
    """
    n_lvl, _, k_users = vals.shape
    n_tail = min(n_lvl, 3)
    n_head = n_lvl - n_tail
    n_comb = 4 ** n_tail
    tail = np.zeros((n_comb, k_users), dtype=np.complex128)
    for c in range(n_comb):
        rem = c
        for lvl in range(n_lvl - 1, n_head - 1, -1):
            xi = rem % 4
            rem //= 4
            for k in range(k_users):
                tail[c, k] += vals[lvl, xi, k]

    partial = np.empty((n_head + 1, k_users), dtype=np.complex128)
    for k in range(k_users):
        partial[0, k] = target[k]
    digits = np.zeros(n_head, dtype=np.int64)
    for lvl in range(n_head):
        for k in range(k_users):
            partial[lvl + 1, k] = partial[lvl, k] - vals[lvl, 0, k]
    best = np.inf
    best_prefix = 0
    best_tail = 0
    prefix = 0
    while True:
        for c in range(n_comb):
            cost = 0.0
            for k in range(k_users):
                r = partial[n_head, k] - tail[c, k]
                a = r.real * r.real + r.imag * r.imag
                if use_inf:
                    if a > cost:
                        cost = a
                else:
                    cost += a
            if cost < best:
                best = cost
                best_prefix = prefix
                best_tail = c
        lvl = n_head - 1
        while lvl >= 0 and digits[lvl] == 3:
            digits[lvl] = 0
            lvl -= 1
        if lvl < 0:
            break
        digits[lvl] += 1
        prefix += 1
        for ll in range(lvl, n_head):
            for k in range(k_users):
                partial[ll + 1, k] = partial[ll, k] - vals[ll, digits[ll], k]
    code = best_prefix * n_comb + best_tail
    for lvl in range(n_lvl - 1, -1, -1):
        best_digits[lvl] = code % 4
        code //= 4
    return best


@nb.njit(cache=True)
def two_step(hcols, col_norm2, s, g, m2, use_inf, x_idx, order_j, order_x):
    m, k_users = hcols.shape
    used = np.zeros(m, dtype=np.bool_)
    s_r = greedy_step(hcols, col_norm2, s, g, m - m2, used, x_idx, order_j, order_x)
    if m2 == 0:
        return
    rest = np.empty(m2, dtype=np.int64)
    n = 0
    for j in range(m):
        if not used[j]:
            rest[n] = j
            n += 1
    vals = np.empty((m2, 4, k_users), dtype=np.complex128)
    for lvl in range(m2):
        for xi in range(4):
            for k in range(k_users):
                vals[lvl, xi, k] = g * hcols[rest[lvl], k] * _ALPHABET[xi]
    digits = np.zeros(m2, dtype=np.int64)
    exhaustive_step(vals, s_r, use_inf, digits)
    for lvl in range(m2):
        x_idx[rest[lvl]] = digits[lvl]


@nb.njit(cache=True)
def two_step_batch(hcols, s_batch, g, m2, use_inf):
    """Run :func:`two_step` for every row of ``s_batch``; returns ``(T, M)`` indices."""
    m = hcols.shape[0]
    t_count = s_batch.shape[0]
    col_norm2 = np.empty(m)
    for j in range(m):
        acc = 0.0
        for k in range(hcols.shape[1]):
            acc += hcols[j, k].real ** 2 + hcols[j, k].imag ** 2
        col_norm2[j] = acc
    out = np.zeros((t_count, m), dtype=np.int8)
    x_idx = np.zeros(m, dtype=np.int64)
    order_j = np.zeros(m, dtype=np.int64)
    order_x = np.zeros(m, dtype=np.int64)
    for t in range(t_count):
        two_step(hcols, col_norm2, s_batch[t], g, m2, use_inf, x_idx, order_j, order_x)
        for j in range(m):
            out[t, j] = x_idx[j]
    return out
