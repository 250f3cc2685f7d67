"""Seeded Monte Carlo sweeps: MSE versus normalised range, SER versus SNR and
SER versus antenna count.

Every channel trial draws from its own streams ``(master_seed, purpose,
trial)``: ``channel/M=<M>`` for the channel, ``symbols`` for the symbol
indices, ``noise`` for unit noise that is rescaled per SNR point, and
``phases`` for the gamma-mode MSE targets. Schemes and SNR points share the
same draws. Trials are independent, so they can run in any order on any
number of worker processes; aggregation happens in trial order.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from functools import partial
import math
import multiprocessing as mp

import numpy as np

from .. import __version__
from ..channel import SeedSpec, channel_norms, generate_channel, standard_complex_normal
from ..constellation import build_qam, quantize_array
from ..errors import InvalidParameterError
from ..metrics import analytic_ser, snr_db_to_sigma
from ..precoding import (
    _zf_solution,
    all_receive_points,
    noiseless_receive,
    one_bit_batch,
    one_bit_word,
    oracle_exhaustive,
    precode_inf_per_antenna,
    precode_inf_total,
    precode_one_bit_multi,
    precode_quantized_zf,
    precode_zf,
)
from ..range_design import ONE_BIT_FACTOR, range_inf_per_antenna, range_inf_total, range_zf_multi
from .config import ExperimentConfig, SchemeSpec
from .table import ResultTable

__all__ = [
    "reference_range",
    "scheme_range",
    "precode_batch",
    "run_mse_sweep",
    "run_ser_vs_snr",
    "run_ser_vs_antennas",
    "run_experiment",
    "precode_once",
]


def reference_range(cfg: ExperimentConfig, H, m: int) -> float:
    """``sqrt(2P) ||h||_2`` for one user (hardened: ``sqrt(2PM)``), else ``sqrt(2PM / f(K, N))``."""
    if H.shape[0] == 1:
        return range_inf_total(cfg.power, H[0].conj(), asymptotic=cfg.hardened_range)
    return range_zf_multi(cfg.power, m, H.shape[0], cfg.n_side, cfg.kappa)


def scheme_range(spec: SchemeSpec, cfg: ExperimentConfig, H, ref: float) -> float:
    if spec.range_factor is not None:
        return spec.range_factor * ref
    if spec.kind == "inf_per_antenna":
        return range_inf_per_antenna(cfg.power, H[0].conj(), asymptotic=cfg.hardened_range)
    if spec.kind in ("onebit", "quantized_zf", "oracle"):
        return ONE_BIT_FACTOR * ref
    return ref


def _clip_radius(S, radius):
    mag = np.abs(S)
    scale = np.where(mag > radius, radius / np.where(mag > 0, mag, 1.0), 1.0)
    return S * scale


def precode_batch(spec: SchemeSpec, H, S, p: float):
    """Noiseless receive points for a ``(T, K)`` batch of symbol vectors.

    Returns ``(rx, violated)``; ``violated`` flags ZF words that exceeded the
    per-symbol power budget (and were scaled back onto it).
    """
    k, m = H.shape
    violated = np.zeros(S.shape[0], dtype=bool)
    if spec.kind == "inf_total":
        _, l2 = channel_norms(H[0])
        return _clip_radius(S, math.sqrt(p) * l2), violated
    if spec.kind == "inf_per_antenna":
        l1, _ = channel_norms(H[0])
        return _clip_radius(S, math.sqrt(p / m) * l1), violated
    if spec.kind in ("zf", "quantized_zf"):
        X = _zf_solution(H, S, p)
        if spec.kind == "quantized_zf":
            X = one_bit_word(2 * (X.real < 0) + (X.imag < 0))
        else:
            power = np.sum(np.abs(X) ** 2, axis=1)
            violated = power > m
            X[violated] *= np.sqrt(m / power[violated])[:, None]
        return noiseless_receive(H, X, p), violated
    if spec.kind == "onebit":
        return noiseless_receive(H, one_bit_word(one_bit_batch(H, S, p, spec.m2)), p), violated
    if spec.kind == "oracle":
        pts = np.concatenate([chunk for _, chunk in all_receive_points(H, p)])
        best = np.empty(S.shape[0], dtype=np.int64)
        for t, s in enumerate(S):
            best[t] = np.argmin(np.max(np.abs(pts - s[None, :]) ** 2, axis=1))
        return pts[best], violated
    raise InvalidParameterError(f"unknown scheme {spec.kind!r}")


def _streams(cfg, m, trial):
    root = SeedSpec(cfg.master_seed)
    H = generate_channel(cfg.k_users, m, root.child(f"channel/M={m}", trial))
    shape = (cfg.symbols_per_channel, cfg.k_users)
    idx = root.child("symbols", trial).generator().integers(0, cfg.n_side**2, size=shape)
    return root, H, idx


def _ser_trial(cfg: ExperimentConfig, m: int, trial: int):
    root, H, idx = _streams(cfg, m, trial)
    z = standard_complex_normal(idx.shape, root.child("noise", trial))
    sigmas = np.atleast_1d(snr_db_to_sigma(cfg.snr_db, cfg.power))
    ref = reference_range(cfg, H, m)
    ser = np.zeros((len(cfg.schemes), sigmas.size))
    ana = np.zeros_like(ser)
    viol = np.zeros(len(cfg.schemes))
    for i, spec in enumerate(cfg.schemes):
        const = build_qam(cfg.n_side, scheme_range(spec, cfg, H, ref))
        rx, v = precode_batch(spec, H, const.points[idx], cfg.power)
        viol[i] = v.mean()
        for q, sigma in enumerate(sigmas):
            ser[i, q] = np.mean(quantize_array(const, rx + sigma * z) != idx)
        ana[i] = analytic_ser(cfg.n_side, const.min_distance_d, sigmas)
    return ser, ana, viol


def _mse_trial(cfg: ExperimentConfig, m: int, trial: int):
    root, H, idx = _streams(cfg, m, trial)
    lambdas = np.asarray(cfg.lambdas)
    if cfg.mse_target == "gamma":
        _, l2 = channel_norms(H[0])
        theta = root.child("phases", trial).generator().uniform(0, 2 * np.pi, size=idx.shape)
        unit = np.exp(1j * theta)
        ref = math.sqrt(cfg.power) * l2
    else:
        ref = reference_range(cfg, H, m)
    mse = np.zeros((len(cfg.schemes), lambdas.size))
    viol = np.zeros_like(mse)
    for q, lam in enumerate(lambdas):
        if cfg.mse_target == "gamma":
            S = lam * ref * unit
        else:
            S = build_qam(cfg.n_side, lam * ref).points[idx]
        for i, spec in enumerate(cfg.schemes):
            rx, v = precode_batch(spec, H, S, cfg.power)
            mse[i, q] = np.mean(np.abs(rx - S) ** 2)
            viol[i, q] = v.mean()
    return mse, viol


def _map_trials(fn, n_trials: int, threads: int):
    if threads <= 1 or n_trials <= 1:
        return [fn(t) for t in range(n_trials)]
    ctx = mp.get_context("fork")
    with ProcessPoolExecutor(max_workers=threads, mp_context=ctx) as pool:
        return list(pool.map(fn, range(n_trials), chunksize=max(1, n_trials // (4 * threads))))


def _new_table(cfg, sweep_name):
    return ResultTable(sweep_name, metadata={
        "config": cfg.to_dict(),
        "master_seed": cfg.master_seed,
        "version": __version__,
    })


def run_mse_sweep(cfg: ExperimentConfig, threads: int = 1) -> ResultTable:
    """Average squared reconstruction error versus the normalised range.

    For every ``lambda`` the constellation range is ``lambda`` times the
    reference range (``mse_target = qam``), or the target is a single point
    of modulus ``gamma sqrt(P) ||h||_2`` with a random phase (``mse_target = gamma``).
    Range options of the schemes are ignored here.
    """
    m = _single(cfg.m_antennas, "m_antennas")
    out = _map_trials(partial(_mse_trial, cfg, m), cfg.trials, threads)
    mse = np.stack([o[0] for o in out])
    viol = np.stack([o[1] for o in out])
    table = _new_table(cfg, "gamma" if cfg.mse_target == "gamma" else "lambda")
    for q, lam in enumerate(cfg.lambdas):
        for i, spec in enumerate(cfg.schemes):
            table.add(float(lam), spec.label, "mse", mse[:, i, q])
            if spec.kind == "zf":
                table.add(float(lam), spec.label, "power_violation", viol[:, i, q])
    return table


def _add_ser_rows(table, cfg, sweep_value, ser, ana, viol, q):
    for i, spec in enumerate(cfg.schemes):
        table.add(sweep_value, spec.label, "ser", ser[:, i, q], analytic=float(np.mean(ana[:, i, q])))
        if spec.kind == "zf":
            table.add(sweep_value, spec.label, "power_violation", viol[:, i])


def run_ser_vs_snr(cfg: ExperimentConfig, threads: int = 1) -> ResultTable:
    """Empirical symbol error rate per SNR point and scheme.

    The ``analytic`` column is ``g_N Q(d / (2 sigma))`` averaged over the
    simulated channels, with ``d`` the minimum distance each scheme used.
    """
    m = _single(cfg.m_antennas, "m_antennas")
    out = _map_trials(partial(_ser_trial, cfg, m), cfg.trials, threads)
    ser, ana, viol = (np.stack([o[j] for o in out]) for j in range(3))
    table = _new_table(cfg, "snr_db")
    for q, snr in enumerate(cfg.snr_db):
        _add_ser_rows(table, cfg, float(snr), ser, ana, viol, q)
    return table


def run_ser_vs_antennas(cfg: ExperimentConfig, threads: int = 1) -> ResultTable:
    """Empirical symbol error rate per antenna count at a fixed SNR."""
    _single(cfg.snr_db, "snr_db")
    table = _new_table(cfg, "m_antennas")
    for m in cfg.m_antennas:
        out = _map_trials(partial(_ser_trial, cfg, int(m)), cfg.trials, threads)
        ser, ana, viol = (np.stack([o[j] for o in out]) for j in range(3))
        _add_ser_rows(table, cfg, int(m), ser, ana, viol, 0)
    return table


def _single(grid, name):
    if len(grid) != 1:
        raise InvalidParameterError(f"this experiment needs exactly one value of {name}, got {list(grid)}")
    return grid[0]


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> ResultTable:
    runners = {
        "mse_sweep": run_mse_sweep,
        "ser_vs_snr": run_ser_vs_snr,
        "ser_vs_antennas": run_ser_vs_antennas,
    }
    if cfg.kind not in runners:
        raise InvalidParameterError(f"{cfg.kind} does not produce a result table")
    return runners[cfg.kind](cfg, threads)


# -- single instance -------------------------------------------------------------

def _cpair(z):
    z = np.asarray(z, dtype=complex)
    return np.stack([z.real, z.imag], axis=-1).tolist()


def _precode_single(spec, H, s, p):
    if spec.kind == "inf_total":
        return precode_inf_total(H[0].conj(), s[0], p)
    if spec.kind == "inf_per_antenna":
        return precode_inf_per_antenna(H[0].conj(), s[0], p)
    if spec.kind == "zf":
        return precode_zf(H, s, p, enforce_power=True)
    if spec.kind == "quantized_zf":
        return precode_quantized_zf(H, s, p)
    if spec.kind == "onebit":
        return precode_one_bit_multi(H, s, p, spec.m2)
    return oracle_exhaustive(H, s, p, "inf")


def precode_once(cfg: ExperimentConfig, symbols=None, channel=None, scatter: bool = False) -> dict:
    """Precode one symbol vector with every configured scheme and report the outcome.

    Without ``channel`` the channel is drawn from trial 0 of the configured
    seed; without ``symbols`` the symbol indices come from the same trial
    and are mapped onto each scheme's constellation. ``scatter`` adds all
    ``4**M`` values of ``h^H x`` (single user, ``M <= 12``) together with the
    radii ``sqrt(2P) ||h||_2`` and ``sqrt(2/pi)`` times that.
    """
    m = _single(cfg.m_antennas, "m_antennas")
    if channel is None:
        root, H, idx = _streams(cfg, m, 0)
    else:
        H = np.atleast_2d(np.asarray(channel, dtype=complex))
        if H.shape != (cfg.k_users, m):
            raise InvalidParameterError(f"channel shape {H.shape} does not match K={cfg.k_users}, M={m}")
        idx = SeedSpec(cfg.master_seed).child("symbols", 0).generator().integers(
            0, cfg.n_side**2, size=(1, cfg.k_users))
    if symbols is not None:
        symbols = np.atleast_1d(np.asarray(symbols, dtype=complex))
        if symbols.shape != (cfg.k_users,):
            raise InvalidParameterError(f"expected {cfg.k_users} symbols, got {symbols.size}")
    ref = reference_range(cfg, H, m)
    report = {
        "k_users": cfg.k_users,
        "m_antennas": m,
        "power": cfg.power,
        "master_seed": cfg.master_seed,
        "channel": _cpair(H),
        "reference_range": ref,
        "schemes": [],
    }
    for spec in cfg.schemes:
        c = scheme_range(spec, cfg, H, ref)
        const = build_qam(cfg.n_side, c)
        s = symbols if symbols is not None else const.points[idx[0]]
        out = _precode_single(spec, H, s, cfg.power)
        report["schemes"].append({
            "scheme": spec.label,
            "range_c": c,
            "lambda": c / ref,
            "target": _cpair(s),
            "noiseless_rx": _cpair(out.noiseless_rx),
            "residual_inf": out.residual_inf,
            "residual_l2": out.residual_l2,
            "power": out.power,
            "power_violated": bool(out.power_violated),
            "indices": None if out.indices is None else [int(v) for v in out.indices],
        })
    if scatter:
        if cfg.k_users != 1:
            raise InvalidParameterError("scatter mode is single-user only")
        gain = math.sqrt(m / cfg.power)  # undo the sqrt(P/M) normalisation: points are h^H x
        pts = np.concatenate([c for _, c in all_receive_points(H, cfg.power)])[:, 0] * gain
        outer = range_inf_total(cfg.power, H[0].conj())
        inner = ONE_BIT_FACTOR * outer
        report["scatter"] = {
            "points": _cpair(pts),
            "radius_inf_total": outer,
            "radius_one_bit": inner,
            "fraction_inside_one_bit": float(np.mean(np.abs(pts) <= inner)),
        }
    return report
