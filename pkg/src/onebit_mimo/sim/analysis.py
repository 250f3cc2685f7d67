"""Reading operating points off simulated curves."""
from __future__ import annotations

import math

import numpy as np

__all__ = ["interpolate_crossing", "gap_at"]


def interpolate_crossing(x, y, target: float, log_x: bool = False) -> float:
    """First ``x`` at which a decreasing curve ``y`` reaches ``target``.

    Interpolates ``log10(y)`` linearly between the two bracketing grid points
    (and in ``log10(x)`` when ``log_x``). Returns NaN if the curve never
    crosses ``target`` or a bracketing value is zero.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for i in range(len(x) - 1):
        if y[i] >= target >= y[i + 1]:
            if y[i] <= 0 or y[i + 1] <= 0:
                return math.nan
            ly0, ly1 = math.log10(y[i]), math.log10(y[i + 1])
            x0, x1 = (math.log10(x[i]), math.log10(x[i + 1])) if log_x else (x[i], x[i + 1])
            if ly0 == ly1:
                xt = x0
            else:
                xt = x0 + (math.log10(target) - ly0) * (x1 - x0) / (ly1 - ly0)
            return 10**xt if log_x else xt
    return math.nan


def gap_at(table, reference: str, other: str, target: float, metric: str = "ser",
           log_x: bool = False) -> float:
    """Horizontal distance ``x_other - x_reference`` at which both curves hit ``target``."""
    xr, yr, _, _ = table.series(reference, metric)
    xo, yo, _, _ = table.series(other, metric)
    return interpolate_crossing(xo, yo, target, log_x) - interpolate_crossing(xr, yr, target, log_x)
