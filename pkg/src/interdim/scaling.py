"""Scale ladders and multiscale aggregation shared by the estimators."""
from __future__ import annotations

import math

import numpy as np

from .geometry import DomainError, PointSet


def dyadic_ladder(ps: PointSet, count: int | None = None, finest: float | None = None,
                  theta: float | None = None) -> np.ndarray:
    """Scales 2^-k down to the finest dyadic scale >= ``finest`` (default 2 * resolution).

    With ``theta`` given, the coarsest scale is the first with
    r^theta <= 1/2.  ``count`` keeps only that many of the finest scales.
    """
    floor = 2 * ps.resolution if finest is None else finest
    kmax = 30 if floor <= 0 else int(math.floor(-math.log2(floor) + 1e-12))
    kmin = 1 if theta is None else max(1, math.ceil(1.0 / theta - 1e-12))
    ks = np.arange(kmin, kmax + 1)
    if count is not None:
        ks = ks[-count:]
    return 2.0 ** -ks.astype(float)


def geometric_ladder(r_max: float, r_min: float, per_octave: int = 2) -> np.ndarray:
    """Denser geometric ladder with ``per_octave`` scales per factor of two."""
    n = int(math.floor(per_octave * math.log2(r_max / r_min) + 1e-9)) + 1
    return r_max * 2.0 ** (-np.arange(n) / per_octave)


def check_ladder(ladder, ps: PointSet, minimum: int = 4) -> None:
    ladder = np.asarray(ladder, dtype=float)
    if len(ladder) < minimum:
        raise DomainError(f"scale ladder needs at least {minimum} scales, got {len(ladder)}")
    if np.any(ladder >= 1) or np.any(ladder <= 0):
        raise DomainError("scales must lie in (0, 1)")
    if np.any(np.diff(ladder) >= 0):
        raise DomainError("scale ladder must be strictly decreasing")
    if np.any(ladder < 2 * ps.resolution * (1 - 1e-12)):
        raise DomainError(f"scales below twice the net resolution {ps.resolution}")


def crossing(grid: np.ndarray, values: np.ndarray, level: float = 0.0, tol: float = 1e-9) -> float:
    """First point where ``values`` drops below ``level``, linearly interpolated.

    Values within ``tol`` of ``level`` count as not below, so a plateau at
    the level ends the search at its right end.  Returns the right end of
    the grid if the curve never drops below and the left end if it starts
    below.
    """
    h = np.asarray(values, dtype=float) - level
    h = np.where(np.abs(h) <= tol, 0.0, h)
    below = np.nonzero(h < 0)[0]
    if len(below) == 0:
        return float(grid[-1])
    i = below[0]
    if i == 0:
        return float(grid[0])
    return float(grid[i - 1] + (grid[i] - grid[i - 1]) * h[i - 1] / (h[i - 1] - h[i]))


def window_slopes(logscale: np.ndarray, table: np.ndarray, width: int) -> np.ndarray:
    """Least-squares slopes of each row of ``table`` against ``logscale`` on sliding windows.

    Returns an array of shape (n_windows, n_rows).
    """
    n = table.shape[1]
    out = []
    for start in range(0, n - width + 1):
        x = logscale[start:start + width]
        out.append(np.polyfit(x, table[:, start:start + width].T, 1)[0])
    return np.array(out)


def aggregate_limit(ladder, table: np.ndarray, kind: str) -> np.ndarray:
    """Estimated limit of log Q(r) / -log r as r -> 0, per row of ``table``.

    ``table[i, k]`` holds log Q_i(r_k) along a decreasing ladder.  The limit
    is the least-squares slope against -log r.  ``kind='upper'`` fits the
    finest half of the ladder; ``kind='lower'`` takes the smallest slope over
    all windows of that width inside the finest three quarters.
    """
    if kind not in ("lower", "upper"):
        raise DomainError(f"kind must be 'lower' or 'upper', got {kind!r}")
    L = -np.log(np.asarray(ladder, dtype=float))
    n = len(L)
    width = max(3, (n + 1) // 2)
    if kind == "upper":
        return np.polyfit(L[-width:], table[:, -width:].T, 1)[0]
    span = max(width, (3 * n + 3) // 4)
    return window_slopes(L[-span:], table[:, -span:], width).min(axis=0)
