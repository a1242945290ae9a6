"""Constrained cover sums S^s_{r,theta}: exact in one dimension, dyadic upper bounds above.

A cover is admissible at scale ``r`` if every piece has diameter between
``r`` and ``r**theta``.  In one dimension the optimum is found exactly by
dynamic programming over the sorted points; in higher dimensions a bottom-up
merge over a dyadic cube hierarchy gives an admissible cover whose cost
bounds the optimum from above (cube side length is used as the diameter).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import DomainError, PointSet, normalised
from .kernels import KernelParams
from .scaling import aggregate_limit, crossing, dyadic_ladder, check_ladder

_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CoverSolution:
    cost: float
    centers: np.ndarray = field(repr=False)  # (k, dim)
    diameters: np.ndarray = field(repr=False)  # (k,)
    exact: bool

    @property
    def pieces(self) -> list[tuple[tuple[float, ...], float]]:
        return [(tuple(map(float, c)), float(d)) for c, d in zip(self.centers, self.diameters)]

    def to_json(self) -> str:
        return json.dumps({"cost": self.cost, "exact": self.exact,
                           "pieces": [{"center": list(c), "diameter": d} for c, d in self.pieces]})

    def covers(self, ps: PointSet, metric: str = "euclidean") -> bool:
        """True if every point of ``ps`` lies in some piece.

        Pieces are intervals in 1D; for ``metric='cube'`` pieces are
        axis-aligned cubes of side ``diameter``.
        """
        pts = ps.points
        half = self.diameters[None, :] / 2 * (1 + _TOL)
        diff = np.abs(pts[:, None, :] - self.centers[None, :, :])
        if metric == "cube" or ps.dim == 1:
            inside = np.all(diff <= half[..., None] + _TOL, axis=-1)
        else:
            inside = np.linalg.norm(diff, axis=-1) <= half + _TOL
        return bool(np.all(inside.any(axis=1)))


def _check(ps: PointSet, kp: KernelParams) -> None:
    if len(ps) == 0:
        raise DomainError("cannot cover an empty set")
    if ps.resolution > kp.r * (1 + _TOL):
        raise DomainError(f"net resolution {ps.resolution} exceeds the cover scale r={kp.r}")


def _dp_1d(x: np.ndarray, r: float, R: float, s: np.ndarray):
    """Minimal sum of max(r, span)^s over partitions of sorted ``x`` into blocks of span <= R.

    Vectorised over the exponents ``s``.  Returns ``(costs, next_index)`` where
    ``next_index[i, j]`` is one past the last point of the block that starts at
    ``i`` in the optimal solution for ``s[j]``.
    """
    n = len(x)
    k = len(s)
    best = np.zeros((n + 1, k))
    nxt = np.zeros((n, k), dtype=np.int64)
    ends = np.searchsorted(x, x + R * (1 + _TOL), side="right")
    logs = None
    for i in range(n - 1, -1, -1):
        span = np.maximum(x[i:ends[i]] - x[i], r)
        logs = np.log(span)
        cand = np.exp(np.outer(logs, s)) + best[i + 1:ends[i] + 1]
        j = np.argmin(cand, axis=0)
        best[i] = cand[j, np.arange(k)]
        nxt[i] = i + 1 + j
    return best[0], nxt


def _dp_1d_pieces(x, r, nxt_col):
    centers, diams = [], []
    i = 0
    n = len(x)
    while i < n:
        j = nxt_col[i]
        span = max(x[j - 1] - x[i], r)
        centers.append(x[i] + span / 2)
        diams.append(span)
        i = j
    return np.array(centers).reshape(-1, 1), np.array(diams)


def cover_sum_1d(ps: PointSet, kp: KernelParams) -> CoverSolution:
    """Exact S^s_{r,theta} of a finite subset of the line."""
    if ps.dim != 1:
        raise DomainError("cover_sum_1d needs a one-dimensional point set")
    _check(ps, kp)
    x = ps.points[:, 0]
    costs, nxt = _dp_1d(x, kp.r, kp.r_theta, np.array([kp.s]))
    centers, diams = _dp_1d_pieces(x, kp.r, nxt[:, 0])
    return CoverSolution(cost=float(np.sum(diams ** kp.s)), centers=centers,
                         diameters=diams, exact=True)


def cover_sums_1d(ps: PointSet, r: float, theta: float, s_values) -> np.ndarray:
    """Exact S^s_{r,theta} for many exponents at once."""
    if ps.dim != 1:
        raise DomainError("cover_sums_1d needs a one-dimensional point set")
    s_values = np.asarray(s_values, dtype=float)
    _check(ps, KernelParams(r, theta, 0.0, max(1.0, float(s_values.max()))))
    costs, _ = _dp_1d(ps.points[:, 0], r, r ** theta, s_values)
    return costs


def _grid_tree(ps: PointSet, r: float, R: float, s_values: np.ndarray):
    pts = ps.points
    origin = pts.min(axis=0)
    levels = max(0, int(math.floor(math.log2(R / r) + 1e-12)))
    cells = np.floor((pts - origin) / r + _TOL).astype(np.int64)
    keys, inverse = np.unique(cells, axis=0, return_inverse=True)
    # cost[k] of the best cover of the points inside each occupied cell
    cost = np.repeat((r ** s_values)[None, :], len(keys), axis=0)
    choice = [np.zeros((len(keys), len(s_values)), dtype=bool)]
    layers = [keys]
    parents_all = []
    for lev in range(1, levels + 1):
        side = r * 2 ** lev
        parent_keys, parent_of = np.unique(keys // 2, axis=0, return_inverse=True)
        parent_of = parent_of.ravel()
        child_sum = np.zeros((len(parent_keys), len(s_values)))
        np.add.at(child_sum, parent_of, cost)
        own = np.repeat((side ** s_values)[None, :], len(parent_keys), axis=0)
        merge = own <= child_sum
        cost = np.where(merge, own, child_sum)
        choice.append(merge)
        layers.append(parent_keys)
        parents_all.append(parent_of)
        keys = parent_keys
    return origin, layers, parents_all, choice, cost


def cover_sums_grid(ps: PointSet, r: float, theta: float, s_values) -> np.ndarray:
    """Dyadic-cube cover costs for many exponents (upper bounds for S)."""
    s_values = np.asarray(s_values, dtype=float)
    _check(ps, KernelParams(r, theta, 0.0, max(1.0, float(s_values.max()))))
    *_, cost = _grid_tree(ps, r, r ** theta, s_values)
    return cost.sum(axis=0)


def cover_sum_grid(ps: PointSet, kp: KernelParams) -> CoverSolution:
    """Admissible cover by dyadic cubes with sides in [r, r^theta]."""
    _check(ps, kp)
    s = np.array([kp.s])
    origin, layers, parents, choice, _ = _grid_tree(ps, kp.r, kp.r_theta, s)
    top = len(layers) - 1
    # walk down: a cell is emitted if it merged (or is a leaf) and no ancestor was emitted
    emitted = np.zeros(len(layers[top]), dtype=bool)
    covered_above = np.zeros(len(layers[top]), dtype=bool)
    centers, sides = [], []
    for lev in range(top, -1, -1):
        merged = choice[lev][:, 0] if lev > 0 else np.ones(len(layers[0]), dtype=bool)
        emit = merged & ~covered_above
        side = kp.r * 2 ** lev
        for key in layers[lev][emit]:
            centers.append(origin + (key + 0.5) * side)
            sides.append(side)
        if lev > 0:
            covered_above = (covered_above | emit)[parents[lev - 1]]
    centers = np.array(centers).reshape(-1, ps.dim)
    sides = np.array(sides)
    return CoverSolution(cost=float(np.sum(sides ** kp.s)), centers=centers,
                         diameters=sides, exact=False)


def cover_sums(ps: PointSet, r: float, theta: float, s_values) -> np.ndarray:
    """Exact DP on the line, dyadic heuristic otherwise."""
    if ps.dim == 1:
        return cover_sums_1d(ps, r, theta, s_values)
    return cover_sums_grid(ps, r, theta, s_values)


FLOOR_FACTOR = 16


def dim_from_covering(ps: PointSet, theta: float, kind: str = "lower", scale_ladder=None,
                      s_grid=None, normalise: bool = True, return_details: bool = False):
    """Intermediate dimension estimated from the growth of cover sums.

    For each exponent ``s`` the limit of log S^s_{r,theta} / -log r is
    estimated from the ladder (see :func:`interdim.scaling.aggregate_limit`);
    the estimate is the exponent where that limit crosses zero.  The set is
    first rescaled to unit diameter; an explicit ``scale_ladder`` refers to
    the rescaled set.  The default ladder stops at 16 * resolution, where the
    spacing of the net no longer distorts the counts.
    """
    if not 0 < theta <= 1:
        raise DomainError(f"theta must lie in (0, 1], got {theta}")
    if len(ps) == 1:
        return (0.0, {}) if return_details else 0.0
    if normalise:
        ps = normalised(ps)
    if scale_ladder is None:
        ladder = dyadic_ladder(ps, finest=FLOOR_FACTOR * ps.resolution)
    else:
        ladder = np.asarray(scale_ladder, dtype=float)
    check_ladder(ladder, ps)
    s_grid = np.linspace(0.0, ps.dim, 81) if s_grid is None else np.asarray(s_grid)
    table = np.column_stack([np.log(cover_sums(ps, r, theta, s_grid)) for r in ladder])
    limits = aggregate_limit(ladder, table, kind)
    value = crossing(s_grid, limits, level=0.0)
    if return_details:
        return value, {"ladder": ladder, "s_grid": s_grid, "log_cover_sums": table, "limits": limits}
    return value
