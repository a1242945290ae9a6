"""Intermediate dimension profiles from capacities.

The profile at (theta, m) is the exponent ``s`` at which the growth rate of
log C^{s,m}_{r,theta} in -log r equals ``s``.  Finite ladders only give
growth rates between consecutive scales, so each adjacent pair of scales
yields one exponent, and these are extrapolated linearly in 1 / -log r to
the zero-scale limit.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from .capacity import SolverConfig, distance_matrix, kernel_matrix, minimise_energy
from .geometry import DomainError, PointSet, delta_net, normalised
from .kernels import KernelParams
from .scaling import check_ladder, crossing, dyadic_ladder

# warm-started single solves; equilibrium() keeps the multi-start default
PROFILE_SOLVER = SolverConfig(restarts=0)
FLOOR_FACTOR = 4


@dataclass
class ProfileEstimate:
    theta: float
    m: float
    kind: str
    value: float
    per_scale_exponents: list[tuple[float, float]]
    fit_residual: float
    intercept: float = 0.0
    slope: float = 0.0
    ladder: list[float] = field(default_factory=list)
    converged: bool = True
    estimator: str = "capacity"

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _check_theta_m(ps: PointSet, theta: float, m: float) -> None:
    if not 0 < theta <= 1:
        raise DomainError(f"theta must lie in (0, 1], got {theta}")
    if not 0 < m <= ps.dim + 1e-12:
        raise DomainError(f"m must lie in (0, {ps.dim}], got {m}")


def scale_exponent(ps: PointSet, theta: float, m: float, r: float,
                   solver: SolverConfig = PROFILE_SOLVER, xtol: float = 1e-4):
    """Single-scale fixed point: the s in [0, m] with log C^{s,m}_{r,theta} / -log r = s.

    Returns ``(s, converged)``.  The defining function minus ``s`` is strictly
    decreasing in ``s``, so the root is bracketed by the ends of [0, m].
    """
    _check_theta_m(ps, theta, m)
    if not 2 * ps.resolution <= r < 1:
        raise DomainError(f"scale {r} must lie in [2 * resolution, 1)")
    if len(ps) == 1:
        return 0.0, True
    D = distance_matrix(ps)
    L = -math.log(r)
    state = {"w": None, "ok": True}

    def g(s):
        K = kernel_matrix(D, KernelParams(r, theta, s, m))
        w, E, _, _, ok = minimise_energy(K, solver, None if state["w"] is None else [state["w"]])
        state["w"] = w
        state["ok"] &= ok
        return -math.log(E) / L - s

    g0, gm = g(0.0), g(m)
    if gm >= 0:
        return float(m), state["ok"]
    if g0 <= 0:
        return 0.0, state["ok"]
    return float(brentq(g, 0.0, m, xtol=xtol)), state["ok"]


def default_ladder(ps: PointSet, theta: float | None = None, count: int | None = None) -> np.ndarray:
    return dyadic_ladder(ps, count=count, finest=FLOOR_FACTOR * ps.resolution, theta=theta)


def capacity_table(ps: PointSet, theta: float, m: float, ladder, s_grid,
                   solver: SolverConfig = PROFILE_SOLVER, coarsen: float | None = 1 / 16):
    """log C^{s,m}_{r,theta}(ps) for every (s, r) on the grids.

    With ``coarsen`` set, each scale r works on ``delta_net(ps, coarsen * r)``.
    Returns ``(table, converged)`` with ``table`` of shape (len(s_grid), len(ladder)).
    """
    table = np.zeros((len(s_grid), len(ladder)))
    ok = True
    for k, r in enumerate(ladder):
        net = ps if coarsen is None or coarsen * r <= ps.resolution else delta_net(ps, coarsen * r)
        D = distance_matrix(net)
        w = None
        for i, s in enumerate(s_grid):
            K = kernel_matrix(D, KernelParams(r, theta, s, m))
            w, E, _, _, conv = minimise_energy(K, solver, None if w is None else [w])
            ok &= conv
            table[i, k] = -math.log(E)
    return table, ok


def secant_exponents(ladder, table: np.ndarray, s_grid) -> list[tuple[float, float]]:
    """Fixed points of the growth rate of log C between consecutive scales.

    Each entry is ``(r_mid, s)`` with ``r_mid`` the geometric mean of the pair.
    """
    L = -np.log(np.asarray(ladder, dtype=float))
    out = []
    for k in range(len(L) - 1):
        rate = (table[:, k + 1] - table[:, k]) / (L[k + 1] - L[k])
        s = crossing(np.asarray(s_grid), rate - np.asarray(s_grid))
        out.append((float(math.exp(-(L[k] + L[k + 1]) / 2)), s))
    return out


def extrapolate(exponents, kind: str, m: float):
    """Linear fit of s against 1 / -log r over the finest half; intercept is the limit.

    The lower (upper) estimate shifts the intercept by the smallest (largest)
    residual, i.e. it extrapolates the lower (upper) envelope of the points.
    Returns ``(value, intercept, slope, rms_residual)``.
    """
    if kind not in ("lower", "upper"):
        raise DomainError(f"kind must be 'lower' or 'upper', got {kind!r}")
    pts = np.array(exponents, dtype=float)
    width = max(3, (len(pts) + 1) // 2)
    pts = pts[-width:]
    x = 1.0 / -np.log(pts[:, 0])
    y = pts[:, 1]
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (intercept + slope * x)
    shift = resid.min() if kind == "lower" else resid.max()
    value = float(np.clip(intercept + shift, 0.0, m))
    return value, float(intercept), float(slope), float(np.sqrt(np.mean(resid ** 2)))


def dim_profile(ps: PointSet, theta: float, m: float, kind: str = "lower", scale_ladder=None,
                s_points: int = 33, solver: SolverConfig = PROFILE_SOLVER,
                coarsen: float | None = 1 / 16, normalise: bool = True, return_table: bool = False):
    """Estimate the lower or upper intermediate dimension profile of ``ps``.

    The set is rescaled to unit diameter first (an explicit ``scale_ladder``
    refers to the rescaled set).  Capacities are tabulated on ``s_points``
    exponents in [0, m] at every scale of the ladder.
    """
    _check_theta_m(ps, theta, m)
    if kind not in ("lower", "upper"):
        raise DomainError(f"kind must be 'lower' or 'upper', got {kind!r}")
    if normalise:
        ps = normalised(ps)
    ladder = default_ladder(ps, theta) if scale_ladder is None else np.asarray(scale_ladder, dtype=float)
    if len(ps) == 1:
        est = ProfileEstimate(theta, m, kind, 0.0, [(float(r), 0.0) for r in ladder], 0.0,
                              ladder=[float(r) for r in ladder])
        return (est, None) if return_table else est
    check_ladder(ladder, ps)
    s_grid = np.linspace(0.0, m, s_points)
    table, ok = capacity_table(ps, theta, m, ladder, s_grid, solver, coarsen)
    exps = secant_exponents(ladder, table, s_grid)
    value, icpt, slope, resid = extrapolate(exps, kind, m)
    est = ProfileEstimate(theta=theta, m=m, kind=kind, value=value, per_scale_exponents=exps,
                          fit_residual=resid, intercept=icpt, slope=slope,
                          ladder=[float(r) for r in ladder], converged=ok)
    return (est, table) if return_table else est


def _isotonic(values: np.ndarray) -> np.ndarray:
    """Least-squares non-decreasing fit (pool adjacent violators)."""
    blocks = [[float(v), 1] for v in values]
    out = []
    for v, w in blocks:
        out.append([v, w])
        while len(out) > 1 and out[-2][0] > out[-1][0]:
            v2, w2 = out.pop()
            v1, w1 = out.pop()
            out.append([(v1 * w1 + v2 * w2) / (w1 + w2), w1 + w2])
    return np.concatenate([[v] * w for v, w in out])


def profile_curve(ps: PointSet, theta: float, kind: str = "lower", m_grid=None,
                  **kwargs) -> list[ProfileEstimate]:
    """Profiles along an increasing grid of m, made non-decreasing in m.

    Raw estimates are replaced by their isotonic regression and re-clamped
    to [0, m]; the raw value is kept in ``intercept``-independent form as
    ``per_scale_exponents`` of each estimate.
    """
    m_grid = np.linspace(0.1, ps.dim, 10) if m_grid is None else np.asarray(m_grid, dtype=float)
    if np.any(np.diff(m_grid) <= 0) or m_grid[0] <= 0 or m_grid[-1] > ps.dim + 1e-12:
        raise DomainError(f"m_grid must be increasing inside (0, {ps.dim}]")
    ests = [dim_profile(ps, theta, float(m), kind, **kwargs) for m in m_grid]
    fitted = _isotonic(np.array([e.value for e in ests]))
    for e, v in zip(ests, fitted):
        e.value = float(min(max(v, 0.0), e.m))
    # clamping to m can only lower late entries below m; monotonicity survives
    return ests


def curve_to_csv(estimates: list[ProfileEstimate]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["theta", "m", "kind", "value", "residual"])
    for e in estimates:
        writer.writerow([repr(e.theta), repr(e.m), e.kind, repr(e.value), repr(e.fit_residual)])
    return buf.getvalue()
