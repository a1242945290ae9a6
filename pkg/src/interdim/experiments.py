"""Numerical harnesses for the image-dimension results.

Each harness computes the two sides of one claim with independent
estimators and returns a :class:`VerificationReport`.  The covering route
(:mod:`interdim.covering`) always estimates the image side and the capacity
route (:mod:`interdim.profiles`) the profile side.
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .covering import FLOOR_FACTOR as COVER_FLOOR, dim_from_covering
from .geometry import DomainError, PointSet, diameter, normalised
from .profiles import dim_profile, profile_curve
from .scaling import dyadic_ladder, geometric_ladder
from .stochastic import FbmParams, FbmSampler, HolderMapSpec, holder_apply

FBM_TOLERANCE = 0.15
HOLDER_TOLERANCE = 0.1


@dataclass
class VerificationReport:
    """Outcome of one harness run.

    ``passed`` is ``margin >= -tolerance``.  Everything except ``runtime`` is
    a deterministic function of the inputs and seeds.
    """

    claim: str
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    diagnostics: dict = field(default_factory=dict)
    seeds: list[int] = field(default_factory=list)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.margin >= -self.tolerance)

    def payload(self) -> dict:
        return {"claim": self.claim, "lhs": self.lhs, "rhs": self.rhs, "margin": self.margin,
                "tolerance": self.tolerance, "passed": self.passed, "seeds": list(self.seeds),
                "diagnostics": _plain(self.diagnostics)}

    def to_json(self) -> str:
        return json.dumps({"result": self.payload(), "metadata": {"runtime": self.runtime}},
                          indent=2, sort_keys=True)


def _plain(obj):
    """Convert numpy containers and scalars to JSON-ready Python objects."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _map(fn, items, workers: int):
    """Ordered map, optionally over a process pool; results do not depend on ``workers``."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def image_ladder(image: PointSet, minimum: int = 4) -> np.ndarray:
    """Two scales per octave from 1/2 down to twice the resolution of a unit-diameter image.

    Images of nets under rough maps have coarse resolution (delta^alpha for
    fBm), so the dyadic ladder is too short to fit.
    """
    ladder = geometric_ladder(0.5, 2 * image.resolution, per_octave=2)
    if len(ladder) < minimum:
        raise DomainError(f"image resolution {image.resolution:.3g} leaves only "
                          f"{len(ladder)} scales; use a finer net")
    return ladder


def _image_dim(image: PointSet, theta: float, kind: str) -> float:
    """Covering estimate on the default ladder, or on :func:`image_ladder` when that is too short."""
    if len(image) == 1:
        return 0.0
    image = normalised(image)
    ladder = dyadic_ladder(image, finest=COVER_FLOOR * image.resolution)
    if len(ladder) < 4:
        ladder = image_ladder(image)
    return dim_from_covering(image, theta, kind, scale_ladder=ladder, normalise=False)


def verify_holder_bound(ps: PointSet, spec: HolderMapSpec, theta: float, kind: str = "lower",
                        target_alpha: float | None = None,
                        tolerance: float = HOLDER_TOLERANCE) -> VerificationReport:
    """Image dimension of a Hoelder map against (1/alpha) times the profile at m * alpha.

    ``target_alpha`` replaces the exponent on the profile side only; it exists
    for negative controls.
    """
    t0 = time.perf_counter()
    m = spec.codomain_dim(ps.dim)
    alpha = spec.alpha if target_alpha is None else target_alpha
    if not 0 < m * alpha <= ps.dim + 1e-12:
        raise DomainError(f"m * alpha = {m * alpha} must lie in (0, {ps.dim}]")
    image = holder_apply(ps, spec)
    lhs = _image_dim(image, theta, kind)
    if len(ps) == 1:
        rhs, prof = 0.0, None
    else:
        prof = dim_profile(ps, theta, m * alpha, kind)
        rhs = prof.value / alpha
    diag = {"map": spec.map, "alpha": spec.alpha, "target_alpha": alpha, "image_dim": m,
            "theta": theta, "kind": kind, "image_points": len(image),
            "provenance": {"lhs": "covering-dp" if m == 1 else "covering-grid",
                           "rhs": "capacity-profile"}}
    if prof is not None:
        diag["profile"] = {"value": prof.value, "fit_residual": prof.fit_residual,
                           "converged": prof.converged}
    return VerificationReport("holder-image-bound", lhs, rhs, rhs - lhs, tolerance, diag,
                              runtime=time.perf_counter() - t0)


def verify_fbm_theorem(ps: PointSet, alpha: float, m: int, theta: float, kind: str = "lower",
                       trials: int = 16, seed: int = 0, target_alpha: float | None = None,
                       tolerance: float = FBM_TOLERANCE, workers: int = 1) -> VerificationReport:
    """Median image dimension of ``trials`` fBm samples against (1/alpha) * profile at m * alpha.

    Trial ``k`` uses the replicate stream ``k`` of ``seed``, so a run is
    reproducible and independent of ``workers``.
    """
    t0 = time.perf_counter()
    if trials < 8:
        raise DomainError(f"need at least 8 trials, got {trials}")
    fp = FbmParams(alpha, m, seed)
    a_t = alpha if target_alpha is None else target_alpha
    if not m * a_t <= ps.dim + 1e-12:
        raise DomainError(f"m * alpha = {m * a_t} exceeds the ambient dimension {ps.dim}")
    if len(ps) == 1:
        estimates = [0.0] * trials
        rhs, prof = 0.0, None
    else:
        prof = dim_profile(ps, theta, m * a_t, kind)
        rhs = prof.value / a_t
        sampler = FbmSampler(normalised(ps), alpha)
        images = [sampler.sample(fp, k).image() for k in range(trials)]
        estimates = _map(_FbmTrial(theta, kind), images, workers)
    lhs = float(np.median(estimates))
    diag = {"alpha": alpha, "target_alpha": a_t, "m": m, "theta": theta, "kind": kind,
            "trials": trials, "trial_estimates": estimates,
            "spread": float(np.max(estimates) - np.min(estimates)),
            "provenance": {"lhs": "covering-dp" if m == 1 else "covering-grid",
                           "rhs": "capacity-profile"}}
    if prof is not None:
        diag["profile"] = {"value": prof.value, "fit_residual": prof.fit_residual,
                           "converged": prof.converged}
    return VerificationReport("fbm-image-dimension", lhs, rhs, -abs(lhs - rhs), tolerance, diag,
                              seeds=[seed], runtime=time.perf_counter() - t0)


@dataclass(frozen=True)
class _FbmTrial:
    theta: float
    kind: str

    def __call__(self, image: PointSet) -> float:
        return _image_dim(image, self.theta, self.kind)


def _max_jump(values) -> float:
    values = np.asarray(values, dtype=float)
    return float(np.max(np.abs(np.diff(values)))) if len(values) > 1 else 0.0


def verify_continuity_corollaries(ps: PointSet, alpha_grid, theta_grid, hausdorff_dim=None,
                                  m_grid=None, kind: str = "lower", theta_jump: float = 0.15,
                                  m_jump: float = 0.1, strict_gap: float = 0.05,
                                  ) -> VerificationReport:
    """Continuity in theta and m of the fBm image dimension, and the strict drop below n.

    Sub-checks, each passing when its margin is non-negative:

    * ``theta``: for each alpha, (1/alpha) * profile at m = n * alpha has
      adjacent jumps at most ``theta_jump`` along ``theta_grid``;
    * ``strict``: when ``hausdorff_dim`` is given, every alpha above
      hausdorff_dim / n has (1/alpha) * profile at theta = 1 below
      n - ``strict_gap``;
    * ``m``: at every theta, the isotonic profile curve over ``m_grid``
      jumps by at most ``m_jump``.

    The report margin is the smallest sub-check margin, with tolerance 0.
    """
    t0 = time.perf_counter()
    alpha_grid = sorted(float(a) for a in alpha_grid)
    theta_grid = sorted(float(t) for t in theta_grid)
    if len(alpha_grid) < 4 or len(theta_grid) < 4:
        raise DomainError("alpha and theta grids need at least 4 entries")
    if alpha_grid[0] <= 0 or alpha_grid[-1] > 1:
        raise DomainError("alpha values must lie in (0, 1]")
    n = ps.dim
    m_grid = np.linspace(n / 10, n, 10) if m_grid is None else np.asarray(m_grid, dtype=float)
    cache: dict[tuple[float, float], float] = {}

    def prof(theta, m):
        key = (theta, round(m, 12))
        if key not in cache:
            cache[key] = 0.0 if len(ps) == 1 else dim_profile(ps, theta, m, kind).value
        return cache[key]

    checks = []
    curves = {}
    for a in alpha_grid:
        curve = [prof(t, n * a) / a for t in theta_grid]
        curves[repr(a)] = curve
        checks.append({"check": "theta", "alpha": a, "observed": _max_jump(curve),
                       "limit": theta_jump})
    if hausdorff_dim is not None:
        for a in alpha_grid:
            if a > hausdorff_dim / n:
                val = prof(1.0, n * a) / a
                checks.append({"check": "strict", "alpha": a, "observed": val,
                               "limit": n - strict_gap})
    m_curves = {}
    for t in theta_grid:
        if len(ps) == 1:
            vals = [0.0] * len(m_grid)
        else:
            vals = [e.value for e in profile_curve(ps, t, kind, m_grid)]
        m_curves[repr(t)] = vals
        checks.append({"check": "m", "theta": t, "observed": _max_jump(vals), "limit": m_jump})
    for c in checks:
        c["margin"] = c["limit"] - c["observed"]
    worst = min(checks, key=lambda c: c["margin"])
    diag = {"theta_grid": theta_grid, "alpha_grid": alpha_grid, "m_grid": m_grid,
            "theta_curves": curves, "m_curves": m_curves, "checks": checks, "kind": kind,
            "hausdorff_dim": hausdorff_dim}
    return VerificationReport("continuity-corollaries", worst["observed"], worst["limit"],
                              worst["margin"], 0.0, diag, runtime=time.perf_counter() - t0)


@dataclass(frozen=True)
class _Projection:
    ps: PointSet
    theta: float
    kind: str

    def __call__(self, angle: float) -> float:
        return projection_dim(self.ps, angle, self.theta, self.kind)


def projection_dim(ps: PointSet, angle: float, theta: float, kind: str = "lower") -> float:
    """Covering estimate of the projection of a planar set onto the line at ``angle``.

    The projected net inherits the resolution scaled by the contraction
    diam(projection) / diam(set), capped at the original resolution.  A
    projection narrower than the resolution counts as a point.
    """
    x = ps.points @ np.array([math.cos(angle), math.sin(angle)])
    width = float(x.max() - x.min())
    full = diameter(ps.points)
    if width <= ps.resolution or full == 0:
        return 0.0
    res = ps.resolution * min(1.0, width / full)
    proj = PointSet.from_points(x, resolution=res, diameter_bound=width)
    if len(proj) == 1:
        return 0.0
    return dim_from_covering(proj, theta, kind)


def exceptional_scan(ps: PointSet, theta: float, lambda_grid=(1.0,), directions: int = 64,
                     kind: str = "lower", gap: float = 0.1, workers: int = 1) -> VerificationReport:
    """Projection dimensions over equally spaced directions of a planar set.

    For each lambda, a direction is exceptional when its estimate falls below
    the profile at m = lambda minus ``gap``.  The exceptional set of
    directions has zero length for every lambda <= 1, so at most two of the
    sampled directions may be flagged.
    """
    t0 = time.perf_counter()
    if ps.dim != 2:
        raise DomainError("the projection scan needs a planar set")
    if directions < 64:
        raise DomainError(f"need at least 64 directions, got {directions}")
    lambda_grid = [float(v) for v in lambda_grid]
    if any(not 0 < v <= 1 for v in lambda_grid):
        raise DomainError("lambda values must lie in (0, 1]")
    unit = normalised(ps)
    angles = np.arange(directions) * math.pi / directions
    estimates = _map(_Projection(unit, theta, kind), angles, workers)
    est = np.array(estimates)
    allowed = 2.0 / directions
    per_lambda = []
    for lam in lambda_grid:
        target = 0.0 if len(ps) == 1 else dim_profile(unit, theta, lam, kind).value
        flagged = np.nonzero(est < target - gap)[0]
        per_lambda.append({"lambda": lam, "profile": target, "threshold": target - gap,
                           "exceptional": flagged.tolist(),
                           "fraction": len(flagged) / directions})
    worst = max(per_lambda, key=lambda d: d["fraction"])
    diag = {"theta": theta, "kind": kind, "angles": angles, "estimates": est,
            "per_lambda": per_lambda, "allowed_fraction": allowed,
            "provenance": {"lhs": "covering-dp", "rhs": "capacity-profile"}}
    return VerificationReport("projection-exceptional-fraction", worst["fraction"], allowed,
                              allowed - worst["fraction"], 0.0, diag,
                              runtime=time.perf_counter() - t0)
