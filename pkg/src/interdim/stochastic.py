"""Random and deterministic maps whose images the dimension results govern.

* index-alpha fractional Brownian motion sampled exactly on a point set,
* named Hoelder maps with known exponent and constant,
* orthogonal projections onto random subspaces (Grassmannian sampling).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import stats
from scipy.spatial.distance import cdist, pdist

from .geometry import DomainError, PointSet
from .kernels import KernelParams, phi, phi_mod

MAX_FBM_POINTS = 4096
JITTERS = (0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8)


def replicate_rng(seed: int, replicate: int = 0) -> np.random.Generator:
    """Independent stream for one replicate, reproducible without drawing the others."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replicate,)))


# --- fractional Brownian motion -------------------------------------------------

@dataclass(frozen=True)
class FbmParams:
    alpha: float
    target_dim: int = 1
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        if int(self.target_dim) != self.target_dim or self.target_dim < 1:
            raise DomainError(f"target_dim must be a positive integer, got {self.target_dim}")


@dataclass(frozen=True, eq=False)
class FbmSample:
    params: FbmParams
    source: PointSet
    values: np.ndarray = field(repr=False)  # (N, target_dim), aligned with source.points

    def image(self) -> PointSet:
        """The sampled image as a point set.

        Its resolution is the increment standard deviation ``delta**alpha`` at
        the source resolution.
        """
        res = self.source.resolution ** self.params.alpha if self.source.resolution > 0 else 0.0
        return PointSet.from_points(self.values, resolution=res, dim=self.params.target_dim)

    def to_csv(self) -> str:
        n = self.source.dim
        header = [f"x{i}" for i in range(n)] + [f"b{i}" for i in range(self.params.target_dim)]
        rows = [",".join(header)]
        for x, b in zip(self.source.points, self.values):
            rows.append(",".join(format(float(v), ".17g") for v in (*x, *b)))
        return "\n".join(rows) + "\n"


def fbm_covariance(points: np.ndarray, alpha: float) -> np.ndarray:
    """Cov(B(x), B(y)) = (|x|^2a + |y|^2a - |x - y|^2a) / 2."""
    h = 2 * alpha
    norms = np.linalg.norm(points, axis=1) ** h
    d = cdist(points, points) ** h
    return 0.5 * (norms[:, None] + norms[None, :] - d)


class FbmSampler:
    """Exact sampler for index-alpha fBm on a fixed point set.

    The covariance factor is computed once and shared by all replicates.
    The origin is the anchor: B(0) = 0, so points at the origin are excluded
    from the factorisation and receive the value 0.
    """

    def __init__(self, ps: PointSet, alpha: float):
        if len(ps) > MAX_FBM_POINTS:
            raise DomainError(f"{len(ps)} points exceed the fBm budget of {MAX_FBM_POINTS}")
        FbmParams(alpha)
        self.source = ps
        self.alpha = alpha
        self._free = np.linalg.norm(ps.points, axis=1) > 0

    @cached_property
    def factor(self) -> np.ndarray:
        pts = self.source.points[self._free]
        if len(pts) == 0:
            return np.zeros((0, 0))
        cov = fbm_covariance(pts, self.alpha)
        scale = float(np.max(np.diag(cov)))
        for jitter in JITTERS:
            try:
                return np.linalg.cholesky(cov + jitter * scale * np.eye(len(pts)))
            except np.linalg.LinAlgError:
                continue
        gaps = pdist(pts)
        raise np.linalg.LinAlgError(
            f"fBm covariance not factorisable with jitter up to {JITTERS[-1]:g}; "
            f"smallest point separation {gaps.min() if len(gaps) else 0:.3g} "
            f"(increment scale {gaps.min() ** self.alpha if len(gaps) else 0:.3g})")

    def sample(self, fp: FbmParams, replicate: int = 0) -> FbmSample:
        if fp.alpha != self.alpha:
            raise DomainError("sampler was built for a different alpha")
        rng = replicate_rng(fp.seed, replicate)
        values = np.zeros((len(self.source), fp.target_dim))
        nfree = int(self._free.sum())
        if nfree:
            z = rng.standard_normal((nfree, fp.target_dim))
            values[self._free] = self.factor @ z
        return FbmSample(params=fp, source=self.source, values=values)


def fbm_sample(ps: PointSet, fp: FbmParams, replicate: int = 0) -> FbmSample:
    """One realisation of B_alpha: R^n -> R^m on the points of ``ps``.

    Components are independent; increments B(x) - B(y) have variance
    |x - y|^(2 alpha).
    """
    return FbmSampler(ps, fp.alpha).sample(fp, replicate)


def increment_bound(alpha: float, m: int, distance: float, r: float) -> float:
    """Upper bound 2^m (r^(1/alpha) / |x - y|)^(m alpha) for P(|B(x) - B(y)| <= r)."""
    return 2.0 ** m * (r ** (1 / alpha) / distance) ** (m * alpha)


def increment_probability(alpha: float, m: int, distance: float, r: float) -> float:
    """Exact P(|B(x) - B(y)| <= r) for the Euclidean norm of m independent components."""
    sigma = distance ** alpha
    return float(stats.chi.cdf(r / sigma, df=m))


# --- Hoelder maps ----------------------------------------------------------------

@dataclass(frozen=True)
class HolderMapSpec:
    """A named map f with |f(x) - f(y)| <= c |x - y|^alpha on the unit ball.

    Maps: ``identity``; ``radial_power`` (x -> |x|^(alpha-1) x, constant
    2^(1-alpha)); ``coordinate_projection`` (keeps ``coords``); ``piecewise_linear``
    on [0, 1] through ``knots`` (x-values) and ``knot_values``; ``subspace``
    (coordinates of the orthogonal projection onto ``basis`` rows).
    """

    map: str
    alpha: float = 1.0
    c: float = 1.0
    coords: tuple[int, ...] = (0,)
    knots: tuple[float, ...] = ()
    knot_values: tuple[float, ...] = ()
    basis: tuple[tuple[float, ...], ...] = ()

    @classmethod
    def identity(cls) -> "HolderMapSpec":
        return cls("identity", 1.0, 1.0)

    @classmethod
    def radial_power(cls, alpha: float) -> "HolderMapSpec":
        if not 0 < alpha <= 1:
            raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
        return cls("radial_power", alpha, 2.0 ** (1 - alpha))

    @classmethod
    def coordinate_projection(cls, coords) -> "HolderMapSpec":
        return cls("coordinate_projection", 1.0, 1.0, coords=tuple(int(c) for c in coords))

    @classmethod
    def piecewise_linear(cls, knots, values) -> "HolderMapSpec":
        knots = np.asarray(knots, dtype=float)
        values = np.asarray(values, dtype=float)
        if len(knots) < 2 or len(knots) != len(values) or np.any(np.diff(knots) <= 0):
            raise DomainError("knots must be strictly increasing and match the values")
        lip = float(np.max(np.abs(np.diff(values) / np.diff(knots))))
        return cls("piecewise_linear", 1.0, lip, knots=tuple(knots), knot_values=tuple(values))

    @classmethod
    def subspace(cls, sub: "Subspace") -> "HolderMapSpec":
        return cls("subspace", 1.0, 1.0, basis=tuple(map(tuple, sub.basis)))

    def codomain_dim(self, n: int) -> int:
        if self.map == "coordinate_projection":
            return len(self.coords)
        if self.map == "piecewise_linear":
            return 1
        if self.map == "subspace":
            return len(self.basis)
        return n

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if self.map == "identity":
            return pts.copy()
        if self.map == "radial_power":
            norms = np.linalg.norm(pts, axis=1, keepdims=True)
            with np.errstate(divide="ignore", invalid="ignore"):
                factor = np.where(norms > 0, norms ** (self.alpha - 1), 0.0)
            return pts * factor
        if self.map == "coordinate_projection":
            return pts[:, list(self.coords)]
        if self.map == "piecewise_linear":
            if pts.shape[1] != 1:
                raise DomainError("piecewise_linear maps act on the line")
            return np.interp(pts[:, 0], self.knots, self.knot_values).reshape(-1, 1)
        if self.map == "subspace":
            return pts @ np.asarray(self.basis).T
        raise DomainError(f"unknown map {self.map!r}")


def holder_apply(ps: PointSet, spec: HolderMapSpec) -> PointSet:
    """Image of ``ps`` under ``spec``; a delta-net maps to a c*delta^alpha-net."""
    pts = ps.points
    if spec.map == "piecewise_linear":
        if len(pts) and (pts.min() < spec.knots[0] - 1e-12 or pts.max() > spec.knots[-1] + 1e-12):
            raise DomainError("points outside the knot range of the piecewise-linear map")
    elif spec.map == "coordinate_projection":
        if max(spec.coords) >= ps.dim or min(spec.coords) < 0:
            raise DomainError("projection coordinates out of range")
    elif spec.map == "subspace":
        if len(spec.basis[0]) != ps.dim:
            raise DomainError("subspace lives in a different ambient dimension")
    elif len(pts) and np.max(np.linalg.norm(pts, axis=1)) > 1 + 1e-12:
        raise DomainError(f"{spec.map} is only certified on the unit ball")
    image = spec(pts)
    res = spec.c * ps.resolution ** spec.alpha if ps.resolution > 0 else 0.0
    bound = spec.c * ps.diameter_bound ** spec.alpha
    return PointSet.from_points(image, resolution=res, dim=spec.codomain_dim(ps.dim),
                                diameter_bound=max(bound, res))


# --- projections ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Subspace:
    """An m-dimensional subspace of R^n given by orthonormal basis rows."""

    ambient: int
    dim: int
    basis: np.ndarray = field(repr=False)  # (dim, ambient)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.shape != (self.dim, self.ambient):
            raise DomainError(f"basis must have shape ({self.dim}, {self.ambient})")
        if not np.allclose(b @ b.T, np.eye(self.dim), atol=1e-12, rtol=0):
            raise DomainError("basis is not orthonormal")
        object.__setattr__(self, "basis", b)

    @classmethod
    def line(cls, angle: float) -> "Subspace":
        return cls(2, 1, np.array([[math.cos(angle), math.sin(angle)]]))

    def project(self, points: np.ndarray) -> np.ndarray:
        """Coordinates of pi_V x in the basis (an isometric copy of pi_V x)."""
        return np.asarray(points, dtype=float) @ self.basis.T


def grassmannian_sample(n: int, m: int, seed: int, count: int) -> list[Subspace]:
    """Rotation-invariant random m-planes in R^n from orthonormalised Gaussian frames."""
    if not 1 <= m < n <= 3:
        raise DomainError(f"need 1 <= m < n <= 3, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        q, rr = np.linalg.qr(rng.standard_normal((n, m)))
        q = q * np.sign(np.diag(rr))  # Haar-distributed frame
        # one Gram-Schmidt pass against rounding, keeps the Gram matrix at identity to 1e-15
        q, _ = np.linalg.qr(q)
        out.append(Subspace(n, m, q.T.copy()))
    return out


def projection_family_samples(n: int, m: int, seed: int, count: int) -> np.ndarray:
    """Stacked bases (count, m, n) of random m-planes, for vectorised projections."""
    return np.stack([v.basis for v in grassmannian_sample(n, m, seed, count)])


def projected_ball_probability(n: int, m: int, distance: float, u) -> np.ndarray:
    """P(|pi_V z| <= u) for |z| = distance and V uniform on G(n, m).

    For a uniform subspace, |pi_V z|^2 / |z|^2 follows Beta(m/2, (n-m)/2).
    """
    u = np.asarray(u, dtype=float)
    t = np.clip((u / distance) ** 2, 0.0, 1.0)
    return stats.beta.cdf(t, m / 2, (n - m) / 2)


@dataclass
class DominationReport:
    c_hat: float
    bound: float
    slack: float
    passed: bool
    by_regime: dict
    pairs: int
    trials: int


def kernel_domination_check(ps: PointSet, theta: float, s: float, m: int, r: float,
                            trials: int = 2000, pairs: int = 200, seed: int = 0,
                            slack: float = 0.2) -> DominationReport:
    """Monte Carlo check that projections satisfy the kernel domination inequality.

    For random pairs (x, y) of ``ps`` and random m-planes V, estimates
    E_V[phi_mod(|pi_V x - pi_V y|)] / phi(|x - y|) with both kernels at
    (r, theta, s) and phi using exponent m.  The largest ratio is compared with
    s / (m - s) + 1.
    """
    n = ps.dim
    if n not in (2, 3):
        raise DomainError("projection family checks need ambient dimension 2 or 3")
    if not 0 <= s < m:
        raise DomainError(f"need 0 <= s < m, got s={s}, m={m}")
    kp_mod = KernelParams(r, theta, s, max(s, 1e-12) if s > 0 else 1.0)
    kp = KernelParams(r, theta, s, m)
    rng = np.random.default_rng(seed)
    pts = ps.points
    i = rng.integers(0, len(pts), pairs)
    j = rng.integers(0, len(pts), pairs)
    keep = i != j
    diff = pts[i[keep]] - pts[j[keep]]
    dist = np.linalg.norm(diff, axis=1)
    bases = projection_family_samples(n, m, seed + 1, trials)
    proj = np.linalg.norm(np.einsum("tmn,pn->ptm", bases, diff), axis=-1)
    integral = phi_mod(proj, kp_mod).mean(axis=1)
    ratio = integral / phi(dist, kp)
    regimes = np.where(dist < r, 1, np.where(dist <= kp.r_theta, 2, 3))
    by_regime = {f"case{k}": float(ratio[regimes == k].max()) for k in (1, 2, 3) if np.any(regimes == k)}
    bound = s / (m - s) + 1
    c_hat = float(ratio.max()) if len(ratio) else 0.0
    return DominationReport(c_hat=c_hat, bound=bound, slack=slack, passed=c_hat <= bound + slack,
                            by_regime=by_regime, pairs=int(keep.sum()), trials=trials)
