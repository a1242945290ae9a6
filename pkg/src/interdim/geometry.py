"""Finite point-set approximations of compact sets.

Every dimension estimate in this package is computed on a :class:`PointSet`,
a finite collection of points in R^n together with the radius ``resolution``
at which it approximates the underlying set.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist


class DomainError(ValueError):
    """Raised when an operation is called outside its mathematical domain."""


def _canonical(points: np.ndarray) -> np.ndarray:
    if len(points) == 0:
        return points
    order = np.lexsort(points.T[::-1])
    return points[order]


def _dedupe(points: np.ndarray, tol: float) -> np.ndarray:
    # greedy in canonical order; keeps the first point of each cluster
    if len(points) < 2:
        return points
    if tol <= 0:
        keep = np.ones(len(points), dtype=bool)
        keep[1:] = np.any(np.diff(points, axis=0) != 0, axis=1)
        return points[keep]
    tree = cKDTree(points)
    dropped = np.zeros(len(points), dtype=bool)
    keep = []
    for i in range(len(points)):
        if dropped[i]:
            continue
        keep.append(i)
        dropped[tree.query_ball_point(points[i], tol)] = True
    return points[np.array(keep)]


def diameter(points: np.ndarray) -> float:
    """Largest pairwise Euclidean distance (0 for fewer than two points)."""
    if len(points) < 2:
        return 0.0
    if points.shape[1] == 1:
        return float(points.max() - points.min())
    if len(points) > 2000:
        # the diameter is attained on the convex hull
        from scipy.spatial import ConvexHull

        try:
            points = points[ConvexHull(points).vertices]
        except Exception:
            pass
    return float(pdist(points).max())


@dataclass(frozen=True, eq=False)
class PointSet:
    """Immutable finite net of a compact set in R^dim.

    ``resolution`` is the claimed covering radius of the underlying set by
    ``points`` (0 for an exact finite set).  ``diameter_bound`` is an upper
    bound for all pairwise distances.

    Construct through :meth:`from_points`, which canonicalises order and
    removes near-duplicates at tolerance ``resolution / 4``.
    """

    dim: int
    points: np.ndarray = field(repr=False)
    resolution: float
    diameter_bound: float

    @classmethod
    def from_points(cls, points, resolution: float = 0.0, diameter_bound: float | None = None,
                    dim: int | None = None) -> "PointSet":
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1) if dim in (None, 1) else pts.reshape(-1, dim)
        if dim is None:
            dim = pts.shape[1] if pts.size else 1
        if pts.size == 0:
            pts = np.zeros((0, dim))
        if resolution < 0 or not math.isfinite(resolution):
            raise DomainError(f"resolution must be a finite non-negative number, got {resolution}")
        pts = _dedupe(_canonical(pts), resolution / 4.0)
        diam = diameter(pts)
        if diameter_bound is None:
            diameter_bound = max(diam, resolution) or 1.0
        pts.setflags(write=False)
        ps = cls(dim=int(dim), points=pts, resolution=float(resolution),
                 diameter_bound=float(diameter_bound))
        validate(ps, _diam=diam)
        return ps

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def with_resolution(self, resolution: float) -> "PointSet":
        return replace(self, resolution=float(resolution))


def validate(ps: PointSet, _diam: float | None = None) -> None:
    """Check the structural invariants of a point set; raise DomainError on failure."""
    pts = ps.points
    if ps.dim < 1:
        raise DomainError("dim must be a positive integer")
    if pts.ndim != 2 or pts.shape[1] != ps.dim:
        raise DomainError(f"points must have shape (N, {ps.dim}), got {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise DomainError("points contain non-finite coordinates")
    if ps.diameter_bound <= 0:
        raise DomainError("diameter_bound must be positive")
    diam = diameter(pts) if _diam is None else _diam
    if diam > ps.diameter_bound * (1 + 1e-12):
        raise DomainError(f"observed diameter {diam} exceeds diameter_bound {ps.diameter_bound}")
    if len(pts) >= 2 and ps.diameter_bound < ps.resolution:
        raise DomainError("diameter_bound must be at least the resolution")
    if len(pts) >= 2 and ps.resolution > 0:
        tree = cKDTree(pts)
        if tree.query_pairs(ps.resolution / 4.0 * (1 - 1e-12)):
            raise DomainError("points closer than resolution/4")


def gen_sequence_set(p: float, count: int) -> PointSet:
    """The set {0} together with k^(-p) for k = 1..count."""
    if not p > 0:
        raise DomainError(f"p must be positive, got {p}")
    if count < 1:
        raise DomainError(f"count must be at least 1, got {count}")
    k = np.arange(1, count + 1, dtype=float)
    pts = np.concatenate([[0.0], k ** -p])
    resolution = count ** -p - (count + 1) ** -p
    return PointSet.from_points(pts, resolution=resolution, diameter_bound=1.0)


def gen_cantor_like(ratio: float, copies: int, depth: int, dim: int = 1) -> PointSet:
    """Endpoints of the level-``depth`` intervals of a self-similar Cantor set.

    The unit interval is replaced by ``copies`` equally spaced subintervals of
    length ``ratio``, recursively.  For ``dim=2`` the product set is returned.
    """
    if not 0 < ratio <= 0.5:
        raise DomainError(f"ratio must lie in (0, 1/2], got {ratio}")
    if copies < 2:
        raise DomainError("copies must be at least 2")
    if depth < 1:
        raise DomainError("depth must be a positive integer")
    if dim not in (1, 2):
        raise DomainError("dim must be 1 or 2")
    if copies * ratio > 1 + 1e-15:
        raise DomainError(f"{copies} copies of ratio {ratio} overlap")
    offsets = np.arange(copies) * (1.0 - ratio) / (copies - 1)
    left = np.array([0.0])
    scale = 1.0
    for _ in range(depth):
        left = (left[:, None] + scale * offsets[None, :]).ravel()
        scale *= ratio
    axis = np.unique(np.concatenate([left, left + scale]))
    if dim == 1:
        pts = axis.reshape(-1, 1)
    else:
        xx, yy = np.meshgrid(axis, axis, indexing="ij")
        pts = np.column_stack([xx.ravel(), yy.ravel()])
    return PointSet.from_points(pts, resolution=scale, diameter_bound=math.sqrt(dim))


def uniform_grid(count: int, lo: float = 0.0, hi: float = 1.0) -> PointSet:
    """``count`` equally spaced points on [lo, hi]."""
    if count < 2:
        raise DomainError("a grid needs at least two points")
    pts = np.linspace(lo, hi, count)
    return PointSet.from_points(pts, resolution=(hi - lo) / (count - 1), diameter_bound=hi - lo)


def segment(count: int, angle: float, length: float = 1.0) -> PointSet:
    """Equally spaced points on a segment in the plane through the origin at ``angle``."""
    t = np.linspace(0.0, length, count)
    pts = np.column_stack([t * math.cos(angle), t * math.sin(angle)])
    return PointSet.from_points(pts, resolution=length / (count - 1), diameter_bound=length)


def delta_net(ps: PointSet, delta: float) -> PointSet:
    """Farthest-point subsample of ``ps`` with covering radius at most ``delta``.

    The farthest-point order is fixed by the input, so the retained set for a
    larger ``delta`` is a prefix of the one for a smaller ``delta``.
    """
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    pts = ps.points
    n = len(pts)
    if n == 0:
        return replace(ps, resolution=max(ps.resolution, delta))
    chosen = [0]
    dist = np.linalg.norm(pts - pts[0], axis=1)
    while True:
        far = int(np.argmax(dist))
        if dist[far] <= delta:
            break
        chosen.append(far)
        np.minimum(dist, np.linalg.norm(pts - pts[far], axis=1), out=dist)
    sub = _canonical(pts[np.array(chosen)])
    sub.setflags(write=False)
    return PointSet(dim=ps.dim, points=sub, resolution=max(ps.resolution, delta),
                    diameter_bound=ps.diameter_bound)


def normalised(ps: PointSet) -> PointSet:
    """Copy of ``ps`` rescaled to unit diameter (dimensions are scale invariant)."""
    diam = diameter(ps.points)
    if diam == 0 or diam == 1.0:
        return ps
    pts = ps.points / diam
    pts.setflags(write=False)
    return PointSet(dim=ps.dim, points=pts, resolution=ps.resolution / diam, diameter_bound=1.0)


def save_csv(ps: PointSet, path) -> None:
    """Write ``ps`` in the ``# dim=<n> resolution=<delta>`` CSV format."""
    with open(path, "w") as fh:
        fh.write(to_csv(ps))


def to_csv(ps: PointSet) -> str:
    buf = io.StringIO()
    buf.write(f"# dim={ps.dim} resolution={ps.resolution!r}\n")
    for p in ps.points:
        buf.write(",".join(format(float(v), ".17g") for v in p) + "\n")
    return buf.getvalue()


def load_csv(path) -> PointSet:
    with open(path) as fh:
        return from_csv(fh.read())


def from_csv(text: str) -> PointSet:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise DomainError("missing '# dim=<n> resolution=<delta>' header")
    meta = dict(tok.split("=", 1) for tok in lines[0][1:].split())
    try:
        dim = int(meta["dim"])
        resolution = float(meta["resolution"])
    except (KeyError, ValueError) as exc:
        raise DomainError(f"malformed header: {lines[0]!r}") from exc
    rows = [[float(v) for v in ln.split(",")] for ln in lines[1:] if ln.strip()]
    if any(len(r) != dim for r in rows):
        raise DomainError(f"every row must have {dim} coordinates")
    pts = np.array(rows, dtype=float).reshape(-1, dim)
    return PointSet.from_points(pts, resolution=resolution, dim=dim)
