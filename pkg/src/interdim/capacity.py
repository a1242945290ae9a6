"""Energies, equilibrium measures and capacities on finite point sets.

The capacity of a point set for kernel parameters ``kp`` is the reciprocal
of the smallest energy ``w^T K w`` over probability vectors ``w``, where
``K[i, j] = phi(|x_i - x_j|)``.  The kernel matrix has unit diagonal and
entries in (0, 1] but need not be positive semidefinite, so the minimiser is
searched from several starting points and the best local solution kept.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.spatial.distance import pdist, squareform

from .geometry import DomainError, PointSet
from .kernels import KernelParams, phi

MAX_POINTS = 4096


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-7
    max_iterations: int | None = None  # defaults to 10 * N**2
    restarts: int = 5
    seed: int = 0


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise DomainError("weights must be non-negative and sum to one")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, n: int) -> "DiscreteMeasure":
        return cls(np.full(n, 1.0 / n))

    def __len__(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class CapacityEstimate:
    capacity: float
    energy: float
    certificate_gap: float
    iterations: int
    converged: bool


def distance_matrix(ps: PointSet) -> np.ndarray:
    if len(ps) > MAX_POINTS:
        raise DomainError(f"{len(ps)} points exceed the dense budget of {MAX_POINTS}; "
                          "pass a coarser delta_net")
    if len(ps) == 1:
        return np.zeros((1, 1))
    return squareform(pdist(ps.points))


def kernel_matrix(ps_or_dist, kp: KernelParams) -> np.ndarray:
    dist = ps_or_dist if isinstance(ps_or_dist, np.ndarray) else distance_matrix(ps_or_dist)
    return np.ascontiguousarray(phi(dist, kp))


def _normalise(w: np.ndarray) -> np.ndarray:
    w = np.clip(w, 0.0, None)
    return w / w.sum()


def energy(mu: DiscreteMeasure, ps: PointSet, kp: KernelParams) -> float:
    """Double sum of w_i w_j phi(|x_i - x_j|), accumulated row block by row block."""
    if len(mu) != len(ps):
        raise DomainError(f"measure has {len(mu)} weights for {len(ps)} points")
    w = mu.weights
    pts = ps.points
    total = 0.0
    block = 256
    for start in range(0, len(pts), block):
        rows = pts[start:start + block]
        d = np.sqrt(((rows[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1))
        total += float(w[start:start + block] @ (phi(d, kp) @ w))
    return total


@njit(cache=True)
def _exchange(K, w, tol, max_iter):
    """Pairwise-exchange descent for min w^T K w on the simplex.

    Each step moves mass from the support point of largest potential to the
    point of smallest potential with an exact line search; the curvature
    along e_i - e_j is 2 - 2 K[i, j] >= 0 because K has unit diagonal and
    entries at most one.
    """
    n = w.shape[0]
    P = K @ w
    E = w @ P
    it = 0
    gap = 0.0
    while True:
        i = 0
        j = -1
        pmin = np.inf
        pmax = -np.inf
        for k in range(n):
            if P[k] < pmin:
                pmin = P[k]
                i = k
            if w[k] > 0.0 and P[k] > pmax:
                pmax = P[k]
                j = k
        gap = E - pmin
        if gap < tol * E or it >= max_iter or i == j:
            break
        curv = 2.0 - 2.0 * K[i, j]
        step = w[j]
        if curv > 0.0:
            step = min(step, (P[j] - P[i]) / curv)
        if step <= 0.0:
            break
        w[i] += step
        w[j] -= step
        if w[j] < 1e-300:
            w[j] = 0.0
        Ki = K[i]
        Kj = K[j]
        for k in range(n):
            P[k] += step * (Ki[k] - Kj[k])
        it += 1
        if it % n == 0:
            P = K @ w
        E = w @ P
    P = K @ w
    E = w @ P
    return E, E - P.min(), it


def minimise_energy(K: np.ndarray, config: SolverConfig = SolverConfig(),
                    starts: list[np.ndarray] | None = None):
    """Best local minimiser of w^T K w over the simplex from several starts.

    Returns ``(weights, energy, gap, iterations, converged)``.
    """
    n = K.shape[0]
    if n == 1:
        return np.ones(1), 1.0, 0.0, 0, True
    max_iter = config.max_iterations if config.max_iterations is not None else 10 * n * n
    if starts is None:
        starts = [np.full(n, 1.0 / n)]
        rng = np.random.default_rng(config.seed)
        starts += [rng.dirichlet(np.ones(n)) for _ in range(config.restarts)]
    best = None
    total_it = 0
    for w0 in starts:
        w = np.array(_normalise(np.asarray(w0, dtype=float)))
        E, gap, it = _exchange(K, w, config.tolerance, max_iter)
        total_it += it
        if best is None or E < best[1]:
            best = (_normalise(w), E, gap)
    w, E, gap = best
    return w, float(E), float(gap), total_it, bool(gap < config.tolerance * E)


def equilibrium(ps: PointSet, kp: KernelParams, solver: SolverConfig = SolverConfig(),
                *, dist: np.ndarray | None = None):
    """Approximate equilibrium measure and capacity of ``ps`` for kernel ``kp``.

    Never raises on slow convergence: the best iterate is returned with
    ``converged=False``.
    """
    if len(ps) == 0:
        raise DomainError("capacity of an empty set is undefined")
    K = kernel_matrix(distance_matrix(ps) if dist is None else dist, kp)
    w, E, gap, it, ok = minimise_energy(K, solver)
    return DiscreteMeasure(w), CapacityEstimate(capacity=1.0 / E, energy=E,
                                                certificate_gap=max(gap, 0.0),
                                                iterations=it, converged=ok)


def potential(mu: DiscreteMeasure, ps: PointSet, kp: KernelParams) -> np.ndarray:
    """P(x_i) = sum_j w_j phi(|x_i - x_j|)."""
    return kernel_matrix(ps, kp) @ mu.weights


@dataclass(frozen=True)
class BoundReport:
    holds: bool
    capacity: float
    bound: float
    margin: float
    B: float
    estimate: CapacityEstimate = field(repr=False)


def capacity_bound_check(ps: PointSet, kp: KernelParams,
                         solver: SolverConfig = SolverConfig()) -> BoundReport:
    """Check C^{t,t}_{r,theta} <= B^t r^-t with B the diameter bound of ``ps``.

    Every kernel value is at least (r/B)^t once B >= max(diam, r), hence the
    energy is at least B^-t r^t.  ``B`` is raised to ``r`` if the diameter
    bound is smaller, which is needed for the flat regime.
    """
    if not math.isclose(kp.s, kp.m, rel_tol=0, abs_tol=1e-15):
        raise DomainError("the bound is stated for s = m")
    t = kp.m
    B = max(ps.diameter_bound, kp.r)
    _, est = equilibrium(ps, kp, solver)
    bound = (B / kp.r) ** t
    margin = bound - est.capacity
    return BoundReport(holds=margin >= 0, capacity=est.capacity, bound=bound,
                       margin=margin, B=B, estimate=est)
