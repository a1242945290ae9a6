import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from interdim.capacity import equilibrium
from interdim.covering import (cover_sum_1d, cover_sum_grid, cover_sums, cover_sums_1d,
                               dim_from_covering)
from interdim.geometry import DomainError, PointSet, gen_sequence_set, uniform_grid
from interdim.kernels import KernelParams

GRID11 = PointSet.from_points(np.arange(11) / 10)


def exhaustive_cover(x, r, R, s, tol=1e-12):
    """Oracle: try every split of the sorted points into consecutive groups."""
    x = np.sort(x)
    n = len(x)
    best = math.inf
    for cuts in itertools.product((False, True), repeat=n - 1):
        start, cost = 0, 0.0
        for i in range(1, n + 1):
            if i == n or cuts[i - 1]:
                span = x[i - 1] - x[start]
                if span > R * (1 + tol):
                    cost = math.inf
                    break
                cost += max(span, r) ** s
                start = i
        best = min(best, cost)
    return best


@pytest.mark.parametrize("r,theta,s,expected", [(0.1, 1, 1, 0.6), (0.01, 0.5, 1, 0.11),
                                                (0.01, 0.5, 0.5, 1.1)])
def test_grid_of_eleven_examples(r, theta, s, expected):
    sol = cover_sum_1d(GRID11, KernelParams(r, theta, s, 1))
    assert sol.cost == pytest.approx(expected, rel=1e-12)
    assert sol.cost == pytest.approx(exhaustive_cover(GRID11.points[:, 0], r, r ** theta, s), rel=1e-12)
    assert sol.exact


def test_single_point_costs_r_to_the_s():
    ps = PointSet.from_points([0.4])
    kp = KernelParams(0.05, 0.5, 0.7, 1)
    sol = cover_sum_1d(ps, kp)
    assert sol.cost == pytest.approx(0.05 ** 0.7)
    assert len(sol.pieces) == 1
    sol2 = cover_sum_grid(PointSet.from_points([[0.3, 0.2]]), KernelParams(0.05, 0.5, 0.7, 2))
    assert sol2.cost == pytest.approx(0.05 ** 0.7)


def test_resolution_precondition():
    ps = PointSet.from_points([0.0, 0.5], resolution=0.2)
    with pytest.raises(DomainError):
        cover_sum_1d(ps, KernelParams(0.1, 1, 1, 1))
    with pytest.raises(DomainError):
        cover_sum_1d(PointSet.from_points([[0.0, 0.0]]), KernelParams(0.1, 1, 1, 2))


def test_dp_matches_exhaustive_search():
    rng = np.random.default_rng(1)
    for _ in range(100):
        n = int(rng.integers(1, 13))
        x = rng.random(n)
        r = float(rng.uniform(0.01, 0.3))
        theta = float(rng.uniform(0.2, 1))
        s = float(rng.uniform(0, 1))
        ps = PointSet.from_points(x)
        got = cover_sum_1d(ps, KernelParams(r, theta, s, 1)).cost
        assert got == pytest.approx(exhaustive_cover(ps.points[:, 0], r, r ** theta, s), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 40), st.floats(0.01, 0.3), st.floats(0.1, 1.0),
       st.floats(0.0, 2.0), st.integers(1, 2))
def test_cover_solution_invariants(seed, n, r, theta, s, dim):
    rng = np.random.default_rng(seed)
    ps = PointSet.from_points(rng.random((n, dim)))
    kp = KernelParams(r, theta, s, max(s, 2.0))
    sols = [cover_sum_grid(ps, kp)] + ([cover_sum_1d(ps, kp)] if dim == 1 else [])
    for sol in sols:
        assert sol.covers(ps, metric="cube")
        assert np.all(sol.diameters >= r * (1 - 1e-12))
        assert np.all(sol.diameters <= kp.r_theta * (1 + 1e-12))
        assert sol.cost == pytest.approx(np.sum(sol.diameters ** s), rel=1e-12)
        assert sol.cost <= len(ps) * kp.r_theta ** s * (1 + 1e-12)
    if dim == 1:
        assert sols[1].cost <= sols[0].cost * (1 + 1e-12)


def test_grid_heuristic_within_factor_two_on_the_line():
    rng = np.random.default_rng(4)
    for _ in range(100):
        ps = PointSet.from_points(rng.random(int(rng.integers(5, 200))))
        kp = KernelParams(float(2.0 ** -rng.integers(3, 8)), float(rng.choice([0.25, 0.5, 1.0])),
                          float(rng.uniform(0, 1)), 1.0)
        exact = cover_sum_1d(ps, kp).cost
        assert exact <= cover_sum_grid(ps, kp).cost <= 2 * exact


def test_grid_heuristic_on_square_grid():
    g = np.arange(33) / 32
    ps = PointSet.from_points(np.array([(a, b) for a in g for b in g]), resolution=1 / 32)
    sol = cover_sum_grid(ps, KernelParams(1 / 32, 1, 2, 2))
    assert 0.25 <= sol.cost <= 4
    # direct count oracle: cells of side 1/32 anchored at the origin, 33 per axis
    assert sol.cost == pytest.approx(33 ** 2 / 32 ** 2, rel=1e-12)


def test_smaller_theta_never_increases_cost():
    rng = np.random.default_rng(6)
    for _ in range(50):
        ps = PointSet.from_points(rng.random(60))
        r, s = float(rng.uniform(0.01, 0.1)), float(rng.uniform(0, 1))
        t1, t2 = sorted(rng.uniform(0.1, 1, 2))
        assert cover_sums_1d(ps, r, t1, [s])[0] <= cover_sums_1d(ps, r, t2, [s])[0] * (1 + 1e-12)


def test_cover_sums_dispatch_agrees():
    ps = gen_sequence_set(1, 50)
    assert np.allclose(cover_sums(ps, 0.05, 0.5, [0.3, 0.6]),
                       [cover_sum_1d(ps, KernelParams(0.05, 0.5, s, 1)).cost for s in (0.3, 0.6)])


def test_cover_solution_json():
    sol = cover_sum_1d(GRID11, KernelParams(0.1, 1, 1, 1))
    data = json.loads(sol.to_json())
    assert data["exact"] is True
    assert data["cost"] == pytest.approx(0.6)
    assert len(data["pieces"]) == 6


def test_cover_vs_capacity_inequality_constant():
    """S <= a * ceil(log2(|E|/r) + 1) * C * r^s with a measured a."""
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(40):
        ps = PointSet.from_points(rng.random(int(rng.integers(2, 120))))
        r = float(rng.uniform(0.005, 0.2))
        theta = float(rng.uniform(0.2, 1))
        s = float(rng.uniform(0.05, 0.95))
        kp = KernelParams(r, theta, s, 1.0)
        S = cover_sum_1d(ps, kp).cost
        C = equilibrium(ps, kp)[1].capacity
        diam = float(np.ptp(ps.points))
        logs = max(1, math.ceil(math.log2(diam / r) + 1))
        worst = max(worst, S / (logs * C * r ** s))
    assert worst <= 64


def test_dim_from_covering_examples():
    assert dim_from_covering(gen_sequence_set(1, 1000), 0.5) == pytest.approx(1 / 3, abs=0.1)
    grid = uniform_grid(1025)
    for theta in (0.25, 0.5, 1.0):
        assert dim_from_covering(grid, theta) == pytest.approx(1.0, abs=0.05)
    assert dim_from_covering(PointSet.from_points([0.3]), 0.5) == 0.0


def test_dim_from_covering_lower_not_above_upper():
    ps = gen_sequence_set(1, 400)
    for theta in (0.3, 0.7):
        assert dim_from_covering(ps, theta, "lower") <= dim_from_covering(ps, theta, "upper") + 1e-12


def test_dim_from_covering_short_ladder():
    with pytest.raises(DomainError):
        dim_from_covering(uniform_grid(101), 0.5, scale_ladder=[0.5, 0.25, 0.125])
    with pytest.raises(DomainError):
        dim_from_covering(uniform_grid(101), 1.5)
