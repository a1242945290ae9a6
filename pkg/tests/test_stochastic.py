import math

import numpy as np
import pytest
from scipy import integrate, stats
from scipy.spatial.distance import pdist

from interdim import stochastic
from interdim.geometry import DomainError, PointSet, gen_cantor_like, uniform_grid
from interdim.kernels import KernelParams, phi
from interdim.stochastic import (FbmParams, FbmSampler, HolderMapSpec, Subspace, fbm_covariance,
                                 fbm_sample, grassmannian_sample, holder_apply, increment_bound,
                                 increment_probability, kernel_domination_check,
                                 projected_ball_probability, replicate_rng)


# --- fBm ----------------------------------------------------------------------------

def test_origin_is_anchored():
    s = fbm_sample(PointSet.from_points([0.0]), FbmParams(0.5))
    assert np.all(s.values == 0)
    s = fbm_sample(uniform_grid(9), FbmParams(0.3, 2, seed=4))
    assert np.all(s.values[0] == 0)


def test_unit_point_variance():
    sampler = FbmSampler(PointSet.from_points([0.0, 1.0]), 0.5)
    fp = FbmParams(0.5, 1, seed=123)
    vals = np.array([sampler.sample(fp, k).values[1, 0] for k in range(10_000)])
    assert 0.94 <= vals.var() <= 1.06


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_increment_variance_within_three_standard_errors(alpha):
    rng = np.random.default_rng(17)
    pts = rng.random((20, 2))
    sampler = FbmSampler(PointSet.from_points(pts), alpha)
    fp = FbmParams(alpha, 1, seed=99)
    draws = np.stack([sampler.sample(fp, k).values[:, 0] for k in range(10_000)])
    src = sampler.source.points
    for a, b in rng.choice(len(src), size=(10, 2), replace=False):
        inc = draws[:, a] - draws[:, b]
        true = np.linalg.norm(src[a] - src[b]) ** (2 * alpha)
        se = true * math.sqrt(2 / (len(inc) - 1))
        assert abs(np.mean(inc ** 2) - true) <= 3 * se


def test_covariance_formula():
    pts = np.array([[0.0], [0.5], [1.0]])
    cov = fbm_covariance(pts, 0.5)
    assert cov[1, 2] == pytest.approx(0.5 * (0.5 + 1 - 0.5))
    assert cov[2, 2] == pytest.approx(1.0)


def test_sampling_is_reproducible_per_replicate():
    ps = uniform_grid(33)
    fp = FbmParams(0.6, 2, seed=5)
    a = FbmSampler(ps, 0.6).sample(fp, 7).values
    b = fbm_sample(ps, fp, replicate=7).values
    assert np.array_equal(a, b)
    assert not np.array_equal(a, fbm_sample(ps, fp, replicate=8).values)
    assert np.array_equal(replicate_rng(5, 3).random(4), replicate_rng(5, 3).random(4))


def test_components_are_independent():
    sampler = FbmSampler(PointSet.from_points([0.0, 1.0]), 0.5)
    fp = FbmParams(0.5, 2, seed=1)
    v = np.array([sampler.sample(fp, k).values[1] for k in range(4000)])
    assert abs(np.corrcoef(v.T)[0, 1]) < 4 / math.sqrt(4000)


def test_near_duplicate_points_need_jitter():
    ps = PointSet.from_points(np.array([0.1, 0.1 + 1e-13, 0.5, 0.9]))
    sample = fbm_sample(ps, FbmParams(0.5))
    assert np.all(np.isfinite(sample.values))


def test_factorisation_failure_names_the_scale(monkeypatch):
    monkeypatch.setattr(stochastic, "JITTERS", (0.0,))
    ps = PointSet.from_points(np.array([0.1, 0.1 + 1e-13, 0.5]))
    with pytest.raises(np.linalg.LinAlgError, match="separation"):
        FbmSampler(ps, 0.9).factor


def test_fbm_budget_and_params():
    with pytest.raises(DomainError):
        FbmSampler(uniform_grid(stochastic.MAX_FBM_POINTS + 1), 0.5)
    for bad in (0.0, 1.0, 1.2):
        with pytest.raises(DomainError):
            FbmParams(bad)
    with pytest.raises(DomainError):
        FbmParams(0.5, target_dim=0)


def test_image_resolution_and_csv():
    ps = uniform_grid(65)
    s = fbm_sample(ps, FbmParams(0.5, 2, seed=3))
    img = s.image()
    assert img.dim == 2
    assert img.resolution == pytest.approx((1 / 64) ** 0.5)
    lines = s.to_csv().splitlines()
    assert lines[0] == "x0,b0,b1"
    assert len(lines) == 66


def test_increment_probability_matches_normal_cdf():
    expected = 2 * stats.norm.cdf(0.1) - 1
    assert increment_probability(0.5, 1, 1.0, 0.1) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(0.0797, abs=1e-4)
    assert increment_bound(0.5, 1, 1.0, 0.1) == pytest.approx(0.2)


def test_empirical_probability_below_bound():
    sampler = FbmSampler(PointSet.from_points([0.0, 1.0]), 0.5)
    fp = FbmParams(0.5, 1, seed=2)
    vals = np.array([sampler.sample(fp, k).values[1, 0] for k in range(20_000)])
    p = np.mean(np.abs(vals) <= 0.1)
    assert p == pytest.approx(2 * stats.norm.cdf(0.1) - 1, abs=0.005)
    assert p <= increment_bound(0.5, 1, 1.0, 0.1)


def test_holder_quotient_stable_under_refinement():
    alpha, eps = 0.5, 0.1
    ps = uniform_grid(1025)
    sampler = FbmSampler(ps, alpha)
    x = ps.points[:, 0]
    coarse = np.arange(0, 1025, 16)
    d_fine = pdist(x[:, None]) ** (alpha - eps)
    d_coarse = pdist(x[coarse, None]) ** (alpha - eps)
    for k in range(100):
        b = sampler.sample(FbmParams(alpha, 1, seed=31), k).values
        q_fine = np.max(pdist(b) / d_fine)
        q_coarse = np.max(pdist(b[coarse]) / d_coarse)
        assert np.isfinite(q_fine)
        assert q_fine <= 4 * q_coarse


# --- Hoelder maps -------------------------------------------------------------------

def test_identity_keeps_the_set():
    ps = gen_cantor_like(1 / 3, 2, 3)
    img = holder_apply(ps, HolderMapSpec.identity())
    assert np.array_equal(img.points, ps.points)
    assert img.resolution == ps.resolution


def test_radial_power_example():
    img = holder_apply(PointSet.from_points([0.0, 0.25, 1.0]), HolderMapSpec.radial_power(0.5))
    assert img.points[:, 0] == pytest.approx([0.0, 0.5, 1.0])


def test_coordinate_projection_shrinks():
    ps = gen_cantor_like(0.25, 2, 2, dim=2)
    img = holder_apply(ps, HolderMapSpec.coordinate_projection([1]))
    assert img.dim == 1
    assert np.ptp(img.points) <= ps.diameter_bound


@pytest.mark.parametrize("spec", [
    HolderMapSpec.identity(), HolderMapSpec.radial_power(0.3), HolderMapSpec.radial_power(0.8),
    HolderMapSpec.coordinate_projection([0]), HolderMapSpec.subspace(Subspace.line(0.7))])
def test_holder_inequality_on_all_pairs(spec):
    rng = np.random.default_rng(2)
    pts = rng.normal(size=(150, 2))
    pts /= np.maximum(1, np.linalg.norm(pts, axis=1))[:, None]
    out = spec(pts)
    assert np.all(pdist(out) <= spec.c * pdist(pts) ** spec.alpha * (1 + 1e-12) + 1e-15)


def test_piecewise_linear_constant_and_domain():
    spec = HolderMapSpec.piecewise_linear([0, 0.5, 1], [0, 1, 0.5])
    assert spec.c == pytest.approx(2.0)
    x = np.linspace(0, 1, 200)[:, None]
    assert np.all(pdist(spec(x)) <= 2 * pdist(x) + 1e-12)
    with pytest.raises(DomainError):
        holder_apply(PointSet.from_points([1.5]), spec)


def test_holder_apply_domain_and_resolution():
    with pytest.raises(DomainError):
        holder_apply(PointSet.from_points([[2.0, 0.0]]), HolderMapSpec.radial_power(0.5))
    ps = uniform_grid(101)
    img = holder_apply(ps, HolderMapSpec.radial_power(0.5))
    assert img.resolution == pytest.approx(2 ** 0.5 * 0.01 ** 0.5)


# --- projections --------------------------------------------------------------------

def test_directions_uniform_ks():
    vs = grassmannian_sample(2, 1, seed=0, count=100_000)
    phis = np.array([math.atan2(v.basis[0, 1], v.basis[0, 0]) % math.pi for v in vs])
    assert stats.kstest(phis / math.pi, "uniform").pvalue > 0.01


def test_bases_orthonormal():
    for n, m in ((2, 1), (3, 1), (3, 2)):
        for v in grassmannian_sample(n, m, seed=4, count=200):
            assert np.abs(v.basis @ v.basis.T - np.eye(m)).max() <= 1e-12


def test_projection_is_one_lipschitz():
    rng = np.random.default_rng(1)
    a, b = rng.normal(size=(2, 500, 3))
    for v in grassmannian_sample(3, 2, seed=1, count=50):
        assert np.all(np.linalg.norm(v.project(a) - v.project(b), axis=1)
                      <= np.linalg.norm(a - b, axis=1) * (1 + 1e-12))


def test_projected_length_law():
    z = np.array([0.0, 0.0, 1.0])
    vs = grassmannian_sample(3, 1, seed=2, count=20_000)
    lengths = np.array([abs(v.project(z[None])[0, 0]) for v in vs])
    cdf = lambda u: projected_ball_probability(3, 1, 1.0, u)
    assert stats.kstest(lengths, cdf).pvalue > 0.01


def test_grassmannian_rejects_large_dimensions():
    with pytest.raises(DomainError):
        grassmannian_sample(4, 2, seed=0, count=1)
    with pytest.raises(DomainError):
        Subspace(2, 1, np.array([[1.0, 1.0]]))


def exact_projected_kernel(dist, r, theta, s, n=2, m=1):
    """Oracle: E_V phi_mod(|pi_V z|) from the layered form and the projected-length law."""
    R = r ** theta
    F = lambda u: float(projected_ball_probability(n, m, dist, u))
    head = s * r ** s * integrate.quad(lambda u: F(u) * u ** (-s - 1), r, R, limit=200)[0]
    return head + r ** (s * (1 - theta)) * F(R)


def pair(dist):
    return PointSet.from_points(np.array([[0.0, 0.0], [dist, 0.0]]))


def test_domination_inner_case_is_exact():
    rep = kernel_domination_check(pair(0.005), 0.5, 0.5, 1, r=0.01, trials=1000, pairs=50)
    assert rep.by_regime["case1"] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("dist", [0.05, 0.5])
def test_domination_constant_and_oracle(dist):
    r, theta, s = 0.01, 0.5, 0.5
    rep = kernel_domination_check(pair(dist), theta, s, 1, r=r, trials=100_000, pairs=20, seed=3)
    assert rep.c_hat <= rep.bound + 0.2
    assert rep.bound == pytest.approx(2.0)
    expected = exact_projected_kernel(dist, r, theta, s) / phi(dist, KernelParams(r, theta, s, 1))
    assert rep.c_hat == pytest.approx(expected, rel=0.03)


def test_domination_rejects_s_at_least_m():
    with pytest.raises(DomainError):
        kernel_domination_check(pair(0.1), 0.5, 1.0, 1, r=0.01)
