import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from interdim.geometry import DomainError
from interdim.kernels import KernelParams, phi, phi_mod, phi_mod_layered

KP = KernelParams(r=0.01, theta=0.5, s=1, m=2)


def phi_branches(d, r, theta, s, m):
    """Oracle: the piecewise definition, evaluated with plain powers."""
    if d < r:
        return 1.0
    if d < r ** theta:
        return (r / d) ** s
    return r ** (theta * (m - s) + s) / d ** m


@pytest.mark.parametrize("d,expected", [(0.001, 1.0), (0.05, 0.2), (0.5, 0.01 ** 1.5 / 0.25),
                                        (0.1, 0.1)])
def test_phi_examples(d, expected):
    assert phi(d, KP) == pytest.approx(expected, rel=1e-12)


def test_phi_breakpoint_from_both_sides():
    assert phi_branches(0.1 - 1e-15, 0.01, 0.5, 1, 2) == pytest.approx(0.1, rel=1e-12)
    assert phi_branches(0.1, 0.01, 0.5, 1, 2) == pytest.approx(0.1, rel=1e-12)
    assert phi(0.5, KP) == pytest.approx(0.004, rel=1e-12)


@pytest.mark.parametrize("d,expected", [(0.005, 1.0), (0.05, 0.2), (0.2, 0.0)])
def test_phi_mod_examples(d, expected):
    kp = KernelParams(0.01, 0.5, 1, 1)
    assert phi_mod(d, kp) == pytest.approx(expected, rel=1e-12, abs=0)


def test_phi_at_zero_and_s_zero():
    assert phi(0.0, KernelParams(0.1, 0.5, 0.0, 1.0)) == 1.0
    assert phi_mod(0.0, KernelParams(0.1, 0.5, 0.0, 1.0)) == 1.0


@pytest.mark.parametrize("bad", [-0.1, float("nan")])
def test_phi_rejects_bad_distance(bad):
    with pytest.raises(DomainError):
        phi(bad, KP)
    with pytest.raises(DomainError):
        phi_mod(bad, KP)


@pytest.mark.parametrize("args", [(0, 0.5, 1, 2), (1, 0.5, 1, 2), (0.1, 0, 1, 2), (0.1, 1.5, 1, 2),
                                  (0.1, 0.5, 3, 2), (0.1, 0.5, -1, 2), (0.1, 0.5, 0, 0)])
def test_kernel_params_validation(args):
    with pytest.raises(DomainError):
        KernelParams(*args)


params = st.tuples(st.floats(1e-4, 0.5), st.floats(0.05, 1.0), st.floats(0.0, 3.0),
                   st.floats(0.0, 3.0)).map(lambda t: (t[0], t[1], min(t[2], t[3]), max(t[2], t[3]) + 1e-3))


@settings(max_examples=200, deadline=None)
@given(params, st.floats(1e-6, 10.0))
def test_phi_matches_branch_oracle(p, d):
    r, theta, s, m = p
    kp = KernelParams(r, theta, s, m)
    assert phi(d, kp) == pytest.approx(phi_branches(d, r, theta, s, m), rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(params)
def test_phi_non_increasing(p):
    kp = KernelParams(*p)
    d = np.geomspace(1e-6, 10, 2000)
    v = phi(d, kp)
    assert np.all(np.diff(v) <= 1e-15)
    assert np.all((v > 0) & (v <= 1))


@settings(max_examples=100, deadline=None)
@given(params, st.floats(0.0, 3.0))
def test_phi_mod_below_phi(p, extra):
    r, theta, s, m = p
    mod = phi_mod(np.geomspace(1e-6, 10, 500), KernelParams(r, theta, s, m))
    full = phi(np.geomspace(1e-6, 10, 500), KernelParams(r, theta, s, m + extra))
    assert np.all(mod <= full + 1e-15)


def test_theta_independence_when_s_equals_m():
    d = np.geomspace(1e-5, 5, 1000)
    for t in (0.3, 1.7):
        base = phi(d, KernelParams(0.02, 1.0, t, t))
        for theta in (0.1, 0.25, 0.5):
            assert np.allclose(phi(d, KernelParams(0.02, theta, t, t)), base, rtol=1e-12, atol=0)


def test_layered_integral_identity():
    rng = np.random.default_rng(11)
    for _ in range(50):
        r = rng.uniform(1e-3, 0.3)
        theta = rng.uniform(0.1, 1.0)
        s = rng.uniform(0.05, 2.0)
        kp = KernelParams(r, theta, s, s + 1)
        for d in rng.uniform(0, 1.5 * kp.r_theta, 5):
            assert phi_mod_layered(d, kp) == pytest.approx(phi_mod(d, kp), abs=1e-8)


@settings(max_examples=200, deadline=None)
@given(params, st.floats(0.05, 1.0), st.floats(1e-4, 3.0))
def test_holder_rescaling_identity(p, alpha, d):
    r, theta, s, m = p
    direct = min(1.0, (r / d ** alpha) ** s, r ** (theta * (m - s) + s) / d ** (alpha * m))
    rescaled = phi(d, KernelParams(r ** (1 / alpha), theta, s * alpha, m * alpha))
    assert rescaled == pytest.approx(direct, rel=1e-10, abs=1e-300)
