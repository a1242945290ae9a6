"""Potential kernels for intermediate-dimension capacities.

``phi`` is the three-regime kernel (flat below ``r``, decaying like
``d^-s`` up to ``r^theta`` and like ``d^-m`` beyond) and ``phi_mod`` the
truncated variant that vanishes beyond ``r^theta``.  Both accept scalars or
arrays of distances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import DomainError


@dataclass(frozen=True)
class KernelParams:
    r: float
    theta: float
    s: float
    m: float

    def __post_init__(self):
        if not 0 < self.r < 1:
            raise DomainError(f"r must lie in (0, 1), got {self.r}")
        if not 0 < self.theta <= 1:
            raise DomainError(f"theta must lie in (0, 1], got {self.theta}")
        if not self.m > 0:
            raise DomainError(f"m must be positive, got {self.m}")
        if not 0 <= self.s <= self.m:
            raise DomainError(f"s must lie in [0, m], got s={self.s}, m={self.m}")

    @property
    def r_theta(self) -> float:
        return self.r ** self.theta

    @property
    def outer_coeff(self) -> float:
        """Numerator r^(theta(m-s)+s) of the outer regime."""
        return self.r ** (self.theta * (self.m - self.s) + self.s)


def _check_distance(d: np.ndarray) -> None:
    if np.any(np.isnan(d)) or np.any(d < 0):
        raise DomainError("distances must be non-negative numbers")


def phi(distance, kp: KernelParams):
    """min{1, (r/d)^s, r^(theta(m-s)+s) / d^m}, evaluated in log space."""
    d = np.asarray(distance, dtype=float)
    _check_distance(d)
    with np.errstate(divide="ignore", invalid="ignore"):
        logd = np.log(d)
        logr = math.log(kp.r)
        middle = kp.s * (logr - logd)
        outer = (kp.theta * (kp.m - kp.s) + kp.s) * logr - kp.m * logd
        out = np.exp(np.minimum(0.0, np.minimum(middle, outer)))
    # d = 0 gives -inf * 0 = nan in the middle term when s = 0
    out = np.where(d == 0, 1.0, out)
    return float(out) if out.ndim == 0 else out


def phi_mod(distance, kp: KernelParams):
    """Truncated kernel: 1 below r, (r/d)^s on [r, r^theta], 0 beyond r^theta."""
    d = np.asarray(distance, dtype=float)
    _check_distance(d)
    with np.errstate(divide="ignore", invalid="ignore"):
        logd = np.log(d)
        inner = np.exp(np.minimum(0.0, kp.s * (math.log(kp.r) - logd)))
    out = np.where(d == 0, 1.0, np.where(d <= kp.r_theta, inner, 0.0))
    return float(out) if out.ndim == 0 else out


def phi_mod_layered(distance, kp: KernelParams) -> float:
    """Evaluate the truncated kernel as a superposition of ball indicators.

    s r^s * int_r^{r^theta} 1[d <= u] u^-(s+1) du + r^(s(1-theta)) 1[d <= r^theta],
    integrated by adaptive quadrature.  Used as an independent check of
    :func:`phi_mod`.
    """
    from scipy.integrate import quad

    d = float(distance)
    s, r, rt = kp.s, kp.r, kp.r_theta
    lo = max(r, d)
    integral = 0.0
    if lo < rt:
        integral, _ = quad(lambda u: u ** -(s + 1), lo, rt, epsabs=1e-14, epsrel=1e-12)
    return s * r ** s * integral + r ** (s * (1 - kp.theta)) * (d <= rt)
