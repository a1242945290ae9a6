"""Kernels, energies and capacities on small nets.

Run with ``python demos/01_kernels_and_capacity.py``.
"""
import numpy as np

from interdim import (KernelParams, PointSet, capacity_bound_check, equilibrium, phi, phi_mod,
                      uniform_grid)

# %% The kernel is flat inside r, decays like d^-s up to r^theta, then like d^-m.
kp = KernelParams(r=0.01, theta=0.5, s=1.0, m=2.0)
d = np.array([0.001, 0.01, 0.05, 0.1, 0.5])
print("d        ", d)
print("phi      ", np.round(phi(d, kp), 5))
print("phi_mod  ", np.round(phi_mod(d, kp), 5))

# %% Two points: the equilibrium splits the mass evenly and C = 2 / (1 + phi(d)).
pair = PointSet.from_points([0.0, 0.05])
mu, est = equilibrium(pair, kp)
print("\ntwo points: weights", mu.weights, "capacity", round(est.capacity, 6),
      "closed form", round(2 / (1 + phi(0.05, kp)), 6))

# %% A grid: capacity stays below (B/r)^t at s = m = t.
grid = uniform_grid(101)
rep = capacity_bound_check(grid, KernelParams(0.1, 0.5, 1.0, 1.0))
print(f"\ngrid of 101 points: C = {rep.capacity:.3f} <= bound {rep.bound:.1f}: {rep.holds}")
mu, est = equilibrium(grid, KernelParams(0.02, 0.5, 0.5, 1.0))
print(f"C = {est.capacity:.3f}, certificate gap {est.certificate_gap:.2e}, "
      f"converged {est.converged}")
print("mass on the two end points:", np.round(mu.weights[[0, -1]], 4))
