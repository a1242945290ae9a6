"""Constrained cover sums and the covering estimate of the intermediate dimensions.

Run with ``python demos/02_covering_sums.py``.
"""
from interdim import (KernelParams, PointSet, cover_sum_1d, dim_from_covering, gen_sequence_set,
                      uniform_grid)
import numpy as np

# %% Eleven evenly spaced points: covers use pieces of size between r and r^theta.
grid11 = PointSet.from_points(np.arange(11) / 10)
for r, theta, s in [(0.1, 1, 1), (0.01, 0.5, 1), (0.01, 0.5, 0.5)]:
    sol = cover_sum_1d(grid11, KernelParams(r, theta, s, 1))
    print(f"r={r:<5} theta={theta:<4} s={s:<4} S={sol.cost:.3f} with {len(sol.pieces)} pieces")

# %% Dimension estimates: the covering ladder stops at 16 times the net resolution.
f1 = gen_sequence_set(1, 1000)
grid = uniform_grid(1025)
print("\ntheta   F1 lower  F1 upper  grid")
for theta in (0.25, 0.5, 1.0):
    print(f"{theta:<6}  {dim_from_covering(f1, theta):.3f}     "
          f"{dim_from_covering(f1, theta, 'upper'):.3f}     {dim_from_covering(grid, theta):.3f}")
print("reference for F1: theta / (1 + theta) =", [round(t / (1 + t), 3) for t in (0.25, 0.5, 1.0)])
