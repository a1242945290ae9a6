"""Projections of planar sets onto lines in many directions.

Run with ``python demos/06_projections.py`` (about a minute).
"""
import math

import numpy as np

from interdim import PointSet, exceptional_scan, gen_cantor_like, kernel_domination_check

# %% A tilted segment projects to a point in exactly one direction.
t = np.linspace(0, 1, 257)
seg = PointSet.from_points(np.c_[t * math.cos(math.pi / 4), t * math.sin(math.pi / 4)],
                           resolution=1 / 256)
rep = exceptional_scan(seg, 1.0)
est = np.asarray(rep.diagnostics["estimates"])
print("segment: flagged directions", rep.diagnostics["per_lambda"][0]["exceptional"],
      "min", est.min(), "median", round(float(np.median(est)), 3))

# %% A Cantor product has smaller projections along the axes.
rep = exceptional_scan(gen_cantor_like(0.25, 2, 4, dim=2), 1.0)
est = np.asarray(rep.diagnostics["estimates"])
print("Cantor product: axis directions", np.round(est[[0, 32]], 3),
      "generic median", round(float(np.median(est)), 3))

# %% Averaged over directions, the truncated kernel of the projection is dominated by phi.
u = np.random.default_rng(0).normal(size=(40, 2))
pts = np.vstack([[0, 0], u / np.linalg.norm(u, axis=1)[:, None] * np.geomspace(1e-3, 1, 40)[:, None]])
dom = kernel_domination_check(PointSet.from_points(pts), 0.5, 0.5, 1, r=0.01, trials=4000)
print(f"domination constant {dom.c_hat:.3f} vs s/(m-s)+1 = {dom.bound:.1f}; by regime",
      {k: round(v, 3) for k, v in dom.by_regime.items()})
