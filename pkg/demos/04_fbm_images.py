"""Fractional Brownian images and the dimension formula for them.

Run with ``python demos/04_fbm_images.py`` (about a minute).
"""
import numpy as np

from interdim import (FbmParams, FbmSampler, PointSet, gen_sequence_set, increment_bound,
                      increment_probability, uniform_grid, verify_fbm_theorem)

# %% Increments have variance |x - y|^(2 alpha).
alpha = 0.5
sampler = FbmSampler(PointSet.from_points([0.0, 0.25, 1.0]), alpha)
draws = np.stack([sampler.sample(FbmParams(alpha, 1, seed=1), k).values[:, 0]
                  for k in range(5000)])
print("variance of B(1/4), B(1):", np.round(draws[:, 1:].var(axis=0), 3), "expected 0.25, 1")

# %% Small-ball probability and its bound.
p = np.mean(np.abs(draws[:, 2]) <= 0.1)
print(f"P(|B(1)| <= 0.1): empirical {p:.4f}, exact {increment_probability(alpha, 1, 1, 0.1):.4f}, "
      f"bound {increment_bound(alpha, 1, 1, 0.1):.2f}")

# %% The image dimension matches (1/alpha) times the profile at m * alpha.
rep = verify_fbm_theorem(uniform_grid(513), 0.5, 1, 1.0, trials=8, seed=0)
print(f"\ngrid, alpha 0.5: image {rep.lhs:.3f}, target {rep.rhs:.3f}, passed {rep.passed}")
f1 = gen_sequence_set(1, 1000)
rep = verify_fbm_theorem(f1, 0.75, 1, 0.5, trials=8, seed=7)
print(f"F1, alpha 0.75, theta 0.5: image {rep.lhs:.3f}, target {rep.rhs:.3f}, passed {rep.passed}")
bad = verify_fbm_theorem(f1, 0.75, 1, 0.5, trials=8, seed=7, target_alpha=0.375)
print(f"same images against the target for alpha 0.375: {bad.rhs:.3f}, passed {bad.passed}")
