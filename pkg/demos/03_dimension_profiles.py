"""Capacity-based dimension profiles and their agreement with covering estimates.

Run with ``python demos/03_dimension_profiles.py`` (about two minutes).
"""
import math

from interdim import (dim_from_covering, dim_profile, gen_cantor_like, gen_sequence_set,
                      profile_curve)

cantor = gen_cantor_like(1 / 3, 2, 8)
f1 = gen_sequence_set(1, 1000)

# %% With m = 1 the profile of a subset of the line is its intermediate dimension.
print("set     theta  profile  covering")
for name, ps in (("cantor", cantor), ("F1", f1)):
    for theta in (0.25, 0.5, 1.0):
        est = dim_profile(ps, theta, 1.0)
        print(f"{name:<7} {theta:<6} {est.value:.3f}    {dim_from_covering(ps, theta):.3f}")
print("log 2 / log 3 =", round(math.log(2) / math.log(3), 3))

# %% Secant exponents per scale and the extrapolated value.
est = dim_profile(f1, 0.5, 1.0)
for r, s in est.per_scale_exponents:
    print(f"  r = {r:.2e}: {s:.3f}")
print(f"extrapolated {est.value:.3f}, residual {est.fit_residual:.3f}")

# %% Profiles in m saturate at m for small m and at the dimension for large m.
for e in profile_curve(cantor, 1.0, m_grid=[0.2, 0.4, 0.6, 0.8, 1.0]):
    print(f"m = {e.m:.1f}: {e.value:.3f}")
