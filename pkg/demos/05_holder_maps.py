"""Images of nets under Hoelder maps stay below the profile bound.

Run with ``python demos/05_holder_maps.py``.
"""
from interdim import (HolderMapSpec, gen_cantor_like, gen_sequence_set, uniform_grid,
                      verify_holder_bound)

cases = [
    ("identity on the grid", uniform_grid(1025), HolderMapSpec.identity(), 1.0),
    ("square root on F1", gen_sequence_set(1, 500), HolderMapSpec.radial_power(0.5), 1.0),
    ("axis projection of a Cantor product", gen_cantor_like(0.25, 2, 4, dim=2),
     HolderMapSpec.coordinate_projection([0]), 0.5),
]
for name, ps, spec, theta in cases:
    rep = verify_holder_bound(ps, spec, theta)
    print(f"{name}: image {rep.lhs:.3f} <= bound {rep.rhs:.3f} + 0.1: {rep.passed}")

# %% Feeding the wrong exponent to the bound side makes the check fail.
rep = verify_holder_bound(gen_sequence_set(1, 500), HolderMapSpec.radial_power(0.5), 1.0,
                          target_alpha=1.0)
print(f"square root on F1 against the bound for alpha 1: {rep.lhs:.3f} vs {rep.rhs:.3f}, "
      f"passed {rep.passed}")
