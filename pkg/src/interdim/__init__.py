"""Intermediate dimensions of finite nets: capacities, covers and image dimensions."""
__version__ = "0.1.0"

from .geometry import (DomainError, PointSet, delta_net, gen_cantor_like, gen_sequence_set,
                       load_csv, normalised, save_csv, segment, uniform_grid)
from .kernels import KernelParams, phi, phi_mod
from .capacity import (CapacityEstimate, DiscreteMeasure, SolverConfig, capacity_bound_check,
                       energy, equilibrium)
from .covering import CoverSolution, cover_sum_1d, cover_sum_grid, dim_from_covering
from .profiles import ProfileEstimate, dim_profile, profile_curve, scale_exponent
from .stochastic import (FbmParams, FbmSample, FbmSampler, HolderMapSpec, Subspace, fbm_sample,
                         grassmannian_sample, holder_apply, increment_bound,
                         increment_probability, kernel_domination_check)
from .experiments import (VerificationReport, exceptional_scan, verify_continuity_corollaries,
                          verify_fbm_theorem, verify_holder_bound)
