"""nlrigid: nonlocal convolution operators, bistable front profiles, and
one-dimensional-symmetry diagnostics on regular grids."""

from .errors import (ConfigurationError, DomainError, FieldIOError,
                     HypothesisError, NlrigidError, ResolutionError, SolverError)
from .grid import (CLAMP, PERIODIC, CENTERED2, SPECTRAL, Field, Grid,
                   Nonlinearity, NONLINEARITIES, get_nonlinearity,
                   partial_derivative, scaled_cubic)
from .fieldio import field_to_csv, read_field, write_field
from .kernels import (DiscreteKernel, KernelSpec, KernelValidation,
                      build_kernel, validate_kernel)
from .operators import (DIRECT, FFT, OperatorContext, apply_L, apply_L_values,
                        check_R1, check_commutation, convolve, dirichlet_form)
from .solvers import (SolutionBundle, SolverOptions, load_bundle, newton_polish,
                      perturbed_front_init, recheck_bundle, relax_2d, save_bundle,
                      solve_profile_1d, stability_dt_bound, tilted_bundle)
from .rigidity import (ChainSums, Cutoff, DirectionEstimate, PairRegion, Quotient,
                       RigidityOptions, RigidityReport, build_cutoff, chain_sums,
                       compute_J1, compute_J2, compute_quotient, estimate_direction,
                       fit_planar_profile, harnack_ratio, planarity_error,
                       refine_vertical_mode, region_pair_count, stability_residual,
                       verify_energy_chain)
from .config import RunConfig, load_config

__version__ = "0.1.0"
