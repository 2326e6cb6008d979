"""Shared fixtures: kernels, solved profiles, and the relaxed 2D bundle.

The expensive solves are session-scoped so the acceptance suite and the unit
tests share one instance each.
"""

import numpy as np
import pytest
from hypothesis import settings

from nlrigid import (Grid, KernelSpec, SolverOptions, build_kernel,
                     get_nonlinearity, newton_polish, perturbed_front_init,
                     relax_2d, solve_profile_1d)

settings.register_profile("deterministic", derandomize=True, deadline=None)
settings.load_profile("deterministic")

BALL_1D = KernelSpec.with_default_bounds("ball_indicator", 1.0, 1.0, 1)
BALL_2D = KernelSpec.with_default_bounds("ball_indicator", 1.0, 1.0, 2)


def profile_grid(half_width, h):
    n = int(round(2.0 * half_width / h)) + 1
    return Grid.centered((n,), (h,), ("clamp",))


@pytest.fixture(scope="session")
def cubic_profile():
    """Criterion-3 configuration: pure cubic, ball kernel, [-20, 20], h = 0.05."""
    kernel = build_kernel(BALL_1D, 0.05)
    f = get_nonlinearity("cubic")
    bundle = solve_profile_1d(kernel, f, profile_grid(20.0, 0.05))
    return kernel, f, newton_polish(kernel, f, bundle)


@pytest.fixture(scope="session")
def cubic_profile_double():
    kernel = build_kernel(BALL_1D, 0.05)
    f = get_nonlinearity("cubic")
    bundle = solve_profile_1d(kernel, f, profile_grid(40.0, 0.05))
    return newton_polish(kernel, f, bundle)


@pytest.fixture(scope="session")
def quarter_profiles():
    """Smooth-regime profiles at h and h/2 for refinement studies."""
    f = get_nonlinearity("quarter_cubic")
    out = {}
    for h in (0.05, 0.025):
        kernel = build_kernel(BALL_1D, h)
        bundle = solve_profile_1d(kernel, f, profile_grid(20.0, h),
                                  SolverOptions(tol=1e-8, max_iter=60000))
        out[h] = newton_polish(kernel, f, bundle)
    return out


RELAX_H = 0.125
RELAX_GRID = Grid((256, 161), (RELAX_H, RELAX_H), (-16.0, -10.0),
                  ("periodic", "clamp"))


@pytest.fixture(scope="session")
def relaxed_bundle():
    """Criterion-5 configuration: perturbed front relaxed to 1e-8."""
    kernel = build_kernel(BALL_2D, (RELAX_H, RELAX_H))
    f = get_nonlinearity("quarter_cubic")
    u0 = perturbed_front_init(RELAX_GRID, amp=0.1, waves=6)
    bundle = relax_2d(kernel, f, RELAX_GRID, u0,
                      SolverOptions(tol=1e-8, max_iter=60000))
    return kernel, f, bundle


@pytest.fixture(scope="session")
def small_kernel_2d():
    return build_kernel(BALL_2D, (0.25, 0.25))


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
