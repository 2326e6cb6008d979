import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlrigid import (ConfigurationError, DomainError, Field, Grid,
                     HypothesisError, OperatorContext, PairRegion,
                     build_cutoff, build_kernel, chain_sums, compute_J1,
                     compute_J2, compute_quotient, estimate_direction,
                     get_nonlinearity, harnack_ratio, planarity_error,
                     refine_vertical_mode, region_pair_count,
                     stability_residual, tilted_bundle, verify_energy_chain)
from nlrigid.rigidity import Quotient, _radius_array
from conftest import BALL_2D


def tilt_setup(a=1.0, n=64, h=0.25):
    kernel = build_kernel(BALL_2D, (h, h))
    grid = Grid.centered((n, n), (h, h), ("clamp", "clamp"))
    f = get_nonlinearity("cubic")
    return kernel, grid, tilted_bundle(kernel, f, grid, a)


# ---------------------------------------------------------------- cutoff

def test_cutoff_plateau_and_support():
    g = Grid.centered((81, 81), (0.25, 0.25), ("clamp", "clamp"))
    c = build_cutoff(g, 4.0)
    r = _radius_array(g, c.center)
    assert np.all(c.tau.values[r <= 4.0] == 1.0)
    assert np.all(c.tau.values[r >= 8.0] == 0.0)
    assert np.all((0.0 <= c.tau.values) & (c.tau.values <= 1.0))


def test_cutoff_gradient_bound():
    g = Grid.centered((161, 161), (0.125, 0.125), ("clamp", "clamp"))
    R = 4.0
    c = build_cutoff(g, R)
    from nlrigid import partial_derivative
    g1 = partial_derivative(c.tau, 0).values
    g2 = partial_derivative(c.tau, 1).values
    grad = np.sqrt(g1 ** 2 + g2 ** 2)
    assert grad.max() * R <= 15.0 / 8.0 + 10.0 * 0.125


def test_cutoff_strictness():
    g = Grid.centered((33, 33), (0.25, 0.25), ("clamp", "clamp"))
    with pytest.raises(ConfigurationError):
        build_cutoff(g, 3.0)          # 2R = 6 exceeds half-width 4
    c = build_cutoff(g, 3.0, strict=False)
    assert c.clipped


# ---------------------------------------------------------------- quotient

def test_quotient_planar_diagonal():
    _, _, bundle = tilt_setup(a=1.0)
    quot = compute_quotient(bundle)
    assert np.max(np.abs(quot.v[quot.window] - 1.0)) <= 1e-8


def test_quotient_vertical_only():
    _, _, bundle = tilt_setup(a=0.0)
    quot = compute_quotient(bundle)
    assert np.max(np.abs(quot.v[quot.window])) == 0.0


def test_quotient_requires_monotone():
    kernel, grid, bundle = tilt_setup()
    from dataclasses import replace
    broken = replace(bundle, monotone=False)
    with pytest.raises(HypothesisError):
        compute_quotient(broken)


def test_quotient_empty_window():
    _, _, bundle = tilt_setup()
    with pytest.raises(DomainError):
        compute_quotient(bundle, eps_floor=1e9)


# ---------------------------------------------------------------- energies

def test_J1_vanishes_on_planar():
    kernel, grid, bundle = tilt_setup(a=1.0)
    ctx = OperatorContext(kernel, grid)
    quot = compute_quotient(bundle)
    for R in (2.0, 4.0):
        cutoff = build_cutoff(grid, R, strict=False)
        J1 = compute_J1(ctx, bundle, cutoff, quotient=quot)
        scale = float(np.sum(quot.u2[quot.window] ** 2)) * grid.cell_volume
        assert J1 <= 1e-12 * scale


def test_J2_vanishes_on_planar():
    kernel, grid, bundle = tilt_setup(a=0.5)
    ctx = OperatorContext(kernel, grid)
    cutoff = build_cutoff(grid, 3.0, strict=False)
    region = PairRegion(R=3.0, R0=kernel.support_radius(), center=cutoff.center)
    J2, cs_a, cs_b = compute_J2(ctx, bundle, cutoff, region)
    assert J2 <= 1e-20
    assert cs_a >= 0.0 and cs_b >= 0.0


def test_perturbed_field_has_positive_J1():
    kernel, grid, bundle = tilt_setup(a=1.0)
    ctx = OperatorContext(kernel, grid)
    x1, x2 = grid.coords()
    from nlrigid.solvers import make_bundle
    wavy = make_bundle(kernel, get_nonlinearity("cubic"), grid,
                       np.tanh((x2 + 0.5 * np.sin(x1)) / 2.0))
    cutoff = build_cutoff(grid, 3.0, strict=False)
    J1 = compute_J1(ctx, wavy, cutoff)
    assert J1 > 1e-6


@given(seed=st.integers(0, 2 ** 16))
@settings(max_examples=20, deadline=None)
def test_cauchy_schwarz_on_random_masked_fields(seed):
    r = np.random.default_rng(seed)
    h = 0.5
    kernel = build_kernel(BALL_2D, (h, h))
    grid = Grid.centered((16, 16), (h, h), ("clamp", "clamp"))
    ctx = OperatorContext(kernel, grid)
    quot = Quotient(
        grid=grid,
        v=r.standard_normal(grid.shape),
        window=r.random(grid.shape) > 0.3,
        u2=np.abs(r.standard_normal(grid.shape)) + 0.01,
        eps_floor=0.0,
        window_fraction=1.0,
    )
    tau = Field(grid, r.random(grid.shape))
    from nlrigid.rigidity import Cutoff
    cutoff = Cutoff(R=2.0, tau=tau, grad_bound=15 / 8, center=grid.center(), clipped=False)
    region = PairRegion(R=2.0, R0=kernel.support_radius(), center=grid.center())
    sums = chain_sums(ctx, quot, cutoff, region)
    bound = sums.cs_factor_a * sums.cs_factor_b
    assert sums.J2 ** 2 <= bound * (1 + 1e-12) + 1e-300


# ---------------------------------------------------------------- regions

def naive_pair_count(grid, R0, region):
    coords = [c.ravel() for c in grid.coords()]
    pts = np.stack(coords, axis=1)
    center = np.asarray(region.center)
    radii = np.linalg.norm(pts - center, axis=1)
    count = 0
    for i in range(pts.shape[0]):
        d = np.linalg.norm(pts - pts[i], axis=1)
        near = d <= R0 * (1 + 1e-12)
        member = region.member(radii[i], radii[near])
        count += int(np.count_nonzero(member))
    return count


def test_pair_count_matches_naive_enumeration():
    h = 0.5
    kernel = build_kernel(BALL_2D, (h, h))
    grid = Grid.centered((14, 12), (h, h), ("clamp", "clamp"))
    ctx = OperatorContext(kernel, grid)
    region = PairRegion(R=1.5, R0=kernel.support_radius(), center=grid.center())
    fast = region_pair_count(ctx, region)
    slow = naive_pair_count(grid, kernel.support_radius(), region)
    assert fast == slow


def test_pair_count_quadratic_growth_on_containing_grid():
    h = 0.25
    kernel = build_kernel(BALL_2D, (h, h))
    grid = Grid.centered((81, 81), (h, h), ("clamp", "clamp"))
    ctx = OperatorContext(kernel, grid)
    counts = {}
    for R in (1.0, 2.0):
        counts[R] = region_pair_count(ctx, PairRegion(R=R, R0=1.0, center=grid.center()))
    assert counts[2.0] / counts[1.0] <= 4.5


def test_region_symmetry():
    region = PairRegion(R=2.0, R0=1.0, center=(0.0, 0.0))
    rx = np.array([1.0, 3.0, 5.0])
    ry = np.array([3.0, 1.0, 5.0])
    assert np.array_equal(region.member(rx, ry), region.member(ry, rx))


def test_window_components_connected_strip(relaxed_bundle):
    from nlrigid.rigidity import window_components
    kernel, _, bundle = relaxed_bundle
    quot = compute_quotient(bundle)
    _, count = window_components(quot, kernel)
    assert count == 1


def test_window_components_split_window():
    from nlrigid.rigidity import component_means, window_components
    kernel, grid, bundle = tilt_setup(a=0.0, n=64, h=0.25)
    quot = compute_quotient(bundle)
    # carve the window into two blocks separated by more than the kernel reach
    x1, _ = grid.coords()
    split = np.abs(x1) > 2.0
    forced = Quotient(grid=grid, v=np.where(x1 > 0, 1.0, -1.0) * quot.window,
                      window=quot.window & split, u2=quot.u2,
                      eps_floor=quot.eps_floor, window_fraction=quot.window_fraction)
    labels, count = window_components(forced, kernel)
    assert count == 2
    means = component_means(forced, labels, count)
    assert sorted(round(m) for m in means) == [-1, 1]


# ---------------------------------------------------------------- harnack

def naive_harnack(vals, window, coords, radius):
    pts = np.stack([c.ravel() for c in coords], axis=1)
    v = vals.ravel()
    w = window.ravel()
    best = 1.0
    for i in np.flatnonzero(w):
        d = np.linalg.norm(pts - pts[i], axis=1)
        ball = (d <= radius * (1 + 1e-12)) & w
        best = max(best, v[ball].max() / v[ball].min())
    return best


def test_harnack_constant_field():
    g = Grid.centered((16, 16), (0.5, 0.5), ("clamp", "clamp"))
    c = Field.constant(g, 0.7)
    assert harnack_ratio(c, 1.0) == 1.0


def test_harnack_matches_naive(rng):
    g = Grid.centered((12, 10), (0.5, 0.5), ("clamp", "clamp"))
    vals = np.exp(rng.standard_normal(g.shape))
    window = rng.random(g.shape) > 0.2
    fast = harnack_ratio(Field(g, vals), 1.0, window=window)
    slow = naive_harnack(vals, window, g.coords(), 1.0)
    assert abs(fast - slow) <= 1e-12 * slow


def test_harnack_scale_invariant():
    _, grid, bundle = tilt_setup(a=0.5)
    quot = compute_quotient(bundle)
    r1 = harnack_ratio(bundle.u2, 1.0, window=quot.window)
    r2 = harnack_ratio(Field(grid, 17.0 * bundle.u2.values), 1.0, window=quot.window)
    assert abs(r1 - r2) <= 1e-12 * r1


def test_harnack_refinement_stability(quarter_profiles):
    ratios = {}
    for h, bundle in quarter_profiles.items():
        u1 = bundle.u1.values
        window = u1 >= 1e-6 * u1.max()
        ratios[h] = harnack_ratio(bundle.u1, 1.0, window=window)
    drift = abs(ratios[0.025] - ratios[0.05]) / ratios[0.05]
    assert drift <= 0.10


# ---------------------------------------------------------------- direction

def test_direction_diagonal():
    _, _, bundle = tilt_setup(a=1.0)
    quot = compute_quotient(bundle)
    est = estimate_direction(quot)
    assert abs(est.a - 1.0) <= 1e-12
    assert abs(est.omega[0] - 1 / math.sqrt(2)) <= 1e-12
    assert abs(est.omega[1] - 1 / math.sqrt(2)) <= 1e-12


def test_direction_vertical():
    _, _, bundle = tilt_setup(a=0.0)
    est = estimate_direction(compute_quotient(bundle))
    assert est.a == 0.0
    assert est.omega == (0.0, 1.0)
    assert est.v_stddev == 0.0


@given(lam=st.floats(0.1, 50.0))
@settings(max_examples=20, deadline=None)
def test_direction_scale_invariance(lam):
    _, grid, bundle = tilt_setup(a=0.5, n=32)
    quot = compute_quotient(bundle)
    scaled = Quotient(grid=grid, v=quot.v, window=quot.window,
                      u2=lam * quot.u2, eps_floor=quot.eps_floor,
                      window_fraction=quot.window_fraction)
    a0 = estimate_direction(quot).a
    a1 = estimate_direction(scaled).a
    assert abs(a0 - a1) <= 1e-12


# ---------------------------------------------------------------- planarity

def test_planarity_exact_planar_field():
    _, grid, bundle = tilt_setup(a=1.0, n=96, h=0.15)
    err = planarity_error(bundle.u, (1 / math.sqrt(2), 1 / math.sqrt(2)))
    assert err <= 5 * 0.15 ** 2


def test_planarity_detects_ripple():
    kernel, grid, bundle = tilt_setup(a=0.0, n=64, h=0.25)
    x1, x2 = grid.coords()
    rippled = Field(grid, bundle.u.values + 0.1 * np.sin(x1))
    err = planarity_error(rippled, (0.0, 1.0))
    assert 0.05 <= err <= 0.2


def test_planarity_relaxed_solution(relaxed_bundle):
    _, _, bundle = relaxed_bundle
    quot = compute_quotient(bundle)
    est = estimate_direction(quot)
    assert planarity_error(bundle.u, est.omega) <= 1e-3


# ---------------------------------------------------------------- stability

def test_stability_requires_positive_psi():
    kernel, grid, bundle = tilt_setup()
    ctx = OperatorContext(kernel, grid)
    with pytest.raises(DomainError):
        stability_residual(ctx, bundle, Field.constant(grid, -1.0))


def test_stability_refined_mode_near_null(relaxed_bundle):
    kernel, f, bundle = relaxed_bundle
    ctx = OperatorContext(kernel, bundle.grid)
    quot = compute_quotient(bundle)
    psi = refine_vertical_mode(ctx, bundle, window=quot)
    stab = stability_residual(ctx, bundle, psi, window=quot)
    assert stab <= 10.0 * bundle.residual_inf
    # the raw centered derivative carries the discrete chain-rule defect
    raw = stability_residual(ctx, bundle, bundle.u2, window=quot)
    assert raw > stab


def test_stability_negative_control(relaxed_bundle, rng):
    kernel, f, bundle = relaxed_bundle
    ctx = OperatorContext(kernel, bundle.grid)
    quot = compute_quotient(bundle)
    psi = refine_vertical_mode(ctx, bundle, window=quot)
    stab = stability_residual(ctx, bundle, psi, window=quot)
    control = Field(bundle.grid, rng.uniform(0.5, 1.5, bundle.grid.shape))
    stab_control = stability_residual(ctx, bundle, control, window=quot)
    assert stab_control >= 100.0 * stab


# ---------------------------------------------------------------- chain

def test_chain_on_relaxed_bundle(relaxed_bundle):
    kernel, f, bundle = relaxed_bundle
    ctx = OperatorContext(kernel, bundle.grid)
    reports = verify_energy_chain(ctx, bundle, [8.0, 16.0, 32.0])
    assert all(r.cs_holds for r in reports)
    assert all(r.chain_holds for r in reports)
    tails = [r.tail_energy for r in reports]
    assert all(a >= b for a, b in zip(tails, tails[1:]))
    assert tails[-1] < tails[0]
    counts = [r.region_pair_count for r in reports]
    for small, big in zip(counts, counts[1:]):
        if small > 0:
            assert big / small <= 4.5
    assert abs(math.hypot(*reports[0].omega) - 1.0) <= 1e-12
    assert reports[0].harnack_C >= 1.0


def test_chain_planar_all_energies_vanish():
    kernel, grid, bundle = tilt_setup(a=1.0, n=96, h=0.15)
    ctx = OperatorContext(kernel, grid)
    reports = verify_energy_chain(ctx, bundle, [3.0, 6.0])
    for r in reports:
        assert r.J1 <= 1e-12 * max(r.energy_scale, 1.0)
        assert r.J2 <= 1e-12
        assert r.chain_holds and r.cs_holds
