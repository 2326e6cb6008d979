import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlrigid import (SPECTRAL, ConfigurationError, Field, Grid, KernelSpec,
                     OperatorContext, apply_L, build_kernel, check_R1,
                     check_commutation, convolve, dirichlet_form,
                     partial_derivative)

SPEC_2D = KernelSpec.with_default_bounds("ball_indicator", 1.0, 1.0, 2)
SPEC_1D = KernelSpec.with_default_bounds("ball_indicator", 1.0, 1.0, 1)


def periodic_ctx(n=32, h=0.25, method="direct"):
    kernel = build_kernel(SPEC_2D, (h, h))
    grid = Grid.centered((n, n), (h, h), ("periodic", "periodic"))
    return OperatorContext(kernel, grid, method)


def naive_apply_L(kernel, grid, values):
    """Independent oracle: explicit loops with index wrap/clamp."""
    out = np.zeros_like(values)
    qw = kernel.quadrature_weights()
    offs = kernel.offsets
    it = np.ndindex(*grid.shape)
    for idx in it:
        acc = 0.0
        for (off, w) in zip(offs, qw):
            src = []
            for ax in range(grid.dim):
                j = idx[ax] - int(off[ax])
                if grid.is_periodic(ax):
                    j %= grid.n[ax]
                else:
                    j = min(max(j, 0), grid.n[ax] - 1)
                src.append(j)
            acc += w * (values[idx] - values[tuple(src)])
        out[idx] = acc
    return out


def naive_dirichlet(kernel, grid, f, g):
    qw = kernel.quadrature_weights()
    offs = kernel.offsets
    total = 0.0
    for idx in np.ndindex(*grid.shape):
        for (off, w) in zip(offs, qw):
            src = []
            for ax in range(grid.dim):
                j = idx[ax] - int(off[ax])
                if grid.is_periodic(ax):
                    j %= grid.n[ax]
                else:
                    j = min(max(j, 0), grid.n[ax] - 1)
                src.append(j)
            src = tuple(src)
            total += w * (f[idx] - f[src]) * (g[idx] - g[src])
    return total * grid.cell_volume


def test_L_annihilates_constants_exactly():
    ctx = periodic_ctx()
    out = apply_L(ctx, Field.constant(ctx.grid, 3.7))
    assert np.all(out.values == 0.0)
    # clamp boundary as well: the direct path is a pure stencil difference
    kernel = build_kernel(SPEC_2D, (0.25, 0.25))
    grid = Grid.centered((24, 24), (0.25, 0.25), ("clamp", "clamp"))
    out = apply_L(OperatorContext(kernel, grid), Field.constant(grid, -11.0))
    assert np.all(out.values == 0.0)


def test_fft_path_annihilates_constants_to_rounding():
    ctx = periodic_ctx(method="fft")
    out = apply_L(ctx, Field.constant(ctx.grid, 3.7))
    assert np.max(np.abs(out.values)) <= 1e-14 * 3.7


def test_affine_annihilated_on_interior():
    kernel = build_kernel(SPEC_2D, (0.25, 0.25))
    grid = Grid.centered((32, 32), (0.25, 0.25), ("clamp", "clamp"))
    ctx = OperatorContext(kernel, grid)
    x1, x2 = grid.coords()
    out = apply_L(ctx, Field(grid, 2.0 * x1 - 0.5 * x2)).values
    pad = ctx.pad
    interior = out[pad[0]:-pad[0], pad[1]:-pad[1]]
    assert np.max(np.abs(interior)) <= 1e-12


def test_fft_vs_direct_agree(rng):
    for n in (32, 64):
        ctxd = periodic_ctx(n)
        ctxf = OperatorContext(ctxd.kernel, ctxd.grid, "fft")
        u = Field(ctxd.grid, rng.standard_normal(ctxd.grid.shape))
        a = apply_L(ctxd, u).values
        b = apply_L(ctxf, u).values
        assert np.max(np.abs(a - b)) <= 1e-10 * max(1.0, np.max(np.abs(a)))


def test_direct_matches_naive_oracle(rng):
    kernel = build_kernel(SPEC_2D, (0.4, 0.4))
    grid = Grid((8, 6), (0.4, 0.4), (0.0, 0.0), ("periodic", "clamp"))
    ctx = OperatorContext(kernel, grid)
    u = rng.standard_normal(grid.shape)
    fast = apply_L(ctx, Field(grid, u)).values
    slow = naive_apply_L(kernel, grid, u)
    assert np.max(np.abs(fast - slow)) <= 1e-13


def test_dirichlet_matches_naive_oracle(rng):
    kernel = build_kernel(SPEC_2D, (0.4, 0.4))
    grid = Grid((7, 6), (0.4, 0.4), (0.0, 0.0), ("clamp", "clamp"))
    ctx = OperatorContext(kernel, grid)
    f = rng.standard_normal(grid.shape)
    g = rng.standard_normal(grid.shape)
    fast = dirichlet_form(ctx, Field(grid, f), Field(grid, g))
    slow = naive_dirichlet(kernel, grid, f, g)
    assert abs(fast - slow) <= 1e-12 * max(1.0, abs(slow))


def test_dirichlet_form_psd_and_symmetric(rng):
    ctx = periodic_ctx()
    f = Field(ctx.grid, rng.standard_normal(ctx.grid.shape))
    g = Field(ctx.grid, rng.standard_normal(ctx.grid.shape))
    assert dirichlet_form(ctx, f, f) >= 0.0
    assert dirichlet_form(ctx, g, g) >= 0.0
    assert abs(dirichlet_form(ctx, f, g) - dirichlet_form(ctx, g, f)) <= 1e-12
    c = Field.constant(ctx.grid, 2.0)
    assert abs(dirichlet_form(ctx, c, g)) <= 1e-12


@given(a=st.floats(-2, 2), b=st.floats(-2, 2), seed=st.integers(0, 2 ** 16))
@settings(max_examples=20, deadline=None)
def test_dirichlet_bilinear(a, b, seed):
    ctx = periodic_ctx(16)
    r = np.random.default_rng(seed)
    f1 = r.standard_normal(ctx.grid.shape)
    f2 = r.standard_normal(ctx.grid.shape)
    g = Field(ctx.grid, r.standard_normal(ctx.grid.shape))
    lhs = dirichlet_form(ctx, Field(ctx.grid, a * f1 + b * f2), g)
    rhs = a * dirichlet_form(ctx, Field(ctx.grid, f1), g) \
        + b * dirichlet_form(ctx, Field(ctx.grid, f2), g)
    assert abs(lhs - rhs) <= 1e-10 * (1.0 + abs(rhs))


def test_dirichlet_pair_mask_matches_naive(rng):
    # mask as a predicate over the pair's endpoint coordinates
    kernel = build_kernel(SPEC_2D, (0.4, 0.4))
    grid = Grid((7, 6), (0.4, 0.4), (0.0, 0.0), ("clamp", "clamp"))
    ctx = OperatorContext(kernel, grid)
    f = rng.standard_normal(grid.shape)
    g = rng.standard_normal(grid.shape)

    def mask(xc, yc):
        return (xc[0] + yc[0]) > 2.0

    fast = dirichlet_form(ctx, Field(grid, f), Field(grid, g), pair_mask=mask)

    qw = kernel.quadrature_weights()
    total = 0.0
    for idx in np.ndindex(*grid.shape):
        for off, w in zip(kernel.offsets, qw):
            src = tuple(min(max(idx[ax] - int(off[ax]), 0), grid.n[ax] - 1)
                        for ax in range(2))
            x0 = grid.origin[0] + idx[0] * grid.h[0]
            y0 = grid.origin[0] + src[0] * grid.h[0]
            if x0 + y0 > 2.0:
                total += w * (f[idx] - f[src]) * (g[idx] - g[src])
    slow = total * grid.cell_volume
    assert abs(fast - slow) <= 1e-12 * max(1.0, abs(slow))


def test_symmetrization_identity_periodic():
    for n in (32, 64):
        ctx = periodic_ctx(n)
        report = check_R1(ctx, trials=10, seed=3)
        assert report.passed
        assert report.regime == "periodic"
        assert report.max_rel_discrepancy <= 1e-10


def test_r1_report_serializes():
    import json
    ctx = periodic_ctx(16)
    report = check_R1(ctx, trials=2, seed=1)
    parsed = json.loads(report.as_json())
    assert parsed["passed"] is True
    assert parsed["trials"] == 2


def test_symmetrization_identity_clamp_interior():
    kernel = build_kernel(SPEC_2D, (0.25, 0.25))
    grid = Grid.centered((40, 40), (0.25, 0.25), ("periodic", "clamp"))
    ctx = OperatorContext(kernel, grid)
    report = check_R1(ctx, trials=6, seed=5)
    assert report.passed
    assert "boundary remainder" in report.regime


def test_energy_identity_for_f_equals_g(rng):
    ctx = periodic_ctx()
    f = Field(ctx.grid, rng.standard_normal(ctx.grid.shape))
    from nlrigid import apply_L_values
    lhs = 2.0 * float(np.sum(apply_L_values(ctx, f.values) * f.values)) * ctx.grid.cell_volume
    rhs = dirichlet_form(ctx, f, f)
    assert rhs >= 0.0
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, rhs)


def test_commutation_periodic(rng):
    ctx = periodic_ctx(48, method="fft")
    u = Field(ctx.grid, rng.standard_normal(ctx.grid.shape))
    assert check_commutation(ctx, u) <= 1e-10
    assert check_commutation(ctx, Field.constant(ctx.grid, 2.0)) == 0.0


def test_commutation_clamp_reported_not_asserted(rng):
    # boundary mismatch is reported for information; interior stays small
    kernel = build_kernel(SPEC_2D, (0.25, 0.25))
    grid = Grid.centered((48, 48), (0.25, 0.25), ("clamp", "clamp"))
    ctx = OperatorContext(kernel, grid)
    x1, x2 = grid.coords()
    u = Field(grid, np.tanh(x2 / 3.0) * np.cos(x1 / 2.0))
    value = check_commutation(ctx, u)
    assert np.isfinite(value)
    print(f"clamp-grid commutation discrepancy (boundary-dominated): {value:.3e}")


def test_sup_norm_bound(rng):
    ctx = periodic_ctx()
    for _ in range(5):
        u = Field(ctx.grid, rng.standard_normal(ctx.grid.shape))
        lu = apply_L(ctx, u)
        assert lu.max_abs() <= 2.0 * u.max_abs() * (1 + 1e-12)


def test_spectral_derivative_commutes_with_convolution(rng):
    ctx = periodic_ctx(48, method="fft")
    u = rng.standard_normal(ctx.grid.shape)
    f = Field(ctx.grid, u)
    a = partial_derivative(Field(ctx.grid, convolve(ctx, u)), 0, SPECTRAL).values
    b = convolve(ctx, partial_derivative(f, 0, SPECTRAL).values)
    scale = max(1.0, np.max(np.abs(a)))
    assert np.max(np.abs(a - b)) <= 1e-10 * scale


def test_configuration_errors():
    kernel = build_kernel(SPEC_2D, (0.25, 0.25))
    clamp_grid = Grid.centered((24, 24), (0.25, 0.25), ("clamp", "clamp"))
    with pytest.raises(ConfigurationError):
        OperatorContext(kernel, clamp_grid, "fft")
    wrong_h = Grid.centered((24, 24), (0.2, 0.2), ("periodic", "periodic"))
    with pytest.raises(ConfigurationError):
        OperatorContext(kernel, wrong_h)
    kernel_1d = build_kernel(SPEC_1D, 0.25)
    with pytest.raises(ConfigurationError):
        OperatorContext(kernel_1d, clamp_grid)
