"""Quantitative one-dimensional-symmetry diagnostics.

For a monotone candidate solution u the machinery is:

* quotient v = u1 / u2 on the window where u2 is safely positive;
* radial cutoffs tau_R (1 on the R-ball, 0 outside the 2R-ball);
* the localized energy J1 = sum (v(x)-v(y))^2 tau(x)^2 u2(x) u2(y) k(x-y)
  and its remainder bound J2 over the near-diagonal annular pair region,
  together with the two Cauchy-Schwarz factors splitting J2;
* Harnack ratios of u2 over kernel-sized balls;
* the reconstructed direction w = (a, 1)/sqrt(a^2+1) from the u2-weighted
  mean of v, and the sup-norm error of the best planar representation;
* the eigenvalue-type residual |L psi - f'(u) psi| for positive psi.

Planar solutions make v constant, so every energy vanishes; for inexact
(numerical) solutions the chain inequality J1 <= J2 + slack holds with a
slack proportional to the equation residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ConfigurationError, DomainError, HypothesisError
from .grid import Field, get_nonlinearity
from .operators import apply_L_values
from .util import QUINTIC_MAX_SLOPE, quintic_smoothstep

DEFAULT_EPS_FLOOR_REL = 1e-6
DEFAULT_SLACK_KAPPA = 10.0


@dataclass(frozen=True)
class Cutoff:
    """Radial plateau cutoff: 1 on B_R, 0 outside B_2R, quintic in between.

    ``grad_bound`` is the continuum constant C with |grad tau| <= C / R.
    ``clipped`` records that the grid does not contain all of B_2R, in which
    case tau never reaches 0 on the grid (the large-R regime of a finite
    domain).
    """

    R: float
    tau: Field
    grad_bound: float
    center: tuple
    clipped: bool


def build_cutoff(grid, R, center=None, strict=True):
    """Cutoff tau_R(x) = S(clamp((2R - |x - center|)/R, 0, 1)).

    With ``strict`` the 2R-ball must fit inside the grid (configuration error
    otherwise); ``strict=False`` allows clipped cutoffs for sweeps whose
    largest radii exhaust the grid.
    """
    R = float(R)
    if R <= 0.0:
        raise ConfigurationError(f"cutoff radius must be positive, got {R}")
    if center is None:
        center = grid.center()
    min_half = min(
        min(abs(center[i] - grid.origin[i]),
            abs(grid.origin[i] + (grid.n[i] - 1) * grid.h[i] - center[i]))
        for i in range(grid.dim)
    )
    clipped = 2.0 * R > min_half
    if strict and clipped:
        raise ConfigurationError(
            f"cutoff support 2R = {2 * R} exceeds grid half-width {min_half}"
        )
    radius = _radius_array(grid, center)
    tau = quintic_smoothstep((2.0 * R - radius) / R)
    return Cutoff(R=R, tau=Field(grid, tau), grad_bound=QUINTIC_MAX_SLOPE,
                  center=tuple(center), clipped=clipped)


def _radius_array(grid, center):
    coords = grid.coords()
    sq = np.zeros(grid.shape)
    for i, c in enumerate(coords):
        sq = sq + (c - center[i]) ** 2
    return np.sqrt(sq)


@dataclass(frozen=True)
class Quotient:
    """v = u1/u2 on the window {u2 >= eps_floor}, with the u2 weights kept
    for downstream energy sums. Off-window entries of ``v`` are zeroed and
    masked out of every sum."""

    grid: object
    v: np.ndarray
    window: np.ndarray
    u2: np.ndarray
    eps_floor: float
    window_fraction: float

    def field(self):
        return Field(self.grid, self.v)


def compute_quotient(bundle, eps_floor=None):
    """Quotient of the derivative fields on the safely-positive window.

    Refuses non-monotone bundles: the construction divides by u2, which the
    monotonicity hypothesis is exactly what legitimizes.
    """
    if not bundle.monotone:
        raise HypothesisError(
            "bundle is not monotone; quotient diagnostics require min u2 > 0"
        )
    u2 = bundle.vertical_derivative().values
    if bundle.dim == 2:
        u1 = bundle.u1.values
    else:
        # 1D profiles have no transverse direction; v is identically zero on
        # the window and the machinery degenerates gracefully.
        u1 = np.zeros_like(u2)
    if eps_floor is None:
        eps_floor = DEFAULT_EPS_FLOOR_REL * float(np.max(u2))
    window = u2 >= eps_floor
    if not window.any():
        raise DomainError(f"window u2 >= {eps_floor} is empty")
    v = np.where(window, u1 / np.where(window, u2, 1.0), 0.0)
    return Quotient(
        grid=bundle.grid,
        v=v,
        window=window,
        u2=u2,
        eps_floor=float(eps_floor),
        window_fraction=float(np.mean(window)),
    )


@dataclass(frozen=True)
class PairRegion:
    """Near-diagonal annular/exterior pair set: |x - y| <= R0 together with
    "not both inside B_R and at least one inside B_2R" relative to center."""

    R: float
    R0: float
    center: tuple

    def member(self, radius_x, radius_y):
        in_R = (radius_x <= self.R) & (radius_y <= self.R)
        in_2R = (radius_x <= 2.0 * self.R) | (radius_y <= 2.0 * self.R)
        return in_2R & ~in_R


@dataclass(frozen=True)
class ChainSums:
    """One pass of the localized energy sums at a single radius R."""

    R: float
    J1: float
    J2: float
    cs_factor_a: float
    cs_factor_b: float
    tail_energy: float
    region_pair_count: int


def chain_sums(ctx, quot, cutoff, region):
    """Fused evaluation of J1, J2, both Cauchy-Schwarz factors, the region
    tail energy, and the (window-free) region pair count.

    All double sums run over kernel-support sample pairs; energies are
    restricted to window pairs, multiplied by u2(x) u2(y) k(x-y) vol^2.
    """
    grid = ctx.grid
    vol = grid.cell_volume
    v = quot.v
    u2 = np.where(quot.window, quot.u2, 0.0)
    win = quot.window
    tau = cutoff.tau.values
    radius = _radius_array(grid, region.center)

    vp = ctx.padded(v)
    u2p = ctx.padded(u2)
    winp = ctx.padded(win)
    taup = ctx.padded(tau)
    radp = ctx.padded(radius)

    J1 = 0.0
    J2 = 0.0
    cs_a = 0.0
    cs_b = 0.0
    tail = 0.0
    count = 0
    for off, w in ctx.stencil_terms():
        vy = ctx.view(vp, off)
        u2y = ctx.view(u2p, off)
        winy = ctx.view(winp, off)
        tauy = ctx.view(taup, off)
        rady = ctx.view(radp, off)

        reg = region.member(radius, rady)
        count += int(np.count_nonzero(reg))

        both = win & winy
        pair_w = np.where(both, u2 * u2y, 0.0)
        dv = v - vy
        J1 += w * float(np.sum(dv * dv * tau * tau * pair_w))

        reg_w = np.where(reg, pair_w, 0.0)
        dtau = tau - tauy
        stau = tau + tauy
        J2 += w * float(np.sum(np.abs(dv) * np.abs(dtau) * np.abs(stau)
                               * np.abs(vy) * reg_w))
        cs_a += w * float(np.sum(dv * dv * stau * stau * reg_w))
        cs_b += w * float(np.sum(dtau * dtau * vy * vy * reg_w))
        tail += w * float(np.sum(dv * dv * reg_w))
    return ChainSums(
        R=region.R,
        J1=float(J1 * vol),
        J2=float(J2 * vol),
        cs_factor_a=float(cs_a * vol),
        cs_factor_b=float(cs_b * vol),
        tail_energy=float(tail * vol),
        region_pair_count=count,
    )


def compute_J1(ctx, bundle, cutoff, quotient=None, eps_floor=None):
    quot = quotient or compute_quotient(bundle, eps_floor)
    region = PairRegion(R=cutoff.R, R0=ctx.kernel.support_radius(), center=cutoff.center)
    return chain_sums(ctx, quot, cutoff, region).J1


def compute_J2(ctx, bundle, cutoff, region, quotient=None, eps_floor=None):
    """Returns (J2, cs_factor_a, cs_factor_b); J2^2 <= a * b unconditionally."""
    quot = quotient or compute_quotient(bundle, eps_floor)
    sums = chain_sums(ctx, quot, cutoff, region)
    return sums.J2, sums.cs_factor_a, sums.cs_factor_b


def region_pair_count(ctx, region):
    """Ordered on-grid sample pairs within kernel support lying in the region."""
    radius = _radius_array(ctx.grid, region.center)
    radp = ctx.padded(radius)
    ongrid = np.ones(ctx.grid.shape, dtype=bool)
    # Clamped padding repeats edge samples, which would alias exterior
    # lookups onto real points; mark the ghost layers explicitly instead.
    onp = np.zeros(radp.shape, dtype=bool)
    inner = tuple(slice(p, p + s) for p, s in zip(ctx.pad, ctx.grid.shape))
    onp[inner] = True
    count = 0
    for off, _ in ctx.stencil_terms():
        wraps = all(ctx.grid.is_periodic(i) or off[i] == 0 for i in range(ctx.grid.dim))
        ony = ctx.view(onp, off) if not wraps else ongrid
        rady = ctx.view(radp, off)
        reg = region.member(radius, rady) & ony
        count += int(np.count_nonzero(reg))
    return count


def harnack_ratio(bundle, radius, window=None):
    """Max over window points of sup/inf of the positive derivative over the
    radius-ball intersected with the window: the measured Harnack constant."""
    if isinstance(bundle, Field):
        field = bundle
    else:
        field = bundle.vertical_derivative()
    grid = field.grid
    vals = field.values
    if window is None:
        window = np.ones(grid.shape, dtype=bool)
    elif isinstance(window, Quotient):
        window = window.window
    if not window.any():
        raise DomainError("harnack window is empty")

    reach = [int(math.floor(radius / grid.h[i] * (1 + 1e-12))) for i in range(grid.dim)]
    grids = np.meshgrid(*[np.arange(-r, r + 1) for r in reach], indexing="ij")
    dist = np.zeros(grids[0].shape)
    for i, gg in enumerate(grids):
        dist = dist + (gg * grid.h[i]) ** 2
    footprint = np.sqrt(dist) <= radius * (1 + 1e-12)

    # ndimage filters take a single boundary mode with a footprint, so wrap
    # periodic axes by hand and let the constant fill handle clamped edges
    # (out-of-grid points do not belong to any ball).
    def filtered(arr, fill, op):
        padded = arr
        pads = []
        for i in range(grid.dim):
            if grid.is_periodic(i) and reach[i] > 0:
                width = [(0, 0)] * grid.dim
                width[i] = (reach[i], reach[i])
                padded = np.pad(padded, width, mode="wrap")
                pads.append(reach[i])
            else:
                pads.append(0)
        out = op(padded, footprint=footprint, mode="constant", cval=fill)
        core = tuple(slice(p, p + s) for p, s in zip(pads, grid.shape))
        return out[core]

    hi = filtered(np.where(window, vals, -np.inf), -np.inf, ndimage.maximum_filter)
    lo = filtered(np.where(window, vals, np.inf), np.inf, ndimage.minimum_filter)
    ratios = hi[window] / lo[window]
    return float(np.max(ratios))


def window_components(quot, kernel):
    """Label the window by kernel-connectivity: points are linked when they
    are within the kernel's inner plateau reach of each other.

    The continuum argument glues local constancy of v into global constancy
    by connectedness; on a grid the same role is played by the components of
    this hop graph. Returns (labels array, component count); off-window
    entries are labeled 0, components are 1..k.
    """
    window = quot.window
    # hop set = the kernel's own positive-weight offsets
    nz = kernel.offsets[kernel.weights > 0.0]
    reach = [int(np.max(np.abs(nz[:, i]))) for i in range(kernel.dim)]
    footprint = np.zeros([2 * r + 1 for r in reach], dtype=bool)
    for off in nz:
        footprint[tuple(int(off[i]) + reach[i] for i in range(kernel.dim))] = True

    labels = np.where(window, np.arange(window.size, dtype=np.int64).reshape(window.shape) + 1, 0)
    while True:
        spread = ndimage.maximum_filter(labels, footprint=footprint, mode="constant", cval=0)
        merged = np.where(window, spread, 0)
        if np.array_equal(merged, labels):
            break
        labels = merged
    roots = np.unique(labels[window])
    relabeled = np.zeros_like(labels)
    for new, root in enumerate(roots, start=1):
        relabeled[labels == root] = new
    return relabeled, int(roots.size)


def component_means(quot, labels, count):
    """u2-weighted mean of v per window component."""
    out = []
    for comp in range(1, count + 1):
        sel = labels == comp
        w = quot.u2[sel]
        out.append(float(np.sum(w * quot.v[sel]) / np.sum(w)))
    return out


@dataclass(frozen=True)
class DirectionEstimate:
    a: float
    omega: tuple
    v_stddev: float


def estimate_direction(quot):
    """Direction w = (a, 1)/sqrt(a^2 + 1) from the u2-weighted mean of v.

    The u2 weighting matches the energies' pair weights, and makes the
    estimate invariant under positive rescaling of (u1, u2)."""
    w = np.where(quot.window, quot.u2, 0.0)
    total = float(np.sum(w))
    if total <= 0.0:
        raise DomainError("direction estimate needs positive window weight")
    a = float(np.sum(w * quot.v) / total)
    stddev = math.sqrt(float(np.sum(w * (quot.v - a) ** 2) / total))
    norm = math.hypot(a, 1.0)
    return DirectionEstimate(a=a, omega=(a / norm, 1.0 / norm), v_stddev=stddev)


def fit_planar_profile(field, omega, window=None, bin_width=None):
    """Bin samples by s = w . x and return (bin centers, bin means)."""
    grid = field.grid
    coords = grid.coords()
    s = sum(float(omega[i]) * coords[i] for i in range(grid.dim))
    vals = field.values
    if window is not None:
        s = s[window]
        vals = vals[window]
    s = np.asarray(s).ravel()
    vals = np.asarray(vals).ravel()
    if bin_width is None:
        bin_width = min(grid.h)
    idx = np.floor((s - s.min()) / bin_width + 0.5).astype(np.int64)
    counts = np.bincount(idx)
    sums = np.bincount(idx, weights=vals)
    scoord = np.bincount(idx, weights=s)
    nonempty = counts > 0
    centers = scoord[nonempty] / counts[nonempty]
    means = sums[nonempty] / counts[nonempty]
    return centers, means


def planarity_error(field, omega, window=None, bin_width=None):
    """Sup-norm distance from the best planar representation along omega.

    Fits the 1D profile as bin means over s = w . x (bin width defaults to
    the grid spacing) evaluated by linear interpolation between bin centers.
    """
    grid = field.grid
    coords = grid.coords()
    s = sum(float(omega[i]) * coords[i] for i in range(grid.dim))
    centers, means = fit_planar_profile(field, omega, window=window, bin_width=bin_width)
    fitted = np.interp(s, centers, means)
    err = np.abs(field.values - fitted)
    if window is not None:
        err = err[window]
    return float(np.max(err))


def stability_residual(ctx, bundle, psi, window=None):
    """Sup-norm of L psi - f'(u) psi over the window, relative to |psi|_inf.

    psi must be strictly positive on the window; the positive-eigenfunction
    hypothesis is what the quantity probes.
    """
    if isinstance(window, Quotient):
        window = window.window
    if window is None:
        window = np.ones(ctx.grid.shape, dtype=bool)
    pvals = psi.values
    if float(np.min(pvals[window])) <= 0.0:
        raise DomainError("psi must be positive on the window")
    f = get_nonlinearity(bundle.nonlinearity)
    res = apply_L_values(ctx, pvals) - f.fprime(bundle.u.values) * pvals
    norm = float(np.max(np.abs(pvals[window])))
    return float(np.max(np.abs(res[window]))) / norm


def refine_vertical_mode(ctx, bundle, window=None, target=1e-9, max_steps=2000):
    """Positive near-null eigenfunction of the linearization, seeded with u2.

    In the continuum the derivative u2 solves L psi = f'(u) psi exactly; its
    centered-difference sample does not, because the discrete chain rule
    carries an O(h^2) defect at the interface regardless of how small the
    equation residual is. Relaxing psi by the linearized flow
    psi <- psi - dt (L psi - f'(u) psi) strips that discretization noise and
    converges to the discrete realization of the same positive mode.

    The step is capped at 1/(1 + max |f'|), which makes the iteration matrix
    entrywise nonnegative: positivity of psi is preserved exactly. Stops at
    ``target``, on a plateau (the dominant-mode defect cannot improve), or
    after ``max_steps``.
    """
    if isinstance(window, Quotient):
        window = window.window
    if window is None:
        window = np.ones(ctx.grid.shape, dtype=bool)
    f = get_nonlinearity(bundle.nonlinearity)
    fp = f.fprime(bundle.u.values)
    dt = 1.0 / (1.0 + f.fprime_max())
    psi = bundle.vertical_derivative().values.copy()
    psi = psi / float(np.max(np.abs(psi)))
    checkpoint = math.inf
    for step in range(max_steps):
        resid = apply_L_values(ctx, psi) - fp * psi
        stab = float(np.max(np.abs(resid[window]))) / float(np.max(np.abs(psi[window])))
        if stab <= target:
            break
        if step % 25 == 0:
            if stab > 0.99 * checkpoint:
                break
            checkpoint = stab
        psi = psi - dt * resid
        psi = psi / float(np.max(np.abs(psi)))
    return Field(ctx.grid, psi)


@dataclass(frozen=True)
class RigidityReport:
    """Per-radius record of the energy chain plus the shared diagnostics."""

    R: float
    J1: float
    J2: float
    cs_factor_a: float
    cs_factor_b: float
    cs_holds: bool
    slack: float
    chain_holds: bool
    kappa_observed: float
    tail_energy: float
    region_pair_count: int
    harnack_C: float
    a: float
    omega: tuple
    v_stddev: float
    planarity_error_inf: float
    stability_resid: float
    stability_resid_raw_u2: float
    window_fraction: float
    eps_floor: float
    residual_inf: float
    energy_scale: float
    cutoff_clipped: bool

    def __post_init__(self):
        if self.J1 < 0.0 or self.cs_factor_a < 0.0 or self.cs_factor_b < 0.0:
            raise AssertionError("energy sums must be nonnegative")
        if abs(math.hypot(*self.omega) - 1.0) > 1e-12:
            raise AssertionError("omega must be a unit vector")
        if self.harnack_C < 1.0 - 1e-12:
            raise AssertionError("harnack constant is a sup/inf ratio >= 1")

    CSV_FIELDS = (
        "R", "J1", "J2", "cs_factor_a", "cs_factor_b", "cs_holds", "slack",
        "chain_holds", "kappa_observed", "tail_energy", "region_pair_count",
        "harnack_C", "a", "omega_1", "omega_2", "v_stddev",
        "planarity_error_inf", "stability_resid", "stability_resid_raw_u2",
        "window_fraction", "eps_floor", "residual_inf",
        "energy_scale", "cutoff_clipped",
    )

    def csv_row(self):
        vals = {
            "R": repr(self.R), "J1": repr(self.J1), "J2": repr(self.J2),
            "cs_factor_a": repr(self.cs_factor_a),
            "cs_factor_b": repr(self.cs_factor_b),
            "cs_holds": str(self.cs_holds).lower(),
            "slack": repr(self.slack),
            "chain_holds": str(self.chain_holds).lower(),
            "kappa_observed": repr(self.kappa_observed),
            "tail_energy": repr(self.tail_energy),
            "region_pair_count": str(self.region_pair_count),
            "harnack_C": repr(self.harnack_C),
            "a": repr(self.a),
            "omega_1": repr(self.omega[0]), "omega_2": repr(self.omega[1]),
            "v_stddev": repr(self.v_stddev),
            "planarity_error_inf": repr(self.planarity_error_inf),
            "stability_resid": repr(self.stability_resid),
            "stability_resid_raw_u2": repr(self.stability_resid_raw_u2),
            "window_fraction": repr(self.window_fraction),
            "eps_floor": repr(self.eps_floor),
            "residual_inf": repr(self.residual_inf),
            "energy_scale": repr(self.energy_scale),
            "cutoff_clipped": str(self.cutoff_clipped).lower(),
        }
        return ",".join(vals[f] for f in self.CSV_FIELDS)


@dataclass(frozen=True)
class RigidityOptions:
    eps_floor_rel: float = DEFAULT_EPS_FLOOR_REL
    slack_kappa: float = DEFAULT_SLACK_KAPPA
    harnack_radius: float = None
    center: tuple = None


def verify_energy_chain(ctx, bundle, R_list, opts=None):
    """Evaluate the full chain at every radius in ``R_list``.

    Per radius: J1, J2 with its Cauchy-Schwarz factors, the tail energy over
    the near-diagonal region, the region pair count, and the inequality
    J1 <= J2 + slack with slack = kappa * residual * energy_scale (the
    energy scale is the windowed mass of (1 + v^2) u2^2). Shared diagnostics
    (direction, dispersion, planarity, Harnack, stability residual) are
    repeated on every row so each CSV row is self-contained.
    """
    opts = opts or RigidityOptions()
    if bundle.dim != 2:
        raise ConfigurationError("the energy chain is a two-dimensional diagnostic")
    grid = ctx.grid
    f = get_nonlinearity(bundle.nonlinearity)
    residual = float(np.max(np.abs(
        apply_L_values(ctx, bundle.u.values) - f.f(bundle.u.values)
    )))

    eps_floor = opts.eps_floor_rel * float(np.max(bundle.u2.values))
    quot = compute_quotient(bundle, eps_floor)
    direction = estimate_direction(quot)
    planarity = planarity_error(bundle.u, direction.omega)
    R0 = ctx.kernel.support_radius()
    harnack = harnack_ratio(bundle, opts.harnack_radius or R0, window=quot)
    stability_raw = stability_residual(ctx, bundle, bundle.u2, window=quot)
    psi = refine_vertical_mode(ctx, bundle, window=quot)
    if float(np.min(psi.values[quot.window])) > 0.0:
        stability = stability_residual(ctx, bundle, psi, window=quot)
    else:
        stability = stability_raw
    center = opts.center or grid.center()

    w = np.where(quot.window, quot.u2, 0.0)
    energy_scale = float(np.sum((1.0 + quot.v ** 2) * w * w)) * grid.cell_volume
    slack = opts.slack_kappa * residual * max(energy_scale, 1e-300)

    reports = []
    for R in R_list:
        cutoff = build_cutoff(grid, R, center=center, strict=False)
        region = PairRegion(R=float(R), R0=R0, center=center)
        sums = chain_sums(ctx, quot, cutoff, region)
        count = region_pair_count(ctx, region)
        cs_bound = sums.cs_factor_a * sums.cs_factor_b
        cs_holds = sums.J2 ** 2 <= cs_bound * (1.0 + 1e-12) + 1e-300
        chain_holds = sums.J1 <= sums.J2 + slack
        gap = sums.J1 - sums.J2
        kappa_obs = gap / (residual * max(energy_scale, 1e-300)) if gap > 0.0 else 0.0
        reports.append(RigidityReport(
            R=float(R), J1=sums.J1, J2=sums.J2,
            cs_factor_a=sums.cs_factor_a, cs_factor_b=sums.cs_factor_b,
            cs_holds=cs_holds, slack=slack, chain_holds=chain_holds,
            kappa_observed=kappa_obs, tail_energy=sums.tail_energy,
            region_pair_count=count, harnack_C=harnack,
            a=direction.a, omega=direction.omega, v_stddev=direction.v_stddev,
            planarity_error_inf=planarity,
            stability_resid=stability, stability_resid_raw_u2=stability_raw,
            window_fraction=quot.window_fraction,
            eps_floor=quot.eps_floor, residual_inf=residual,
            energy_scale=energy_scale, cutoff_clipped=cutoff.clipped,
        ))
    return reports


def write_reports_csv(reports, path):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(",".join(RigidityReport.CSV_FIELDS) + "\n")
        for rep in reports:
            fh.write(rep.csv_row() + "\n")


def write_reports_text(reports, path, extra=None):
    """Shared diagnostics once, then the per-radius chain as prefixed keys."""
    lines = []
    if extra:
        for key, value in extra.items():
            lines.append(f"{key} = {value}")
    if reports:
        head = reports[0]
        for key in ("a", "v_stddev", "planarity_error_inf", "harnack_C",
                    "stability_resid", "stability_resid_raw_u2",
                    "window_fraction", "eps_floor", "residual_inf",
                    "energy_scale", "slack"):
            lines.append(f"{key} = {getattr(head, key)!r}")
        lines.append(f"omega = {head.omega[0]!r} {head.omega[1]!r}")
        for rep in reports:
            tag = f"R{rep.R:g}"
            lines.append(f"{tag}_J1 = {rep.J1!r}")
            lines.append(f"{tag}_J2 = {rep.J2!r}")
            lines.append(f"{tag}_cs_factor_a = {rep.cs_factor_a!r}")
            lines.append(f"{tag}_cs_factor_b = {rep.cs_factor_b!r}")
            lines.append(f"{tag}_cs_holds = {str(rep.cs_holds).lower()}")
            lines.append(f"{tag}_chain_holds = {str(rep.chain_holds).lower()}")
            lines.append(f"{tag}_tail_energy = {rep.tail_energy!r}")
            lines.append(f"{tag}_region_pair_count = {rep.region_pair_count}")
            lines.append(f"{tag}_cutoff_clipped = {str(rep.cutoff_clipped).lower()}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
