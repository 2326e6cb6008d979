"""Convolution kernels: construction, normalization, hypothesis validation.

A kernel is an even, nonnegative density k supported in the ball of radius
``R0`` with a strictly positive plateau on the ball of radius ``r0``:

    m0 * chi_{B_r0}(z) <= k(z) <= M0 * chi_{B_R0}(z),   integral k = 1.

Discretization samples k at cell centers (midpoint rule) and renormalizes so
the discrete integral is exactly 1; the renormalization factor is recorded as
the quadrature slack ``q`` and the density bounds are checked with (1 +- q)
tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ResolutionError
from .util import quintic_smoothstep

BALL_INDICATOR = "ball_indicator"
SMOOTH_BUMP = "smooth_bump"
ANNULAR_MIX = "annular_mix"
FAMILIES = (BALL_INDICATOR, SMOOTH_BUMP, ANNULAR_MIX)

NORMALIZATION_TOL = 1e-14


def ball_volume(dim, radius):
    if dim == 1:
        return 2.0 * radius
    return math.pi * radius ** 2


@dataclass(frozen=True)
class KernelSpec:
    """Parameters of a kernel family plus the sandwich bounds to validate."""

    family: str
    r0: float
    R0: float
    m0: float
    M0: float
    dim: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(
                f"unknown kernel family {self.family!r}; available: {FAMILIES}"
            )
        if self.dim not in (1, 2):
            raise ConfigurationError(f"kernel dim must be 1 or 2, got {self.dim}")
        if not (0.0 < self.r0 <= self.R0):
            raise ConfigurationError(
                f"need 0 < r0 <= R0, got r0={self.r0}, R0={self.R0}"
            )
        if not (0.0 < self.m0 <= self.M0):
            raise ConfigurationError(
                f"need 0 < m0 <= M0, got m0={self.m0}, M0={self.M0}"
            )

    def density(self):
        """Vectorized radial density r -> k(r), normalized in the continuum."""
        dim, r0, R0 = self.dim, self.r0, self.R0
        if self.family == BALL_INDICATOR:
            c = 1.0 / ball_volume(dim, R0)
            return lambda r: np.where(r <= R0, c, 0.0)
        if self.family == ANNULAR_MIX:
            # Equal-mass mixture of the r0-ball and R0-ball indicators: a
            # taller core plateau over a thinner annular shelf.
            c_in = 0.5 / ball_volume(dim, r0)
            c_out = 0.5 / ball_volume(dim, R0)
            return lambda r: np.where(r <= r0, c_in, 0.0) + np.where(r <= R0, c_out, 0.0)
        # smooth_bump: plateau on B_r0, quintic-smooth decay to 0 at R0.
        if R0 == r0:
            shape = lambda r: np.where(r <= R0, 1.0, 0.0)
        else:
            shape = lambda r: np.where(
                r <= R0, quintic_smoothstep((R0 - r) / (R0 - r0)), 0.0
            )
        rr = np.linspace(0.0, R0, 20001)
        if dim == 1:
            mass = 2.0 * np.trapezoid(shape(rr), rr)
        else:
            mass = 2.0 * math.pi * np.trapezoid(shape(rr) * rr, rr)
        amp = 1.0 / mass
        return lambda r: amp * shape(r)

    @classmethod
    def with_default_bounds(cls, family, r0, R0, dim):
        """Spec with m0/M0 set from the family's own density, with margin for
        the midpoint-quadrature drift of coarse discretizations."""
        probe = cls(family, r0, R0, 1.0, 2.0, dim)
        rho = probe.density()
        core = np.linspace(0.0, r0, 513)
        dmin = float(np.min(rho(core)))
        dmax = float(np.max(rho(np.linspace(0.0, R0, 2049))))
        return cls(family, r0, R0, 0.8 * dmin, 1.25 * dmax, dim)


@dataclass(frozen=True)
class DiscreteKernel:
    """Symmetric stencil of (integer offset, density weight) pairs.

    ``weights[j]`` is the sampled density at physical offset ``offsets[j] * h``;
    the quadrature weight of an entry is ``weights[j] * cell_volume`` and these
    sum to 1 after renormalization. ``slack`` records how far the raw midpoint
    sums were from 1 before renormalizing.
    """

    h: tuple
    offsets: np.ndarray
    weights: np.ndarray
    slack: float = 0.0

    def __post_init__(self):
        offsets = np.asarray(self.offsets, dtype=np.int64)
        weights = np.asarray(self.weights, dtype=np.float64)
        if offsets.ndim == 1:
            offsets = offsets[:, None]
        if offsets.shape[0] != weights.shape[0]:
            raise ConfigurationError("offsets and weights have mismatched lengths")
        h = tuple(float(v) for v in np.atleast_1d(np.asarray(self.h, dtype=object)))
        if offsets.shape[1] != len(h):
            raise ConfigurationError("offset dimension does not match spacing")
        offsets = offsets.copy()
        weights = weights.copy()
        offsets.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "weights", weights)

    @property
    def dim(self):
        return len(self.h)

    @property
    def cell_volume(self):
        return float(np.prod(self.h))

    @property
    def size(self):
        return int(self.weights.shape[0])

    def quadrature_weights(self):
        return self.weights * self.cell_volume

    def radii(self):
        return np.sqrt(np.sum((self.offsets * np.asarray(self.h)) ** 2, axis=1))

    def support_radius(self):
        nz = self.weights != 0.0
        if not nz.any():
            return 0.0
        return float(np.max(self.radii()[nz]))

    def total_weight(self):
        return float(np.sum(self.quadrature_weights()))

    def _index_map(self):
        return {tuple(int(c) for c in off): j for j, off in enumerate(self.offsets)}

    def symmetry_defect(self):
        """(max |w(d) - w(-d)|, worst offset); offsets without a mirror count in full."""
        index = self._index_map()
        worst = 0.0
        worst_offset = None
        for j, off in enumerate(self.offsets):
            key = tuple(int(-c) for c in off)
            mirror = index.get(key)
            gap = abs(self.weights[j]) if mirror is None else abs(
                self.weights[j] - self.weights[mirror]
            )
            if gap > worst:
                worst = float(gap)
                worst_offset = tuple(int(c) for c in off)
        return worst, worst_offset

    def first_moment(self):
        """Sum of offset * quadrature weight, accumulated over (d, -d) pairs so
        an even kernel yields exactly zero in floating point."""
        index = self._index_map()
        qw = self.quadrature_weights()
        hh = np.asarray(self.h)
        total = np.zeros(self.dim)
        seen = set()
        for j, off in enumerate(self.offsets):
            key = tuple(int(c) for c in off)
            if key in seen:
                continue
            neg = tuple(-c for c in key)
            seen.add(key)
            delta = np.asarray(key) * hh
            if neg == key:
                total += delta * qw[j]
                continue
            mirror = index.get(neg)
            if mirror is None:
                total += delta * qw[j]
            else:
                seen.add(neg)
                total += delta * qw[j] + (-delta) * qw[mirror]
        return total

    def to_csv(self, path):
        cols = ["offset_x", "offset_y"][: self.dim] + ["weight"]
        with open(path, "w", encoding="ascii") as fh:
            fh.write(",".join(cols) + "\n")
            for off, w in zip(self.offsets, self.weights):
                fh.write(",".join(str(int(c)) for c in off) + f",{float(w)!r}\n")

    @classmethod
    def from_csv(cls, path, h):
        rows = Path(path).read_text(encoding="ascii").splitlines()
        if not rows:
            raise ConfigurationError(f"empty stencil file {path}")
        header = rows[0].split(",")
        dim = len(header) - 1
        if dim not in (1, 2) or header[-1] != "weight":
            raise ConfigurationError(f"bad stencil header {rows[0]!r} in {path}")
        offsets, weights = [], []
        for row in rows[1:]:
            if not row.strip():
                continue
            parts = row.split(",")
            offsets.append([int(p) for p in parts[:dim]])
            weights.append(float(parts[dim]))
        return cls(h=h, offsets=np.asarray(offsets), weights=np.asarray(weights))


def build_kernel(spec, h):
    """Sample a kernel family on a lattice of spacing h and renormalize.

    Requires h <= r0/2 so at least two cells resolve the inner plateau.
    Symmetry is enforced by averaging mirror weights; the discrete integral
    is driven to 1 within 1e-15 by repeated rescaling.
    """
    hh = np.atleast_1d(np.asarray(h, dtype=np.float64))
    if hh.size == 1 and spec.dim > 1:
        hh = np.repeat(hh, spec.dim)
    if hh.size != spec.dim:
        raise ConfigurationError(
            f"spacing has {hh.size} components for a {spec.dim}D kernel"
        )
    if np.any(hh <= 0):
        raise ConfigurationError("kernel spacing must be positive")
    if float(np.max(hh)) > spec.r0 / 2.0 * (1.0 + 1e-12):
        raise ResolutionError(
            f"spacing {float(np.max(hh))} too coarse: need h <= r0/2 = {spec.r0 / 2.0}"
        )

    reach = [int(math.floor(spec.R0 / hh[i] * (1.0 + 1e-12))) for i in range(spec.dim)]
    ranges = [np.arange(-r, r + 1, dtype=np.int64) for r in reach]
    if spec.dim == 1:
        offsets = ranges[0][:, None]
    else:
        a, b = np.meshgrid(*ranges, indexing="ij")
        offsets = np.column_stack([a.ravel(), b.ravel()])
    radii = np.sqrt(np.sum((offsets * hh) ** 2, axis=1))
    inside = radii <= spec.R0 * (1.0 + 1e-12)
    offsets = offsets[inside]
    radii = radii[inside]
    weights = np.asarray(spec.density()(radii), dtype=np.float64)
    keep = weights > 0.0
    offsets = offsets[keep]
    weights = weights[keep]
    if weights.size == 0:
        raise ResolutionError("no stencil entries with positive weight")

    # Radial sampling is symmetric by construction; average mirrors anyway so
    # evenness is a hard invariant rather than a property of the profile.
    index = {tuple(int(c) for c in off): j for j, off in enumerate(offsets)}
    sym = weights.copy()
    for j, off in enumerate(offsets):
        mirror = index[tuple(int(-c) for c in off)]
        if mirror != j:
            avg = 0.5 * (weights[j] + weights[mirror])
            sym[j] = avg
            sym[mirror] = avg
    weights = sym

    vol = float(np.prod(hh))
    raw_total = float(np.sum(weights) * vol)
    slack = abs(1.0 / raw_total - 1.0)
    for _ in range(4):
        total = float(np.sum(weights) * vol)
        if abs(total - 1.0) <= 1e-15:
            break
        weights = weights / total

    kernel = DiscreteKernel(h=tuple(float(v) for v in hh), offsets=offsets,
                            weights=weights, slack=slack)
    assert abs(kernel.total_weight() - 1.0) <= NORMALIZATION_TOL
    return kernel


@dataclass(frozen=True)
class KernelValidation:
    """Outcome of checking a discrete kernel against its spec's hypotheses.

    Failures are reported, never raised.
    """

    symmetry_defect: float
    offending_offset: tuple
    normalization_error: float
    core_floor: float
    core_floor_required: float
    density_ceiling: float
    density_ceiling_allowed: float
    support_radius: float
    support_limit: float
    first_moment_max: float
    q: float
    checks: dict

    @property
    def passed(self):
        return all(self.checks.values())

    def to_text(self):
        lines = []
        for name in ("symmetry_defect", "normalization_error", "core_floor",
                     "core_floor_required", "density_ceiling",
                     "density_ceiling_allowed", "support_radius", "support_limit",
                     "first_moment_max", "q"):
            lines.append(f"{name} = {getattr(self, name)!r}")
        lines.append(f"offending_offset = {self.offending_offset}")
        for name, ok in self.checks.items():
            lines.append(f"check_{name} = {'pass' if ok else 'FAIL'}")
        lines.append(f"passed = {self.passed}")
        return "\n".join(lines) + "\n"


def validate_kernel(kernel, spec):
    """Check evenness, normalization, the sandwich bounds, and support radius."""
    defect, offender = kernel.symmetry_defect()
    norm_err = abs(kernel.total_weight() - 1.0)
    q = kernel.slack

    hmax = float(np.max(np.asarray(kernel.h)))
    core_limit = spec.r0 - hmax
    index = kernel._index_map()
    reach = [int(math.floor(core_limit / kernel.h[i])) if core_limit > 0 else 0
             for i in range(kernel.dim)]
    core_floor = math.inf
    ranges = [range(-r, r + 1) for r in reach]
    if kernel.dim == 1:
        candidates = [(i,) for i in ranges[0]]
    else:
        candidates = [(i, j) for i in ranges[0] for j in ranges[1]]
    hh = np.asarray(kernel.h)
    for cand in candidates:
        if math.sqrt(float(np.sum((np.asarray(cand) * hh) ** 2))) > core_limit:
            continue
        j = index.get(cand)
        w = kernel.weights[j] if j is not None else 0.0
        core_floor = min(core_floor, float(w))
    if core_floor is math.inf:
        core_floor = 0.0

    ceiling = float(np.max(kernel.weights)) if kernel.size else 0.0
    support = kernel.support_radius()
    moment = float(np.max(np.abs(kernel.first_moment())))

    floor_required = spec.m0 * (1.0 - q)
    ceiling_allowed = spec.M0 * (1.0 + q)
    checks = {
        "evenness": defect == 0.0,
        "normalization": norm_err <= NORMALIZATION_TOL,
        "lower_bound": core_floor >= floor_required - 1e-12,
        "upper_bound": ceiling <= ceiling_allowed + 1e-12,
        "support": support <= spec.R0 * (1.0 + 1e-12),
        "first_moment": moment == 0.0,
    }
    return KernelValidation(
        symmetry_defect=defect,
        offending_offset=offender,
        normalization_error=norm_err,
        core_floor=core_floor,
        core_floor_required=floor_required,
        density_ceiling=ceiling,
        density_ceiling_allowed=ceiling_allowed,
        support_radius=support,
        support_limit=spec.R0,
        first_moment_max=moment,
        q=q,
        checks=checks,
    )
