"""Rectangular grids, scalar fields, nonlinearities, and discrete derivatives.

Conventions used throughout the package:

* axis 0 carries the x1 coordinate, axis 1 (when present) carries x2;
* field values are stored as float64 arrays of shape ``grid.n`` (row-major,
  so axis 0 varies slowest when flattened);
* evaluation outside the index range follows the per-axis boundary rule:
  ``periodic`` wraps indices, ``clamp`` repeats the nearest edge sample.

Fields are immutable after construction and safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError

PERIODIC = "periodic"
CLAMP = "clamp"
BOUNDARIES = (PERIODIC, CLAMP)

CENTERED2 = "centered2"
SPECTRAL = "spectral"


@dataclass(frozen=True)
class Grid:
    """Uniform lattice in one or two dimensions.

    The coordinate of index j on axis i is ``origin[i] + j * h[i]``. On a
    periodic axis the period is ``n[i] * h[i]`` (the sample at index n would
    coincide with index 0).
    """

    n: tuple
    h: tuple
    origin: tuple
    boundary: tuple

    def __post_init__(self):
        n = tuple(int(v) for v in np.atleast_1d(np.asarray(self.n, dtype=object)))
        h = tuple(float(v) for v in np.atleast_1d(np.asarray(self.h, dtype=object)))
        origin = tuple(float(v) for v in np.atleast_1d(np.asarray(self.origin, dtype=object)))
        boundary = self.boundary
        if isinstance(boundary, str):
            boundary = (boundary,)
        boundary = tuple(str(b) for b in boundary)
        dim = len(n)
        if dim not in (1, 2):
            raise ConfigurationError(f"grid must be 1D or 2D, got {dim} axes")
        if not (len(h) == len(origin) == len(boundary) == dim):
            raise ConfigurationError("grid axis descriptors have inconsistent lengths")
        for i in range(dim):
            if n[i] < 4:
                raise ConfigurationError(f"axis {i}: need at least 4 points, got {n[i]}")
            if not (math.isfinite(h[i]) and h[i] > 0.0):
                raise ConfigurationError(f"axis {i}: spacing must be positive, got {h[i]}")
            if not math.isfinite(origin[i]):
                raise ConfigurationError(f"axis {i}: origin must be finite")
            if boundary[i] not in BOUNDARIES:
                raise ConfigurationError(f"axis {i}: unknown boundary rule {boundary[i]!r}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "boundary", boundary)

    @classmethod
    def centered(cls, n, h, boundary):
        """Grid whose sample coordinates are symmetric about 0 on every axis."""
        n = tuple(int(v) for v in np.atleast_1d(np.asarray(n, dtype=object)))
        h = tuple(float(v) for v in np.atleast_1d(np.asarray(h, dtype=object)))
        if len(h) == 1 and len(n) > 1:
            h = h * len(n)
        origin = tuple(-(n[i] - 1) * h[i] / 2.0 for i in range(len(n)))
        return cls(n, h, origin, boundary)

    @property
    def dim(self):
        return len(self.n)

    @property
    def shape(self):
        return self.n

    @property
    def size(self):
        return int(np.prod(self.n))

    @property
    def cell_volume(self):
        return float(np.prod(self.h))

    def is_periodic(self, axis):
        return self.boundary[axis] == PERIODIC

    def axis_coords(self, axis):
        return self.origin[axis] + self.h[axis] * np.arange(self.n[axis])

    def coords(self):
        """Tuple of coordinate arrays of shape ``self.n`` (ij indexing)."""
        axes = [self.axis_coords(i) for i in range(self.dim)]
        if self.dim == 1:
            return (axes[0],)
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def half_extent(self, axis):
        """Half the coordinate span covered by samples on the axis."""
        return (self.n[axis] - 1) * self.h[axis] / 2.0

    def period(self, axis):
        return self.n[axis] * self.h[axis]

    def center(self):
        """Coordinate midpoint of the sampled box."""
        return tuple(self.origin[i] + self.half_extent(i) for i in range(self.dim))

    def pad_modes(self):
        return tuple("wrap" if b == PERIODIC else "edge" for b in self.boundary)


class Field:
    """Scalar samples on a grid. Values are finite, float64, and read-only."""

    __slots__ = ("grid", "values")

    def __init__(self, grid, values):
        arr = np.asarray(values, dtype=np.float64)
        if arr.size != grid.size:
            raise ConfigurationError(
                f"field has {arr.size} values for a grid of {grid.size} points"
            )
        arr = arr.reshape(grid.shape).copy()
        if not np.isfinite(arr).all():
            bad = int(np.flatnonzero(~np.isfinite(arr.ravel()))[0])
            raise ConfigurationError(f"field contains a non-finite value at flat index {bad}")
        arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Field is immutable")

    @classmethod
    def from_function(cls, grid, fn):
        return cls(grid, fn(*grid.coords()))

    @classmethod
    def constant(cls, grid, value):
        return cls(grid, np.full(grid.shape, float(value)))

    def with_values(self, values):
        return Field(self.grid, values)

    def max_abs(self):
        return float(np.max(np.abs(self.values)))


def pad_values(grid, values, pad):
    """Extend an array by ``pad[i]`` ghost layers per side following the grid's rules."""
    out = np.asarray(values)
    for axis, (p, mode) in enumerate(zip(pad, grid.pad_modes())):
        if p == 0:
            continue
        width = [(0, 0)] * out.ndim
        width[axis] = (p, p)
        out = np.pad(out, width, mode=mode)
    return out


def shifted_view(padded, pad, delta, shape):
    """View of ``u(x - delta)`` inside a padded array."""
    slices = tuple(
        slice(p - d, p - d + s) for p, d, s in zip(pad, delta, shape)
    )
    return padded[slices]


def default_scheme(grid, axis):
    return SPECTRAL if grid.is_periodic(axis) else CENTERED2


def partial_derivative(field, axis, scheme=None):
    """Discrete partial derivative along one axis.

    ``centered2`` uses (u(x + h e_i) - u(x - h e_i)) / (2h) with the grid's
    exterior extension; ``spectral`` applies the exact Fourier multiplier and
    requires a periodic axis.
    """
    grid = field.grid
    if scheme is None:
        scheme = default_scheme(grid, axis)
    if scheme == SPECTRAL:
        if not grid.is_periodic(axis):
            raise ConfigurationError(
                f"spectral derivative requested on non-periodic axis {axis}"
            )
        n = grid.n[axis]
        k = 2.0 * np.pi * np.fft.fftfreq(n, d=grid.h[axis])
        shape = [1] * grid.dim
        shape[axis] = n
        mult = (1j * k).reshape(shape)
        out = np.fft.ifft(mult * np.fft.fft(field.values, axis=axis), axis=axis).real
        return Field(grid, out)
    if scheme == CENTERED2:
        pad = [0] * grid.dim
        pad[axis] = 1
        padded = pad_values(grid, field.values, pad)
        plus = shifted_view(padded, pad, tuple(-1 if i == axis else 0 for i in range(grid.dim)), grid.shape)
        minus = shifted_view(padded, pad, tuple(1 if i == axis else 0 for i in range(grid.dim)), grid.shape)
        return Field(grid, (plus - minus) / (2.0 * grid.h[axis]))
    raise ConfigurationError(f"unknown derivative scheme {scheme!r}")


@dataclass(frozen=True)
class Nonlinearity:
    """Reaction term f together with its derivative f'."""

    name: str
    f: Callable
    fprime: Callable

    def derivative_defect(self, lo=-1.5, hi=1.5, samples=201):
        """Max relative mismatch between fprime and a centered difference of f."""
        u = np.linspace(lo, hi, samples)
        eps = 1e-6
        fd = (self.f(u + eps) - self.f(u - eps)) / (2.0 * eps)
        exact = self.fprime(u)
        scale = np.maximum(np.abs(exact), 1.0)
        return float(np.max(np.abs(fd - exact) / scale))

    def fprime_max(self, lo=-1.0, hi=1.0, samples=4001):
        u = np.linspace(lo, hi, samples)
        return float(np.max(np.abs(self.fprime(u))))


def scaled_cubic(name, strength):
    """Balanced bistable cubic strength * (u - u^3).

    The unit-strength cubic is the classical default, but against a
    normalized kernel it is degenerate: 1 - f'(0) = 0, so the connecting
    profile picks up a cube-root vertical tangent at the interface and its
    derivative is unbounded. Strengths below 1 keep the profile C^1 with
    bounded slope, which the monotonicity/Harnack machinery needs.
    """
    s = float(strength)

    def f(u):
        return s * (u - u ** 3)

    def fprime(u):
        return s * (1.0 - 3.0 * u ** 2)

    return Nonlinearity(name, f, fprime)


NONLINEARITIES = {
    "cubic": scaled_cubic("cubic", 1.0),
    "half_cubic": scaled_cubic("half_cubic", 0.5),
    "quarter_cubic": scaled_cubic("quarter_cubic", 0.25),
}


def get_nonlinearity(name):
    try:
        return NONLINEARITIES[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown nonlinearity {name!r}; available: {sorted(NONLINEARITIES)}"
        ) from None
