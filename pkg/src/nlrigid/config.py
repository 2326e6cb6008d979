"""Run configuration: flat ``key = value`` files with environment overrides.

Lines are ``key = value``; ``#`` starts a comment. Any key can be overridden
by an environment variable named ``NLRIGID_<key>`` (the key spelled exactly
as in the file). Unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields

from .errors import ConfigurationError
from .grid import CLAMP, PERIODIC, Grid, get_nonlinearity
from .kernels import FAMILIES, KernelSpec

ENV_PREFIX = "NLRIGID_"


@dataclass
class RunConfig:
    # kernel
    kernel_family: str = "ball_indicator"
    kernel_r0: float = 1.0
    kernel_R0: float = 1.0
    kernel_m0: float = 0.0          # 0 means: derive from the family with margin
    kernel_M0: float = 0.0
    kernel_dim: int = 2
    kernel_file: str = ""           # CSV stencil overriding the family (validation input)
    # nonlinearity
    nonlinearity: str = "quarter_cubic"
    # 1D profile grid
    profile_half_width: float = 20.0
    profile_h: float = 0.05
    # 2D grid
    grid_n1: int = 256
    grid_n2: int = 161
    grid_h: float = 0.125
    grid_x1_half: float = 16.0
    grid_x2_half: float = 10.0
    grid_x1_boundary: str = PERIODIC
    # solver
    solver_tol: float = 1e-8
    solver_max_iter: int = 60000
    solver_lambda: float = 0.3
    solver_dt: float = 0.0          # 0 means: default fraction of the stability bound
    solver_tail_tol: float = 1e-4
    newton_threshold: float = 1e-2
    newton_tol: float = 1e-10
    # relax2d initial data
    init_mode: str = "perturbed"     # tilt | perturbed | file
    init_tilt_a: float = 1.0
    init_perturb_amp: float = 0.1
    init_perturb_waves: int = 6
    init_file: str = ""
    # rigidity
    R_list: str = "8,16,32"
    eps_floor_rel: float = 1e-6
    harnack_radius: float = 0.0      # 0 means: kernel support radius
    planarity_tol: float = 1e-3
    slack_kappa: float = 10.0
    # run
    seed: int = 0
    threads: int = 1
    plot: bool = True

    def kernel_spec(self, dim=None):
        dim = dim or self.kernel_dim
        if self.kernel_m0 > 0.0 and self.kernel_M0 > 0.0:
            return KernelSpec(self.kernel_family, self.kernel_r0, self.kernel_R0,
                              self.kernel_m0, self.kernel_M0, dim)
        return KernelSpec.with_default_bounds(self.kernel_family, self.kernel_r0,
                                              self.kernel_R0, dim)

    def profile_grid(self):
        n = int(round(2.0 * self.profile_half_width / self.profile_h)) + 1
        return Grid.centered((n,), (self.profile_h,), (CLAMP,))

    def relax_grid(self):
        h = self.grid_h
        n1, n2 = self.grid_n1, self.grid_n2
        if self.grid_x1_boundary == PERIODIC:
            origin1 = -n1 * h / 2.0
        else:
            origin1 = -(n1 - 1) * h / 2.0
        origin2 = -(n2 - 1) * h / 2.0
        return Grid((n1, n2), (h, h), (origin1, origin2),
                    (self.grid_x1_boundary, CLAMP))

    def r_values(self):
        try:
            vals = tuple(float(tok) for tok in self.R_list.split(",") if tok.strip())
        except ValueError:
            raise ConfigurationError(f"unparsable R_list {self.R_list!r}") from None
        if not vals:
            raise ConfigurationError("R_list is empty")
        if any(v <= 0 for v in vals):
            raise ConfigurationError("R_list entries must be positive")
        if list(vals) != sorted(vals):
            raise ConfigurationError("R_list must be sorted ascending")
        return vals

    def validate(self):
        if self.kernel_family not in FAMILIES and not self.kernel_file:
            raise ConfigurationError(f"unknown kernel family {self.kernel_family!r}")
        get_nonlinearity(self.nonlinearity)
        for key in ("kernel_r0", "kernel_R0", "profile_half_width", "profile_h",
                    "grid_h", "solver_tol", "solver_lambda", "solver_tail_tol",
                    "newton_threshold", "newton_tol", "eps_floor_rel",
                    "planarity_tol", "slack_kappa"):
            if getattr(self, key) <= 0:
                raise ConfigurationError(f"{key} must be positive")
        for key in ("solver_max_iter", "grid_n1", "grid_n2", "threads"):
            if getattr(self, key) <= 0:
                raise ConfigurationError(f"{key} must be positive")
        if self.solver_dt < 0 or self.harnack_radius < 0:
            raise ConfigurationError("solver_dt and harnack_radius must be >= 0")
        if self.grid_x1_boundary not in (PERIODIC, CLAMP):
            raise ConfigurationError(
                f"grid_x1_boundary must be periodic or clamp, got {self.grid_x1_boundary!r}"
            )
        if self.init_mode not in ("tilt", "perturbed", "file"):
            raise ConfigurationError(f"unknown init mode {self.init_mode!r}")
        self.r_values()
        self.kernel_spec()
        return self


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key, raw):
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    try:
        if kind == "bool":
            if raw.lower() in ("true", "1", "yes", "on"):
                return True
            if raw.lower() in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        return raw
    except ValueError:
        raise ConfigurationError(f"bad value {raw!r} for config key {key}") from None


def parse_config_text(text, source="<config>"):
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigurationError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ConfigurationError(f"{source}:{lineno}: unknown config key {key!r}")
        values[key] = _coerce(key, raw)
    return values


def load_config(path=None, env=None, overrides=None):
    """Build a validated RunConfig from a file, the environment, and explicit
    overrides (in increasing precedence)."""
    values = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            values.update(parse_config_text(fh.read(), source=str(path)))
    env = os.environ if env is None else env
    for key in _FIELD_TYPES:
        env_key = ENV_PREFIX + key
        if env_key in env:
            values[key] = _coerce(key, env[env_key])
    if overrides:
        for key, val in overrides.items():
            if key not in _FIELD_TYPES:
                raise ConfigurationError(f"unknown config key {key!r}")
            values[key] = val
    cfg = RunConfig(**values)
    return cfg.validate()


def config_to_text(cfg):
    lines = [f"{f.name} = {getattr(cfg, f.name)}" for f in fields(RunConfig)]
    return "\n".join(lines) + "\n"
