"""Batch front-end: kernel-check, solve-profile, relax2d, verify.

Exit code contract:
  0  every check passed
  1  a numerical check failed (non-convergence, failed hypothesis report,
     planarity/inequality violation)
  2  configuration error (bad config file, incompatible parameters)
  3  monotonicity hypothesis not met (verification refuses to run)

Reports are plain ``key = value`` text and CSV; figures are PNG files
rendered next to them (disable with --no-plot). For a fixed seed and config,
report files are byte-identical across runs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import load_config
from .errors import (ConfigurationError, DomainError, FieldIOError,
                     HypothesisError, SolverError)
from .fieldio import field_to_csv, read_field
from .grid import get_nonlinearity
from .kernels import DiscreteKernel, build_kernel, validate_kernel
from .operators import DIRECT, OperatorContext
from .rigidity import verify_energy_chain, RigidityOptions, write_reports_csv, write_reports_text
from .solvers import (SolverOptions, load_bundle, newton_polish, perturbed_front_init,
                      recheck_bundle, relax_2d, save_bundle, solve_profile_1d,
                      tilted_bundle)

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_CONFIG = 2
EXIT_HYPOTHESIS = 3


def _solver_options(cfg):
    return SolverOptions(
        tol=cfg.solver_tol,
        max_iter=cfg.solver_max_iter,
        relax_lambda=cfg.solver_lambda,
        dt=cfg.solver_dt if cfg.solver_dt > 0 else None,
        tail_tol=cfg.solver_tail_tol,
        newton_threshold=cfg.newton_threshold,
        newton_tol=cfg.newton_tol,
    )


def _write_history(history, path):
    with open(path, "w", encoding="ascii") as fh:
        fh.write("iter,residual_inf\n")
        for it, res in history:
            fh.write(f"{it},{res!r}\n")


def _write_keyvalues(pairs, path):
    with open(path, "w", encoding="ascii") as fh:
        for key, value in pairs:
            fh.write(f"{key} = {value}\n")


def _build_kernel(cfg, dim):
    if cfg.kernel_file:
        h = (cfg.grid_h,) * dim if dim > 1 else (cfg.profile_h,)
        return DiscreteKernel.from_csv(cfg.kernel_file, h)
    h = cfg.grid_h if dim == 2 else cfg.profile_h
    return build_kernel(cfg.kernel_spec(dim), (h,) * dim)


def cmd_kernel_check(cfg, out):
    """Build (or load) the kernel and validate every hypothesis on it."""
    spec = cfg.kernel_spec()
    kernel = _build_kernel(cfg, cfg.kernel_dim)
    report = validate_kernel(kernel, spec)
    (out / "validation.txt").write_text(report.to_text(), encoding="ascii")
    kernel.to_csv(out / "kernel.csv")
    if cfg.plot:
        from . import plots
        plots.plot_kernel(kernel, out / "kernel.png")
    print(report.to_text(), end="")
    return EXIT_OK if report.passed else EXIT_NUMERICAL


def cmd_solve_profile(cfg, out):
    """1D profile: damped fixed point plus a Newton polish."""
    f = get_nonlinearity(cfg.nonlinearity)
    kernel = _build_kernel(cfg, 1)
    grid = cfg.profile_grid()
    opts = _solver_options(cfg)
    try:
        bundle = solve_profile_1d(kernel, f, grid, opts)
    except SolverError as exc:
        _write_history(exc.history, out / "residual_history.csv")
        print(f"solve-profile: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    bundle = newton_polish(kernel, f, bundle, opts)
    _write_history(bundle.history, out / "residual_history.csv")
    save_bundle(bundle, out / "bundle")
    field_to_csv(bundle.u, out / "profile.csv")
    mid = bundle.u.values[grid.n[0] // 2]
    _write_keyvalues([
        ("residual_inf", repr(bundle.residual_inf)),
        ("monotone", str(bundle.monotone).lower()),
        ("u_at_center", repr(float(mid))),
        ("tail_gap_left", repr(float(abs(bundle.u.values[0] + 1.0)))),
        ("tail_gap_right", repr(float(abs(bundle.u.values[-1] - 1.0)))),
        ("newton_fallback", str(bundle.newton_fallback).lower()),
        ("iterations", str(len(bundle.history))),
        ("seed", str(cfg.seed)),
        ("threads", str(cfg.threads)),
    ], out / "summary.txt")
    if cfg.plot:
        from . import plots
        plots.plot_profile(bundle.u, out / "profile.png")
        plots.plot_residual_history(bundle.history, out / "residual.png")
    print(f"solve-profile: residual {bundle.residual_inf:.3e}, "
          f"monotone {bundle.monotone}, u(center) {mid:+.3e}")
    ok = bundle.residual_inf <= cfg.solver_tol and bundle.monotone
    return EXIT_OK if ok else EXIT_NUMERICAL


def _initial_field(cfg, grid, f, kernel, init_mode):
    if init_mode == "tilt":
        return tilted_bundle(kernel, f, grid, cfg.init_tilt_a).u
    if init_mode == "perturbed":
        return perturbed_front_init(grid, amp=cfg.init_perturb_amp,
                                    waves=cfg.init_perturb_waves)
    if init_mode == "file":
        if not cfg.init_file:
            raise ConfigurationError("init mode 'file' needs init_file in the config")
        field = read_field(cfg.init_file)
        if field.grid != grid:
            raise ConfigurationError("initial field grid does not match the run grid")
        return field
    raise ConfigurationError(f"unknown init mode {init_mode!r}")


def cmd_relax2d(cfg, out, init_mode=None):
    """2D relaxation from tilted/perturbed/file initial data."""
    init_mode = init_mode or cfg.init_mode
    f = get_nonlinearity(cfg.nonlinearity)
    grid = cfg.relax_grid()
    if init_mode == "tilt" and abs(cfg.init_tilt_a) > 0 and grid.is_periodic(0):
        raise ConfigurationError(
            "tilted initial data is incompatible with a periodic x1 axis; "
            "set grid_x1_boundary = clamp"
        )
    kernel = _build_kernel(cfg, 2)
    u0 = _initial_field(cfg, grid, f, kernel, init_mode)
    opts = _solver_options(cfg)
    bundle = relax_2d(kernel, f, grid, u0, opts)
    if bundle.residual_inf > cfg.solver_tol and bundle.residual_inf <= cfg.newton_threshold:
        bundle = newton_polish(kernel, f, bundle, opts)
    _write_history(bundle.history, out / "residual_history.csv")
    save_bundle(bundle, out / "bundle")
    _write_keyvalues([
        ("residual_inf", repr(bundle.residual_inf)),
        ("monotone", str(bundle.monotone).lower()),
        ("init_mode", init_mode),
        ("warnings", ";".join(bundle.warnings)),
        ("iterations", str(len(bundle.history))),
        ("seed", str(cfg.seed)),
        ("threads", str(cfg.threads)),
    ], out / "summary.txt")
    if cfg.plot:
        from . import plots
        plots.plot_heatmap(bundle.u, out / "u.png", title="relaxed field")
        plots.plot_residual_history(bundle.history, out / "residual.png")
    print(f"relax2d[{init_mode}]: residual {bundle.residual_inf:.3e}, "
          f"monotone {bundle.monotone}, steps {len(bundle.history)}")
    if not bundle.monotone:
        return EXIT_HYPOTHESIS
    if bundle.residual_inf > cfg.solver_tol:
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_verify(cfg, out, bundle_path):
    """Load a bundle and run the full symmetry verification chain."""
    bundle = load_bundle(bundle_path)
    if bundle.dim != 2:
        raise ConfigurationError("verify needs a 2D bundle")
    kernel = _build_kernel(cfg, 2)
    bundle = recheck_bundle(kernel, bundle)
    if not bundle.monotone:
        _write_keyvalues([
            ("monotone", "false"),
            ("verdict", "refused: monotonicity hypothesis not met"),
        ], out / "rigidity.txt")
        print("verify: bundle is not monotone; refusing (hypothesis unmet)",
              file=sys.stderr)
        return EXIT_HYPOTHESIS
    ctx = OperatorContext(kernel, bundle.grid, DIRECT)
    opts = RigidityOptions(
        eps_floor_rel=cfg.eps_floor_rel,
        slack_kappa=cfg.slack_kappa,
        harnack_radius=cfg.harnack_radius if cfg.harnack_radius > 0 else None,
    )
    reports = verify_energy_chain(ctx, bundle, cfg.r_values(), opts)
    write_reports_csv(reports, out / "rigidity.csv")
    head = reports[0]
    inequalities_ok = all(r.cs_holds and r.chain_holds for r in reports)
    planar_ok = head.planarity_error_inf <= cfg.planarity_tol
    verdict = "planar" if (inequalities_ok and planar_ok) else "not planar at tolerance"

    from .rigidity import component_means, compute_quotient, window_components
    quot = compute_quotient(bundle, head.eps_floor)
    labels, ncomp = window_components(quot, kernel)
    extra = {
        "monotone": "true",
        "planarity_tol": repr(cfg.planarity_tol),
        "inequalities_ok": str(inequalities_ok).lower(),
        "planarity_ok": str(planar_ok).lower(),
        "verdict": verdict,
        "window_components": str(ncomp),
        "pair_count_fit_C": repr(max(r.region_pair_count / r.R ** 2 for r in reports)),
        "seed": str(cfg.seed),
    }
    if ncomp > 1:
        for i, mean in enumerate(component_means(quot, labels, ncomp), start=1):
            extra[f"component_{i}_a"] = repr(mean)
    write_reports_text(reports, out / "rigidity.txt", extra=extra)
    if cfg.plot:
        from . import plots
        plots.plot_tail_energies(reports, out / "tail_energy.png")
        plots.plot_planar_fit(bundle, head.omega, out / "planar_fit.png")
    print(f"verify: a = {head.a:+.6e}, planarity {head.planarity_error_inf:.3e}, "
          f"inequalities {'ok' if inequalities_ok else 'VIOLATED'}")
    return EXIT_OK if (inequalities_ok and planar_ok) else EXIT_NUMERICAL


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nlrigid",
        description="Nonlocal convolution operators, front profiles, and "
                    "one-dimensional-symmetry diagnostics.",
    )
    parser.add_argument("--config", type=Path, default=None,
                        help="key = value config file")
    parser.add_argument("--out", type=Path, default=Path("out"),
                        help="output directory (created if missing)")
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    parser.add_argument("--threads", type=int, default=None,
                        help="recorded in reports; numeric kernels run single-threaded")
    parser.add_argument("--plot", dest="plot", action="store_true", default=None,
                        help="render PNG figures (default)")
    parser.add_argument("--no-plot", dest="plot", action="store_false",
                        help="skip figure rendering")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("kernel-check", help="build and validate the kernel hypotheses")
    sub.add_parser("solve-profile", help="solve the 1D monotone profile")
    relax = sub.add_parser("relax2d", help="relax a 2D monotone field")
    relax.add_argument("--init", choices=("tilt", "perturbed", "file"), default=None,
                       help="initial data (default from config)")
    verify = sub.add_parser("verify", help="run the symmetry verification chain")
    verify.add_argument("--bundle", type=Path, required=True,
                        help="bundle directory written by solve-profile/relax2d")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.threads is not None:
            overrides["threads"] = args.threads
        if args.plot is not None:
            overrides["plot"] = args.plot
        cfg = load_config(args.config, overrides=overrides)
        out = args.out
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "kernel-check":
            return cmd_kernel_check(cfg, out)
        if args.command == "solve-profile":
            return cmd_solve_profile(cfg, out)
        if args.command == "relax2d":
            return cmd_relax2d(cfg, out, init_mode=args.init)
        if args.command == "verify":
            return cmd_verify(cfg, out, args.bundle)
        parser.error(f"unknown command {args.command!r}")
    except (ConfigurationError, FieldIOError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HypothesisError as exc:
        print(f"hypothesis not met: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (SolverError, DomainError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
