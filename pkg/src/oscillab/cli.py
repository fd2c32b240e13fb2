"""Command-line front end.

Subcommands:

  spectrum        CSV of (j, lambda_j, scheme value) for one configuration
  bounds          CSV table of maximal-r bounds per scheme and sigma
  simulate        trajectory CSV + PGM heat map + oscillation report JSON
  nonlinear-eigs  frozen-Jacobian eigenstructure about a computed steady profile
  check           classify a configuration; JSON report on stdout, exit code
                  0 = no oscillations, 1 = fast-decaying, 2 = persistent,
                  3 = unstable, 64 = configuration error

Noise initial conditions use NumPy's PCG64 generator with the given 64-bit
seed, so identical invocations produce byte-identical outputs.  The
environment variable ``OSCILLAB_TOL`` overrides the condition-inequality
tolerance used by ``check``.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import conditions, diagnostics, fileio, nonlinear, simulate
from .schemes import (
    BoundaryData,
    Discretization,
    RationalScheme,
    default_schemes,
    forward_euler,
    modal_coefficients,
    parse_scheme,
    scheme_spectrum,
)
from .simulate import Kind, Problem

EXIT_CONFIG = 64

_CLASS_EXIT = {
    conditions.Classification.NON_OSCILLATORY: 0,
    conditions.Classification.FAST_DECAYING: 1,
    conditions.Classification.PERSISTENT: 2,
    conditions.Classification.UNSTABLE: 3,
}


class ConfigError(ValueError):
    pass


def initial_condition(spec: str, k: int, seed: int) -> np.ndarray:
    """Build an initial state: ramp | sine:j | step | noise[:seed] | file:path."""
    i = np.arange(1, k + 1, dtype=float)
    if spec == "ramp":
        return (k + 1 - i) / (k + 1)
    if spec.startswith("sine"):
        _, _, arg = spec.partition(":")
        try:
            j = int(arg) if arg else 1
        except ValueError:
            raise ConfigError(f"bad sine mode in IC spec {spec!r}") from None
        if not 1 <= j <= k:
            raise ConfigError(f"sine mode must be in 1..{k}, got {j}")
        return np.sin(np.pi * j * i / (k + 1))
    if spec == "step":
        return np.where(i <= k // 2, 1.0, 0.0)
    if spec.startswith("noise"):
        _, _, arg = spec.partition(":")
        if arg:
            try:
                seed = int(arg)
            except ValueError:
                raise ConfigError(f"bad noise seed in IC spec {spec!r}") from None
        rng = np.random.Generator(np.random.PCG64(seed))
        return rng.random(k)
    if spec.startswith("file:"):
        path = spec[5:]
        try:
            values = np.loadtxt(path, dtype=float).reshape(-1)
        except OSError as exc:
            raise ConfigError(f"cannot read IC file {path!r}: {exc}") from exc
        if values.size != k:
            raise ConfigError(f"IC file {path!r} has {values.size} values, expected {k}")
        return values
    raise ConfigError(f"unknown IC generator {spec!r}")


def _add_grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=100, help="interior grid points")
    p.add_argument("--dx", type=float, default=1.0, help="grid spacing")
    p.add_argument("--dt", type=float, default=None, help="time step (alternative to --r)")
    p.add_argument("--r", type=float, default=None, help="mesh ratio delta*dt/dx^2")
    p.add_argument("--delta", type=float, default=1.0, help="diffusivity")


def _add_problem_args(p: argparse.ArgumentParser, default_rho: float = 0.0) -> None:
    p.add_argument(
        "--kind",
        choices=[k.value for k in Kind],
        default="heat",
        help="PDE kind",
    )
    p.add_argument("--rho", type=float, default=default_rho, help="reaction coefficient")
    p.add_argument("--a", type=float, default=0.5, help="cubic reaction parameter")
    p.add_argument("--bc-left", type=float, default=0.0, help="left Dirichlet value")
    p.add_argument("--bc-right", type=float, default=0.0, help="right Dirichlet value")
    p.add_argument("--ic", default="ramp", help="initial condition generator")
    p.add_argument("--seed", type=int, default=0, help="seed for noise IC")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oscillab", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="scheme eigenvalues over the grid modes")
    p.add_argument("--scheme", required=True)
    _add_grid_args(p)
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bounds", help="maximal-r bounds table")
    p.add_argument("--scheme", action="append", default=None, help="repeatable; default set of four")
    p.add_argument("--sigma", type=float, action="append", default=None, help="repeatable; default 0")
    p.add_argument("--out", required=True)

    p = sub.add_parser("simulate", help="run a trajectory and score it")
    p.add_argument("--scheme", required=True)
    _add_grid_args(p)
    _add_problem_args(p)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--out", required=True, help="output prefix")
    p.add_argument("--format", choices=["csv", "json", "pgm", "all"], default="all")

    p = sub.add_parser("nonlinear-eigs", help="frozen-Jacobian eigenstructure")
    p.add_argument("--scheme", default="forward_euler")
    _add_grid_args(p)
    _add_problem_args(p, default_rho=1.0)
    p.set_defaults(kind="fisher_kpp", bc_left=1.0, bc_right=0.0)
    p.add_argument("--out", required=True, help="output prefix")

    p = sub.add_parser("check", help="classify a configuration")
    p.add_argument("--scheme", required=True)
    _add_grid_args(p)
    _add_problem_args(p)
    return parser


def _make_disc(args, rho: float, default_r: float | None = None) -> Discretization:
    given = [v for v in (args.dt, args.r) if v is not None]
    if len(given) > 1:
        raise ConfigError("supply exactly one of --dt and --r")
    if not given:
        if default_r is None:
            raise ConfigError("supply exactly one of --dt and --r")
        return Discretization.from_r(args.k, default_r, dx=args.dx, delta=args.delta, rho=rho)
    try:
        if args.r is not None:
            return Discretization.from_r(args.k, args.r, dx=args.dx, delta=args.delta, rho=rho)
        return Discretization(k=args.k, dx=args.dx, dt=args.dt, delta=args.delta, rho=rho)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _make_scheme(text: str) -> RationalScheme:
    try:
        return parse_scheme(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _make_problem(args) -> Problem:
    kind = Kind(args.kind)
    disc_rho = args.rho if kind is Kind.LINEAR_RD else 0.0
    disc = _make_disc(args, disc_rho)
    ic = initial_condition(args.ic, args.k, args.seed)
    try:
        return Problem(
            kind=kind,
            disc=disc,
            bc=BoundaryData(args.bc_left, args.bc_right),
            initial=ic,
            rho=args.rho,
            a_param=args.a,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _config_dict(args, skip=("out", "format", "command")) -> dict:
    return {k: v for k, v in vars(args).items() if k not in skip}


def _steady_profile(problem: Problem, scheme: RationalScheme) -> np.ndarray:
    """Steady reference state.  Linear kinds solve directly; nonlinear kinds
    iterate forward Euler at a safe step size (its fixed point solves the
    discrete steady equation independently of dt)."""
    if problem.kind.linear:
        return simulate.steady_state(problem, scheme)
    disc = problem.disc
    safe_r = min(disc.r, 0.2)
    safe = Discretization.from_r(disc.k, safe_r, dx=disc.dx, delta=disc.delta, rho=0.0)
    safe_problem = replace(problem, disc=safe)
    return simulate.steady_state(safe_problem, forward_euler(), tol=1e-12, max_iter=500_000)


def cmd_spectrum(args) -> int:
    scheme = _make_scheme(args.scheme)
    disc = _make_disc(args, args.rho)
    spec = scheme_spectrum(scheme, disc)
    cfg = fileio.config_hash(_config_dict(args))
    rows = [
        (j + 1, spec.lambdas[j], spec.scheme_values[j])
        for j in range(disc.k)
    ]
    fileio.write_csv(args.out, ["j", "lambda", "scheme_value"], rows, cfg)
    return 0


def _format_bound(v: float | None) -> str:
    if v is None:
        return "infeasible"
    if v == float("inf"):
        return "unbounded"
    return repr(float(v))


def cmd_bounds(args) -> int:
    names = args.scheme if args.scheme else [s.name for s in default_schemes()]
    if not names:
        raise ConfigError("scheme list must be nonempty")
    sigmas = args.sigma if args.sigma is not None else [0.0]
    schemes = [_make_scheme(n) for n in names]
    cfg = fileio.config_hash({"schemes": [s.name for s in schemes], "sigmas": sigmas})
    rows = []
    for scheme in schemes:
        for sigma in sigmas:
            row = conditions.bounds_row(scheme, sigma)
            rows.append(
                (
                    row.scheme,
                    row.sigma,
                    _format_bound(row.nonneg),
                    _format_bound(row.balanced),
                    _format_bound(row.stable),
                )
            )
    fileio.write_csv(
        args.out, ["scheme", "sigma", "nn_bound", "balanced_bound", "stable_bound"], rows, cfg
    )
    return 0


def cmd_simulate(args) -> int:
    scheme = _make_scheme(args.scheme)
    problem = _make_problem(args)
    if args.steps < 0:
        raise ConfigError("--steps must be nonnegative")
    traj = simulate.run(problem, scheme, args.steps)
    steady = _steady_profile(problem, scheme)
    report = diagnostics.oscillation_score(traj, steady)
    cfg = fileio.config_hash(_config_dict(args))

    wanted = args.format
    if wanted in ("csv", "all"):
        columns = ["step"] + [f"u{i:04d}" for i in range(1, problem.disc.k + 1)]
        rows = [(n, *traj.states[n]) for n in range(traj.states.shape[0])]
        fileio.write_csv(f"{args.out}.csv", columns, rows, cfg)
        fileio.write_csv(
            f"{args.out}.profile.csv",
            ["i", "oscillation_energy"],
            [(i + 1, report.spatial_profile[i]) for i in range(problem.disc.k)],
            cfg,
        )
    if wanted in ("pgm", "all"):
        fileio.write_pgm(f"{args.out}.pgm", traj.states, cfg)
    if wanted in ("json", "all"):
        payload = report.to_dict()
        payload["config"] = cfg
        payload["settings"] = _config_dict(args)
        payload["n_states"] = int(traj.states.shape[0])
        fileio.write_json(f"{args.out}.report.json", payload)
    return 0


def cmd_nonlinear_eigs(args) -> int:
    scheme = _make_scheme(args.scheme)
    kind = Kind(args.kind)
    if kind.linear:
        raise ConfigError("nonlinear-eigs needs a nonlinear kind")
    if args.dt is None and args.r is None:
        args.r = 1.0
    problem = _make_problem(args)
    profile = _steady_profile(problem, scheme)
    decomp, scheme_vals = nonlinear.frozen_jacobian_eigen(problem, scheme, profile)
    cfg = fileio.config_hash(_config_dict(args))

    k = problem.disc.k
    fileio.write_csv(
        f"{args.out}.eigs.csv",
        ["j", "operator_eigenvalue", "scheme_value"],
        [(m + 1, decomp.values[m], scheme_vals[m]) for m in range(k)],
        cfg,
    )
    fileio.write_csv(
        f"{args.out}.vectors.csv",
        [f"v{m + 1:03d}" for m in range(k)],
        [tuple(decomp.vectors[i, :]) for i in range(k)],
        cfg,
    )
    fileio.write_csv(
        f"{args.out}.localization.csv",
        ["j", "eigenvalue", "participation_ratio", "center_of_mass"],
        [
            (rec.index, rec.eigenvalue, rec.participation_ratio, rec.center_of_mass)
            for rec in nonlinear.localization_metrics(decomp)
        ],
        cfg,
    )
    fileio.write_csv(
        f"{args.out}.pairing.csv",
        ["j", "partner", "magnitude_mismatch"],
        [
            (rec.j, rec.partner, rec.magnitude_mismatch)
            for rec in nonlinear.pairing_symmetry(decomp)
        ],
        cfg,
    )
    fileio.write_json(
        f"{args.out}.summary.json",
        {
            "config": cfg,
            "settings": _config_dict(args),
            "residual_norm": decomp.residual_norm,
            "orthogonality_defect": decomp.orthogonality_defect(),
            "k": k,
        },
    )
    return 0


def cmd_check(args) -> int:
    scheme = _make_scheme(args.scheme)
    problem = _make_problem(args)
    tol = conditions.DEFAULT_TOL
    env_tol = os.environ.get("OSCILLAB_TOL")
    if env_tol:
        try:
            tol = float(env_tol)
        except ValueError:
            raise ConfigError(f"bad OSCILLAB_TOL value {env_tol!r}") from None

    if problem.kind.linear:
        reference = simulate.steady_state(problem, scheme)
        disc = problem.disc
    else:
        # Nonlinear kinds are checked through their linearization about the
        # canonical equilibrium; deviations are measured from that constant.
        lin = nonlinear.linearize(problem, nonlinear.default_equilibrium(problem.kind))
        reference = np.full(problem.disc.k, lin.about)
        disc = replace(problem.disc, rho=lin.effective_rho)
    coeffs = modal_coefficients(problem.initial, reference)
    report = conditions.classify(scheme, disc, coeffs, tol=tol)
    payload = report.to_dict()
    payload["config"] = fileio.config_hash(_config_dict(args))
    sys.stdout.write(fileio.dumps_json(payload))
    return _CLASS_EXIT[report.classification]


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "bounds": cmd_bounds,
    "simulate": cmd_simulate,
    "nonlinear-eigs": cmd_nonlinear_eigs,
    "check": cmd_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"oscillab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, ArithmeticError, simulate.ConvergenceError) as exc:
        print(f"oscillab: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
