"""Command line front end.

Exit codes: 0 success or verification pass, 1 verification failure,
2 usage, parse, validation or domain error, 3 truncated simulation or profile.
"""

import argparse
import csv
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

from cylint import __version__
from cylint.catalog import (
    SystemInstance,
    ValidationError,
    build_family,
    describe_family,
    list_families,
    load_sample_params,
)
from cylint.config import get_config, load_config, reset_config_cache, set_config
from cylint.dynamics import ConvergenceError, IntegratorConfig, integrate
from cylint.geometry import CylPhase, DomainError
from cylint.odes import InconsistentInitialData, PositivityLoss, ProfileSolution, gamma_slope, solve_gamma, solve_MT
from cylint.specialfn import ellip_K, jacobi_sn_cn_dn
from cylint.utils.functions import FunctionGrammarError
from cylint.utils.paramfile import ParamFileError, read_param_file
from cylint.verify import (
    Grid,
    check_commutation,
    conservation_report,
    determining_residuals,
    gauge_check,
    to_verify_report,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_TRUNCATED = 3

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
INITIAL_KEYS = ("r", "phi", "z", "p_r", "p_phi", "p_z")

USER_ERRORS = (
    ValidationError,
    ParamFileError,
    DomainError,
    FunctionGrammarError,
    InconsistentInitialData,
    PositivityLoss,
    ConvergenceError,
    ValueError,
    OSError,
)


class UsageError(Exception):
    """Exception raised for inconsistent command line arguments."""

    pass


def _grid(text: str) -> tuple[int, int, int]:
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NR,NPHI,NZ, got '{text}'")
    if len(parts) != 3 or min(parts) < 1:
        raise argparse.ArgumentTypeError(f"expected three positive integers, got '{text}'")
    return parts  # type: ignore[return-value]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cylint",
        description="Integrable magnetic systems of cylindrical type: catalog, simulation, verification.",
    )
    parser.add_argument("--version", action="version", version=f"cylint {__version__}")
    parser.add_argument("--config", type=Path, help="Path to a .cylint.toml file")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for INFO, -vv for DEBUG logging")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="List catalog families")

    p = sub.add_parser("describe", help="Show the parameter schema of a family")
    p.add_argument("--family", required=True)

    p = sub.add_parser("simulate", help="Integrate a trajectory and write CSV")
    p.add_argument("--family", required=True)
    p.add_argument("--params", type=Path, help="Parameter file (default: shipped sample)")
    p.add_argument("--initial", type=Path, required=True, help="Initial state file")
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--dt", type=float)
    p.add_argument("--integrator", choices=["rk4", "implicit-midpoint"])
    p.add_argument("--out", type=Path, help="CSV output (default: stdout)")

    p = sub.add_parser("verify", help="Run a verification suite and write a JSON report")
    p.add_argument("kind", choices=["commutation", "residuals", "gauge", "conservation"])
    p.add_argument("--family", required=True)
    p.add_argument("--params", type=Path)
    p.add_argument("--samples", type=int)
    p.add_argument("--grid", type=_grid, help="NR,NPHI,NZ")
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--initial", type=Path)
    p.add_argument("--t-end", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--integrator", choices=["rk4", "implicit-midpoint"])
    p.add_argument("--out", type=Path)

    p = sub.add_parser("special", help="Jacobi elliptic functions and K")
    p.add_argument("function", choices=["sn", "cn", "dn", "K"])
    p.add_argument("--u", type=float)
    p.add_argument("--k", type=float, required=True)

    p = sub.add_parser("profile", help="Solve a profile ODE and write CSV")
    psub = p.add_subparsers(dest="profile", required=True)
    g = psub.add_parser("gamma", help="gamma'' = -(gamma'^2 + 12 gamma^2 - 4 beta1 + 2 f1 gamma)/(2 gamma)")
    g.add_argument("--f1", type=float, required=True)
    g.add_argument("--beta1", type=float, required=True)
    g.add_argument("--beta2", type=float, required=True)
    g.add_argument("--gamma0", type=float, required=True)
    g.add_argument("--dgamma0", type=float, help="Initial slope (default: from --branch)")
    g.add_argument("--branch", type=int, choices=[-1, 1], default=1)
    g.add_argument("--phi-start", type=float, default=0.0)
    g.add_argument("--phi-end", type=float, required=True)
    g.add_argument("--steps", type=int)
    g.add_argument("--strict", action="store_true", help="Fail instead of truncating")
    g.add_argument("--out", type=Path)
    m = psub.add_parser("mt", help="y'' = (3 C y^2 + 2 C1 y + C2)/2")
    for name in ("C", "C1", "C2", "C3", "y0", "dy0"):
        m.add_argument(f"--{name}", type=float, required=True)
    m.add_argument("--start", type=float, default=0.0)
    m.add_argument("--end", type=float, required=True)
    m.add_argument("--steps", type=int)
    m.add_argument("--out", type=Path)
    return parser


def _setup(args: argparse.Namespace) -> None:
    if args.config is not None:
        if not args.config.is_file():
            raise UsageError(f"config file not found: {args.config}")
        reset_config_cache()
        set_config(load_config(args.config))
    level_name = get_config().logging.level
    level = getattr(logging, level_name)
    if args.verbose >= 2:
        level = logging.DEBUG
    elif args.verbose == 1:
        level = min(level, logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def _system(args: argparse.Namespace) -> SystemInstance:
    params = read_param_file(args.params) if args.params else load_sample_params(args.family)
    return build_family(args.family, params)


def _initial(path: Path) -> CylPhase:
    pf = read_param_file(path)
    unknown = sorted(set(pf.keys()) - set(INITIAL_KEYS))
    if unknown:
        raise ParamFileError(f"{path}: unknown key(s) {', '.join(unknown)}")
    values = pf.numbers()
    missing = [k for k in INITIAL_KEYS if k not in values]
    if missing:
        raise ParamFileError(f"{path}: missing key(s) {', '.join(missing)}")
    return CylPhase.from_values(*(values[k] for k in INITIAL_KEYS))


def _open_out(path: Optional[Path]) -> TextIO:
    return open(path, "w", newline="", encoding="utf-8") if path else sys.stdout


def cmd_list(args: argparse.Namespace) -> int:
    print(f"{'id':<4} {'name':<22} {'reductions':<16} field")
    for d in list_families():
        print(f"{d.family_id:<4} {d.name:<22} {','.join(d.reductions) or '-':<16} {d.field}")
    return EXIT_OK


def cmd_describe(args: argparse.Namespace) -> int:
    print(describe_family(args.family).model_dump_json(indent=2))
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    system = _system(args)
    initial = _initial(args.initial)
    cfg = IntegratorConfig.from_settings(scheme=args.integrator, dt=args.dt)
    traj = integrate(system, initial, args.t_end, cfg)
    out = _open_out(args.out)
    try:
        traj.to_csv(out)
    finally:
        if out is not sys.stdout:
            out.close()
    if traj.truncated:
        print(f"Trajectory truncated at t = {traj.times[-1]:.6g}: {traj.truncation_reason}",
              file=sys.stderr)
        return EXIT_TRUNCATED
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    system = _system(args)
    grid = Grid.uniform(args.grid) if args.grid else None
    if args.kind == "commutation":
        report = check_commutation(system, n_samples=args.samples, seed=args.seed, tol=args.tol)
    elif args.kind == "residuals":
        report = determining_residuals(system, grid, tol=args.tol)
    elif args.kind == "gauge":
        report = gauge_check(system, grid, tol=args.tol)
    else:
        if args.initial is None or args.t_end is None:
            raise UsageError("verify conservation needs --initial and --t-end")
        cfg = IntegratorConfig.from_settings(scheme=args.integrator, dt=args.dt)
        traj = integrate(system, _initial(args.initial), args.t_end, cfg)
        report = conservation_report(traj, tol=args.tol)
    text = to_verify_report(report).to_json()
    if args.out:
        args.out.write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_special(args: argparse.Namespace) -> int:
    if args.function == "K":
        value = ellip_K(args.k)
    else:
        if args.u is None:
            raise UsageError(f"special {args.function} needs --u")
        sn, cn, dn = jacobi_sn_cn_dn(args.u, args.k)
        value = {"sn": sn, "cn": cn, "dn": dn}[args.function]
    print(f"{value:.17g}")
    return EXIT_OK


def _write_profile(sol: ProfileSolution, path: Optional[Path]) -> int:
    out = _open_out(path)
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["x", "y", "dy", "ddy", "monitor"])
        for row in zip(sol.x, sol.y, sol.dy, sol.ddy, sol.monitor):
            writer.writerow([f"{float(v):.17g}" for v in row])
    finally:
        if out is not sys.stdout:
            out.close()
    logger.info("profile richardson estimate %.3e, max monitor %.3e",
                sol.richardson_error, sol.max_monitor)
    if sol.truncated:
        print(f"Profile truncated at {sol.span[1]:.6g} ({sol.truncation_reason})", file=sys.stderr)
        return EXIT_TRUNCATED
    return EXIT_OK


def cmd_profile(args: argparse.Namespace) -> int:
    if args.profile == "gamma":
        slope = args.dgamma0
        if slope is None:
            slope = gamma_slope(args.f1, args.beta1, args.beta2, args.gamma0, args.branch)
        sol = solve_gamma(args.f1, args.beta1, args.beta2, args.gamma0, slope,
                          (args.phi_start, args.phi_end), steps=args.steps, strict=args.strict)
    else:
        sol = solve_MT(args.C, args.C1, args.C2, args.C3, args.y0, args.dy0,
                       (args.start, args.end), steps=args.steps)
    return _write_profile(sol, args.out)


COMMANDS = {
    "list": cmd_list,
    "describe": cmd_describe,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "special": cmd_special,
    "profile": cmd_profile,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the `cylint` console script."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        _setup(args)
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except USER_ERRORS as e:
        logger.debug("command failed", exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
