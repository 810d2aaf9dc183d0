"""Command line interface.

    speckit solve --builtin dahlquist --lambda -3 --scheme se5 --h 0.1
    speckit sweep --builtin circle --T 0.9 --schemes ee,cn,se5 --k-min 3 \
        --k-max 17 --p inf --format markdown
    speckit probe fermat --expr "x^2" --x 0
    speckit table --input sweep.csv
"""

import argparse
import contextlib
import io
import logging
import math
import os
import sys
from typing import Callable, Dict, Iterator, List, Optional, TextIO

from . import __version__
from .base import SchemeConfig, SchemeId, SolverError, U1Policy
from .convergence import (ErrorReport, convergence_sweep, format_float,
                          parse_norm, read_reports_csv, render_markdown,
                          write_reports_csv)
from .expression import Expression, ExpressionError
from .plotting import plot_errors, plot_trajectory
from .probes import (BracketNotFoundError, lipschitz_from_bounded_sd,
                     quasi_fermat_probe, quasi_mvt_bracket,
                     quasi_rolle_bracket)
from .problems import (BUILTINS, IvpProblem, ProblemConfigError,
                       load_problem, load_problem_file)
from .schemes import solve_ivp
from .specular import NoLimitError, SpecularNonExistenceError


EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_BRACKET = 4


def _kink(x: float) -> float:
    return -x if x < 0 else 2.0 * x


PROBE_FUNCTIONS: Dict[str, Callable[[float], float]] = {
    "kink": _kink,
    "abs": abs,
    "square": lambda x: x * x,
}


class ConfigError(Exception):
    """Invalid invocation detected after argument parsing."""


def _scheme(name: str) -> SchemeId:
    try:
        return SchemeId.parse(name)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _scheme_list(text: str) -> List[SchemeId]:
    return [_scheme(name) for name in text.split(",") if name.strip()]


def _norm(text: str) -> float:
    try:
        return parse_norm(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _add_problem_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("problem")
    source = group.add_mutually_exclusive_group(required=True)
    source.add_argument("--builtin", choices=sorted(BUILTINS),
                        help="Built-in problem.")
    source.add_argument("--config", help="JSON problem file.")
    group.add_argument("--lambda", dest="lam", type=float,
                       help="Dahlquist coefficient.")
    group.add_argument("--u0", type=float, help="Initial value.")
    group.add_argument("--t0", type=float, help="Initial time.")
    group.add_argument("--T", type=float, help="End time.")
    group.add_argument("--c", type=float, help="Nonsmooth problem constant.")


def _add_solver_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--eta", type=float, default=1e-6,
                        help="Fixed-point tolerance.")
    parser.add_argument("--max-iters", type=int, default=100,
                        help="Fixed-point iteration limit.")
    parser.add_argument("--u1-policy", choices=[p.value for p in U1Policy],
                        help="Start-up of two-step schemes.")


def _add_output_args(parser: argparse.ArgumentParser, formats: List[str]
                     ) -> None:
    parser.add_argument("--output", "-o", default="-",
                        help="Output file, '-' for stdout.")
    parser.add_argument("--format", choices=formats, default=formats[0],
                        help="Output format.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speckit",
        description="Specular derivatives and specular Euler schemes.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="Log debug messages.")
    parser.add_argument("-q", "--quiet", action="store_true",
                        help="Log errors only.")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="Solve one problem.")
    _add_problem_args(solve)
    solve.add_argument("--scheme", type=_scheme, required=True,
                       help="Scheme: " + ", ".join(s.value for s in SchemeId))
    solve.add_argument("--h", type=float, required=True, help="Step size.")
    _add_solver_args(solve)
    _add_output_args(solve, ["csv", "svg"])

    sweep = sub.add_parser("sweep", help="Convergence sweep over h = 2^-k.")
    _add_problem_args(sweep)
    sweep.add_argument("--schemes", type=_scheme_list, required=True,
                       help="Comma separated schemes.")
    sweep.add_argument("--k-min", type=int, required=True)
    sweep.add_argument("--k-max", type=int, required=True)
    sweep.add_argument("--p", type=_norm, default=math.inf,
                       help="Norm: 1, 2 or inf.")
    _add_solver_args(sweep)
    _add_output_args(sweep, ["csv", "markdown", "svg"])

    probe = sub.add_parser("probe", help="Theorem probes.")
    probe.add_argument("kind", choices=["fermat", "mvt", "rolle",
                                        "lipschitz"])
    target = probe.add_mutually_exclusive_group(required=True)
    target.add_argument("--expr", help="Expression in x.")
    target.add_argument("--builtin", choices=sorted(PROBE_FUNCTIONS))
    probe.add_argument("--x", type=float, default=0.0,
                       help="Claimed extremum for fermat.")
    probe.add_argument("--a", type=float, default=0.0)
    probe.add_argument("--b", type=float, default=1.0)
    probe.add_argument("--grid-n", type=int, default=1024)
    probe.add_argument("--tol", type=float, default=1e-6)
    probe.add_argument("--M", type=float, default=1.0,
                       help="Claimed bound for lipschitz.")
    probe.add_argument("--samples", type=int, default=200)
    probe.add_argument("--seed", type=int, default=0)

    table = sub.add_parser("table", help="Render sweep CSV as markdown.")
    table.add_argument("--input", "-i", default="-",
                       help="Sweep CSV, '-' for stdin.")
    table.add_argument("--output", "-o", default="-")

    return parser


def _problem(args: argparse.Namespace) -> IvpProblem:
    params = {"lambda": args.lam, "u0": args.u0, "t0": args.t0, "T": args.T,
              "c": args.c}
    params = {k: v for k, v in params.items() if v is not None}
    if args.config is not None:
        if params:
            raise ConfigError("Parameters cannot be combined with --config: "
                              f"{sorted(params)}")
        try:
            return load_problem_file(args.config)
        except OSError as e:
            raise ConfigError(f"Cannot read {args.config}: {e}") from e
    return load_problem({"builtin": args.builtin, **params})


def _workers() -> int:
    value = os.environ.get("SPECKIT_THREADS")
    if not value:
        return os.cpu_count() or 1
    try:
        workers = int(value)
    except ValueError:
        raise ConfigError(f"SPECKIT_THREADS must be an integer, but given "
                          f"{value!r}") from None
    if workers < 1:
        raise ConfigError(f"SPECKIT_THREADS must be positive, but given "
                          f"{workers}")
    return workers


@contextlib.contextmanager
def _open_output(path: str) -> Iterator[TextIO]:
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as f:
            yield f


def _write(path: str, writer: Callable[[TextIO], None]) -> None:
    # Render fully before touching the file so failures leave no partial
    # output.
    buffer = io.StringIO()
    writer(buffer)
    with _open_output(path) as f:
        f.write(buffer.getvalue())


def cmd_solve(args: argparse.Namespace) -> int:
    problem = _problem(args)
    config = SchemeConfig(args.scheme, args.h, args.eta, args.max_iters,
                          U1Policy(args.u1_policy) if args.u1_policy else None)
    traj = solve_ivp(problem, config)

    def write_csv(f: TextIO) -> None:
        f.write("t,u,exact,error,fp_iters\n")
        for t, u, iters in zip(traj.times, traj.values, traj.fp_iterations):
            exact = error = ""
            if problem.exact is not None:
                u_exact = problem.exact(t)
                exact, error = format_float(u_exact), format_float(u_exact - u)
            f.write(f"{format_float(t)},{format_float(u)},{exact},{error},"
                    f"{iters}\n")

    if args.format == "svg":
        _write(args.output, lambda f: plot_trajectory(
            traj, f, problem.exact, str(args.scheme),
            f"{problem.name}, {args.scheme}, h = {args.h}"))
    else:
        _write(args.output, write_csv)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.k_min > args.k_max:
        raise ConfigError(f"--k-min {args.k_min} exceeds --k-max "
                          f"{args.k_max}")
    if args.k_min < 0:
        raise ConfigError(f"--k-min must be non-negative, but given "
                          f"{args.k_min}")
    problem = _problem(args)
    if problem.exact is None:
        raise ConfigError(f"Sweep needs an exact solution, but problem "
                          f"{problem.name} has none")

    workers = _workers()
    ks = range(args.k_min, args.k_max + 1)
    reports: List[ErrorReport] = []
    for scheme in args.schemes:
        base = SchemeConfig(
            scheme, 1.0, args.eta, args.max_iters,
            U1Policy(args.u1_policy) if args.u1_policy else None)
        reports += convergence_sweep(problem, scheme, ks, args.p, base,
                                     workers)

    if args.format == "markdown":
        _write(args.output, lambda f: f.write(render_markdown(reports)))
    elif args.format == "svg":
        _write(args.output, lambda f: plot_errors(reports, f))
    else:
        _write(args.output, lambda f: write_reports_csv(reports, f))
    return EXIT_OK


def cmd_probe(args: argparse.Namespace) -> int:
    if args.expr is not None:
        f = Expression(args.expr, ("x",))
    else:
        f = PROBE_FUNCTIONS[args.builtin]

    fields: Dict[str, object] = {"probe": args.kind}
    if args.kind == "fermat":
        verdict = quasi_fermat_probe(f, args.x, tol=args.tol)
        fields.update(x=args.x, value=f"{verdict.value:.12g}", bound=1,
                      status="pass" if verdict.passed else "fail")
    elif args.kind in ("mvt", "rolle"):
        probe = quasi_mvt_bracket if args.kind == "mvt" else \
            quasi_rolle_bracket
        bracket = probe(f, args.a, args.b, args.grid_n, tol=args.tol)
        fields.update(target=f"{bracket.target:.12g}",
                      c1=f"{bracket.c1:.12g}",
                      lower=f"{bracket.lower_value:.12g}",
                      c2=f"{bracket.c2:.12g}",
                      upper=f"{bracket.upper_value:.12g}", status="found")
    else:
        verdict = lipschitz_from_bounded_sd(f, args.a, args.b, args.M,
                                            args.samples, seed=args.seed)
        fields.update(M=args.M, worst_ratio=f"{verdict.worst_ratio:.12g}",
                      max_derivative=f"{verdict.max_derivative:.12g}",
                      status="pass" if verdict.passed else "fail")

    print(" ".join(f"{k}={v}" for k, v in fields.items()))
    return EXIT_OK


def cmd_table(args: argparse.Namespace) -> int:
    try:
        if args.input == "-":
            reports = read_reports_csv(sys.stdin)
        else:
            with open(args.input, newline="") as f:
                reports = read_reports_csv(f)
    except OSError as e:
        raise ConfigError(f"Cannot read {args.input}: {e}") from e
    except (KeyError, ValueError) as e:
        raise ConfigError(f"Invalid sweep CSV {args.input}: {e}") from e

    _write(args.output, lambda f: f.write(render_markdown(reports)))
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "probe": cmd_probe,
    "table": cmd_table,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Runs the command line and returns the exit code.

    Exit codes are 0 on success, 2 on usage or configuration errors, 3 on
    solver failures and 4 when a probe finds no bracket.
    """

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_CONFIG

    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.ERROR
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s: %(message)s", force=True)
    logger = logging.getLogger()
    logger.info(f"speckit {__version__}")

    try:
        return COMMANDS[args.command](args)
    except BracketNotFoundError as e:
        print(f"probe={args.kind} status=not_found", file=sys.stdout)
        logger.error(str(e))
        return EXIT_BRACKET
    except (SolverError, NoLimitError, SpecularNonExistenceError) as e:
        logger.error(str(e))
        return EXIT_SOLVER
    except (ConfigError, ProblemConfigError, ExpressionError,
            ValueError) as e:
        logger.error(str(e))
        return EXIT_CONFIG
