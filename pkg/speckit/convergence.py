"""Accumulated errors, error ratios and convergence sweeps."""

import csv
import logging
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import (Callable, Dict, Iterable, List, Optional, Sequence, TextIO,
                    Tuple)

import torch
from torch import Tensor

from .base import (SchemeConfig, SchemeId, SolverError, Trajectory,
                   number_of_steps)
from .problems import IvpProblem
from .schemes import solve_ivp
from .utils import a_function, lp_error


CSV_COLUMNS = ("problem", "scheme", "p", "N", "h", "E", "R")


@dataclass(frozen=True)
class ErrorReport:
    """Error of one solve in a sweep.

    Attributes:
        problem (str): Problem name.
        scheme (SchemeId): Scheme.
        p (float): Norm exponent, 1, 2 or `math.inf`.
        N (int): Steps per unit time, `h = 1 / N`.
        h (float): Step size.
        E (float): Accumulated error.
        R (float or None): `log2(E(N / 2) / E(N))`, absent without a
            report at `N / 2`.
    """

    problem: str
    scheme: SchemeId
    p: float
    N: int
    h: float
    E: float
    R: Optional[float] = None


def parse_norm(p: str) -> float:
    """Parses `"1"`, `"2"` or `"inf"`."""

    value = float(p)
    if value not in (1.0, 2.0, math.inf):
        raise ValueError(f"Norm must be 1, 2 or inf, but given {p!r}")
    return value


def format_norm(p: float) -> str:
    return "inf" if p == math.inf else str(int(p))


def format_float(x: Optional[float]) -> str:
    """Scientific notation with 6 significant digits; empty for `None`."""

    return "" if x is None else f"{x:.5e}"


def accumulated_error(traj: Trajectory, exact: Callable[[float], float],
                      p: float) -> float:
    """Accumulated error over every node of `traj`.

    E_p = (h * sum_n |u(t_n) - u_n|^p)^(1/p)
    E_inf = max_n |u(t_n) - u_n|

    Args:
        traj (Trajectory): Numerical solution.
        exact (callable): Exact solution.
        p (float): 1, 2 or `math.inf`.

    Returns:
        error (float): Accumulated error.
    """

    if p not in (1.0, 2.0, math.inf):
        raise ValueError(f"Norm must be 1, 2 or inf, but given p={p}")

    _, values = traj.as_tensor()
    reference = torch.tensor([exact(t) for t in traj.times],
                             dtype=torch.float64)
    return lp_error(reference - values, traj.h, p).item()


def error_ratio(E_half: float, E: float) -> float:
    """Error ratio `log2(E_half / E)`.

    Args:
        E_half (float): Error with half the steps.
        E (float): Error.

    Returns:
        ratio (float): Observed order.

    Raises:
        ValueError: If an error is not positive.
    """

    if not (E_half > 0 and E > 0):
        raise ValueError(f"Ratio undefined for errors E_half={E_half}, E={E}")
    return math.log2(E_half / E)


def convergence_sweep(problem: IvpProblem, scheme: SchemeId,
                      k_range: Iterable[int], p: float,
                      config_base: Optional[SchemeConfig] = None,
                      workers: int = 1) -> List[ErrorReport]:
    """Solves with `h = 2^-k` for every `k` and reports the errors.

    Args:
        problem (IvpProblem): Problem with an exact solution.
        scheme (SchemeId): Scheme.
        k_range (iterable of int): Ascending exponents.
        p (float): Norm exponent, 1, 2 or `math.inf`.
        config_base (SchemeConfig, optional): Settings other than scheme and
            step size.
        workers (int, optional): Parallel solves; results do not depend on
            it.

    Returns:
        reports (list of ErrorReport): One report per `k`, ascending. Ratios
            are chained between consecutive `k` only.

    Raises:
        ValueError: If `problem` has no exact solution or `k_range` is empty
            or not ascending.
        SolverError: If a solve fails, annotated with scheme and `N`.
    """

    ks = list(k_range)
    if not ks:
        raise ValueError("Empty k range")
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError(f"k range must be ascending, but given {ks}")
    if problem.exact is None:
        raise ValueError(f"Problem {problem.name} has no exact solution")
    if config_base is None:
        config_base = SchemeConfig(scheme, 1.0)

    logger = logging.getLogger()

    def run(k: int) -> ErrorReport:
        N = 2 ** k
        h = 1.0 / N
        config = replace(config_base, scheme=scheme, h=h)
        try:
            traj = solve_ivp(problem, config)
        except SolverError as e:
            raise SolverError(f"{e} (N={N})", e.step, scheme, N) from e
        if traj.unconverged_steps:
            logger.warning(f"{scheme}, N={N}: "
                           f"{len(traj.unconverged_steps)} unconverged steps")
        E = accumulated_error(traj, problem.exact, p)
        logger.debug(f"{problem.name} {scheme} N={N}: E={E:.5e}")
        return ErrorReport(problem.name, scheme, p, N, h, E)

    if workers > 1 and len(ks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run, ks))
    else:
        reports = [run(k) for k in ks]

    for i in range(1, len(ks)):
        prev, report = reports[i - 1], reports[i]
        if ks[i] == ks[i - 1] + 1 and prev.E > 0 and report.E > 0:
            reports[i] = replace(report, R=error_ratio(prev.E, report.E))
    return reports


def _tensor(values: Sequence[float]) -> Tensor:
    return torch.tensor(values, dtype=torch.float64)


def local_truncation_error(problem: IvpProblem, h: float,
                           scheme: SchemeId = SchemeId.SE5) -> Tensor:
    """Local truncation errors of a scheme along the exact solution.

    tau_{n+1} = (u(t_{n+1}) - u(t_n)) / h - slope_n

    where `slope_n` is the increment slope of the scheme with every node
    replaced by the exact solution; for SE5 it is `A(F(t_{n+1}, u(t_{n+1})),
    F(t_n, u(t_n)))`.

    Args:
        problem (IvpProblem): Problem with an exact solution.
        h (float): Step size.
        scheme (SchemeId, optional): Scheme.

    Returns:
        tau (torch.Tensor): Errors at the nodes `t0 + h, ...`, float64 of
            size `(n,)`; two-step schemes start one node later.
    """

    if problem.exact is None:
        raise ValueError(f"Problem {problem.name} has no exact solution")

    steps = number_of_steps(problem.t0, problem.T, h)
    times = [problem.t0 + n * h for n in range(steps + 1)]
    exact = [problem.exact(t) for t in times]
    f = _tensor([problem.source(t, u) for t, u in zip(times, exact)])
    u = _tensor(exact)

    S = (u[1:] - u[:-1]) / h
    f_n, f_next = f[:-1], f[1:]

    # Slopes needing a previous node are aligned from n = 1.
    D, f_prev = S[:-1], f[:-2]
    slopes: Dict[SchemeId, Callable[[], Tuple[Tensor, Tensor]]] = {
        SchemeId.EE: lambda: (S, f_n),
        SchemeId.IE: lambda: (S, f_next),
        SchemeId.CN: lambda: (S, 0.5 * (f_n + f_next)),
        SchemeId.ST: lambda: (S[1:], torch.tan(
            2 * torch.atan(f_n[1:]) - torch.atan(D))),
        SchemeId.SE1: lambda: (S[1:], a_function(f_n[1:], f_prev)),
        SchemeId.SE2: lambda: (S[1:], a_function(f_n[1:], D)),
        SchemeId.SE_EE: lambda: (S, a_function(f_n, f_n)),
        SchemeId.SE3: lambda: (S[1:], a_function(S[1:], f_prev)),
        SchemeId.SE4: lambda: (S, a_function(S, f_n)),
        SchemeId.SE5: lambda: (S, a_function(f_next, f_n)),
        SchemeId.SE6: lambda: (S, a_function(f_next, S)),
        SchemeId.SE_IE: lambda: (S, a_function(f_next, f_next)),
    }
    secant, slope = slopes[scheme]()
    return secant - slope


def fit_order(hs: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of `log E` against `log h`."""

    if len(hs) != len(errors) or len(hs) < 2:
        raise ValueError("At least two (h, E) pairs of equal length needed")
    x = _tensor(hs).log()
    y = _tensor(errors).log()
    x = x - x.mean()
    return ((x * (y - y.mean())).sum() / (x * x).sum()).item()


def write_reports_csv(reports: Iterable[ErrorReport], stream: TextIO
                      ) -> None:
    """Writes reports as CSV with columns `problem,scheme,p,N,h,E,R`."""

    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        writer.writerow([r.problem, r.scheme.value, format_norm(r.p), r.N,
                         format_float(r.h), format_float(r.E),
                         format_float(r.R)])


def read_reports_csv(stream: TextIO) -> List[ErrorReport]:
    """Reads reports written by `write_reports_csv`."""

    reader = csv.DictReader(stream)
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"Expected CSV columns {CSV_COLUMNS}, but given "
                         f"{reader.fieldnames}")
    return [ErrorReport(row["problem"], SchemeId.parse(row["scheme"]),
                        parse_norm(row["p"]), int(row["N"]), float(row["h"]),
                        float(row["E"]),
                        float(row["R"]) if row["R"] else None)
            for row in reader]


def render_markdown(reports: Sequence[ErrorReport]) -> str:
    """Renders reports as tables with one `E`, `R` column pair per scheme.

    One table is emitted for every (problem, norm) pair, rows ordered by `N`.
    """

    groups: Dict[Tuple[str, float], List[ErrorReport]] = {}
    for r in reports:
        groups.setdefault((r.problem, r.p), []).append(r)

    blocks = []
    for (problem, p), group in groups.items():
        schemes = list(dict.fromkeys(r.scheme for r in group))
        cells = {(r.N, r.scheme): r for r in group}
        Ns = sorted({r.N for r in group})

        lines = [f"### {problem}, p = {format_norm(p)}", ""]
        header = ["N"] + [f"{s} {c}" for s in schemes for c in ("E", "R")]
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "---|" * len(header))
        for N in Ns:
            row = [str(N)]
            for s in schemes:
                r = cells.get((N, s))
                if r is None:
                    row += ["", ""]
                else:
                    row += [format_float(r.E), format_float(r.R) or "--"]
            lines.append("| " + " | ".join(row) + " |")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


_TITLE = re.compile(r"^### (?P<problem>.+), p = (?P<p>\S+)$")


def parse_markdown(text: str) -> List[ErrorReport]:
    """Parses tables rendered by `render_markdown`; `h` is taken as `1/N`."""

    reports = []
    problem, p, schemes = None, None, []
    for line in text.splitlines():
        line = line.strip()
        title = _TITLE.match(line)
        if title:
            problem, p = title["problem"], parse_norm(title["p"])
            schemes = []
            continue
        if not line.startswith("|") or line.startswith("|---"):
            continue
        cells = [c.strip() for c in line.strip("|").split("|")]
        if cells[0] == "N":
            schemes = [SchemeId.parse(c.split()[0]) for c in cells[1::2]]
            continue
        if problem is None:
            raise ValueError("Table row before a title line")
        N = int(cells[0])
        for s, E, R in zip(schemes, cells[1::2], cells[2::2]):
            if E:
                reports.append(ErrorReport(
                    problem, s, p, N, 1.0 / N, float(E),
                    None if R in ("", "--") else float(R)))
    return reports
