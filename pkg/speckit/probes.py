"""Numerical probes of the quasi-Fermat, quasi-Rolle and quasi-mean-value
theorems and of the Lipschitz bound for specular derivatives."""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional

import torch

from .scheduler import DiffSchedule
from .specular import NoLimitError, specular_derivative


class BracketNotFoundError(ValueError):
    """No grid points bracket the target slope."""


@dataclass(frozen=True)
class FermatVerdict:
    passed: bool
    value: float


@dataclass(frozen=True)
class Bracket:
    """Points with `f^s(c1) <= target <= f^s(c2)` up to a tolerance.

    Attributes:
        c1 (float): Point with the lower specular derivative.
        c2 (float): Point with the upper specular derivative.
        lower_value (float): `f^s(c1)`.
        upper_value (float): `f^s(c2)`.
        target (float): Slope bracketed.
    """

    c1: float
    c2: float
    lower_value: float
    upper_value: float
    target: float


@dataclass(frozen=True)
class LipschitzVerdict:
    """Outcome of a Lipschitz check.

    Attributes:
        passed (bool): Whether every sampled pair respects the bound.
        worst_ratio (float): Largest sampled difference quotient.
        max_derivative (float): Largest sampled `|f^s|`, for comparison with
            the claimed bound.
    """

    passed: bool
    worst_ratio: float
    max_derivative: float


def _check_interval(a: float, b: float) -> None:
    if not a < b:
        raise ValueError(f"Interval must satisfy a < b, but given a={a}, "
                         f"b={b}")


def interior_grid(a: float, b: float, grid_n: int) -> List[float]:
    """`grid_n` uniform points strictly inside `(a, b)`."""

    _check_interval(a, b)
    if grid_n < 3:
        raise ValueError(f"Grid needs at least 3 points, but given "
                         f"grid_n={grid_n}")
    margin = (b - a) / (grid_n + 1)
    return torch.linspace(a + margin, b - margin, grid_n,
                          dtype=torch.float64).tolist()


def quasi_fermat_probe(f: Callable[[float], float], xstar: float,
                       sched: Optional[DiffSchedule] = None,
                       tol: float = 1e-6) -> FermatVerdict:
    """Checks `|f^s(xstar)| <= 1` at a claimed local extremum.

    Args:
        f (callable): Function.
        xstar (float): Claimed extremum.
        sched (DiffSchedule, optional): Offset schedule.
        tol (float, optional): Slack on the bound.

    Returns:
        verdict (FermatVerdict): Specular derivative and whether it is bounded
            by one.

    Raises:
        SpecularNonExistenceError: If the derivative does not exist.
    """

    value = specular_derivative(f, xstar, sched).unwrap()
    return FermatVerdict(abs(value) <= 1 + tol, value)


def _scan_bracket(f: Callable[[float], float], a: float, b: float,
                  target: float, grid_n: int, sched: Optional[DiffSchedule],
                  tol: float) -> Bracket:

    logger = logging.getLogger()
    lower = upper = None
    for x in interior_grid(a, b, grid_n):
        try:
            value = specular_derivative(f, x, sched)
        except NoLimitError as e:
            logger.debug(f"Skipping grid point {x}: {e}")
            continue
        if not value.exists:
            continue
        v = value.value
        if lower is None and v <= target + tol:
            lower = (x, v)
        if upper is None and v >= target - tol:
            upper = (x, v)
        if lower is not None and upper is not None:
            return Bracket(lower[0], upper[0], lower[1], upper[1], target)

    raise BracketNotFoundError(
        f"No bracket of slope {target} on {grid_n} points in ({a}, {b}); "
        f"lower {'found' if lower else 'missing'}, upper "
        f"{'found' if upper else 'missing'}")


def quasi_mvt_bracket(f: Callable[[float], float], a: float, b: float,
                      grid_n: int = 1024,
                      sched: Optional[DiffSchedule] = None,
                      tol: float = 1e-6) -> Bracket:
    """Brackets the secant slope of `f` over `[a, b]` by specular
    derivatives.

    Scans a uniform interior grid from left to right for the first point with
    `f^s <= k + tol` and the first with `f^s >= k - tol`, where `k = (f(b) -
    f(a)) / (b - a)`. Points where a one-sided limit cannot be classified are
    skipped.

    Args:
        f (callable): Function continuous on `[a, b]`.
        a (float): Left end.
        b (float): Right end.
        grid_n (int, optional): Number of grid points, at least 3.
        sched (DiffSchedule, optional): Offset schedule.
        tol (float, optional): Slack on both comparisons.

    Returns:
        bracket (Bracket): First qualifying points.

    Raises:
        ValueError: If `a >= b` or `grid_n < 3`.
        BracketNotFoundError: If either point is missing on the grid.
    """

    _check_interval(a, b)
    k = (f(b) - f(a)) / (b - a)
    return _scan_bracket(f, a, b, k, grid_n, sched, tol)


def quasi_rolle_bracket(f: Callable[[float], float], a: float, b: float,
                        grid_n: int = 1024,
                        sched: Optional[DiffSchedule] = None,
                        tol: float = 1e-6) -> Bracket:
    """Brackets zero by specular derivatives of `f` vanishing at `a` and
    `b`.

    Raises:
        ValueError: If `|f(a)|` or `|f(b)|` exceeds `tol`.
        BracketNotFoundError: If either point is missing on the grid.
    """

    _check_interval(a, b)
    fa, fb = f(a), f(b)
    if abs(fa) > tol or abs(fb) > tol:
        raise ValueError(f"Endpoints must vanish, but given f(a)={fa}, "
                         f"f(b)={fb}")
    return _scan_bracket(f, a, b, 0.0, grid_n, sched, tol)


def lipschitz_from_bounded_sd(f: Callable[[float], float], a: float,
                              b: float, M: float, samples: int = 200,
                              sched: Optional[DiffSchedule] = None,
                              seed: int = 0) -> LipschitzVerdict:
    """Checks `|f(x1) - f(x2)| <= M |x1 - x2|` on random pairs in `(a, b)`.

    Args:
        f (callable): Function.
        a (float): Left end.
        b (float): Right end.
        M (float): Claimed bound on `|f^s|`.
        samples (int, optional): Number of pairs, at least 2.
        sched (DiffSchedule, optional): Offset schedule used to sample
            `|f^s|` at the first point of every pair.
        seed (int, optional): Seed of the sampler.

    Returns:
        verdict (LipschitzVerdict): Outcome with worst sampled ratio.
    """

    _check_interval(a, b)
    if samples < 2:
        raise ValueError(f"At least 2 samples required, but given "
                         f"samples={samples}")

    generator = torch.Generator().manual_seed(seed)
    points = a + (b - a) * torch.rand(samples, 2, generator=generator,
                                      dtype=torch.float64)

    passed = True
    worst = 0.0
    max_derivative = 0.0
    for x1, x2 in points.tolist():
        if x1 == x2:
            continue
        df = abs(f(x1) - f(x2))
        dx = abs(x1 - x2)
        worst = max(worst, df / dx)
        passed = passed and df <= M * dx * (1 + 1e-9)

        try:
            result = specular_derivative(f, x1, sched)
        except NoLimitError:
            continue
        if result.exists:
            max_derivative = max(max_derivative, abs(result.value))
        else:
            max_derivative = math.inf

    return LipschitzVerdict(passed, worst, max_derivative)
