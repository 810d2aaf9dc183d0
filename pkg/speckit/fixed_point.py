"""Fixed-point iteration."""

import math
from typing import Callable, NamedTuple


class FixedPointDivergenceError(ArithmeticError):
    """Iterate became NaN or infinite."""


class FixedPointResult(NamedTuple):
    value: float
    iterations: int
    converged: bool


def fixed_point_solve(g: Callable[[float], float], guess: float, eta: float,
                      max_iters: int) -> FixedPointResult:
    """Iterates `x <- g(x)` until successive iterates differ by less than
    `eta`.

    Args:
        g (callable): Map to iterate.
        guess (float): Initial iterate.
        eta (float): Positive tolerance.
        max_iters (int): Maximum number of evaluations of `g`.

    Returns:
        result (FixedPointResult): Last iterate, number of evaluations of `g`
            and whether the tolerance was met. A non-converged result is not
            an error.

    Raises:
        ValueError: If `eta` or `max_iters` is not positive.
        FixedPointDivergenceError: If an iterate is not finite.
    """

    if not eta > 0:
        raise ValueError(f"Tolerance must be positive, but given eta={eta}")
    if max_iters < 1:
        raise ValueError("Iteration limit must be positive, but given "
                         f"max_iters={max_iters}")

    x = guess
    for k in range(1, max_iters + 1):
        x_new = g(x)
        if not math.isfinite(x_new):
            raise FixedPointDivergenceError(
                f"Iterate {k} is {x_new} (previous {x})")
        if abs(x_new - x) < eta:
            return FixedPointResult(x_new, k, True)
        x = x_new

    return FixedPointResult(x, max_iters, False)
