"""Specular derivatives.

A specular derivative combines the right- and left-hand derivatives of a
function at a point through the half-angle of their inclinations:

    f^s(x) = tan((arctan f'_+(x) + arctan f'_-(x)) / 2)

The two-argument form of this combination is `eval_A`; `eval_B` is its scaled
variant. Everything here works on Python floats; batched tensor kernels live
in `speckit.utils`.
"""

import enum
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional

from .scheduler import DiffSchedule


class NoLimitError(ValueError):
    """One-sided quotients neither converge nor diverge within a schedule.

    Args:
        msg (str): Message.
        quotients (list of float, optional): Raw quotients of every level.
    """

    def __init__(self, msg: str, quotients: Optional[List[float]] = None
                 ) -> None:
        super().__init__(msg)
        self.quotients = quotients or []


class EvaluationError(ValueError):
    """Function under differentiation returned NaN or failed."""


class SpecularNonExistenceError(ValueError):
    """Specular derivative does not exist (both one-sided limits equal)."""


class Tag(enum.Enum):
    FINITE = "finite"
    POS_INF = "+inf"
    NEG_INF = "-inf"


@dataclass(frozen=True)
class ExtendedReal:
    """Element of the extended real line.

    Attributes:
        tag (Tag): Finite or signed infinity.
        value (float): Finite value, or `math.inf` with the sign of the tag.
    """

    tag: Tag
    value: float

    @classmethod
    def finite(cls, value: float) -> "ExtendedReal":
        if not math.isfinite(value):
            raise ValueError(f"Finite value expected, but given {value}")
        return cls(Tag.FINITE, float(value))

    @classmethod
    def from_float(cls, value: float) -> "ExtendedReal":
        if math.isnan(value):
            raise ValueError("NaN is not an extended real")
        if value == math.inf:
            return POS_INF
        if value == -math.inf:
            return NEG_INF
        return cls(Tag.FINITE, float(value))

    @property
    def is_finite(self) -> bool:
        return self.tag is Tag.FINITE

    @property
    def sign(self) -> int:
        if self.tag is Tag.POS_INF:
            return 1
        if self.tag is Tag.NEG_INF:
            return -1
        return (self.value > 0) - (self.value < 0)

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        return self.tag.value if not self.is_finite else repr(self.value)


POS_INF = ExtendedReal(Tag.POS_INF, math.inf)
NEG_INF = ExtendedReal(Tag.NEG_INF, -math.inf)


class SpecularStatus(enum.Enum):
    EXISTS = "exists"
    DOES_NOT_EXIST = "does_not_exist"


@dataclass(frozen=True)
class SpecularResult:
    """Specular derivative together with the one-sided limits it came from.

    Attributes:
        status (SpecularStatus): Whether the derivative exists.
        value (float or None): Derivative, set iff it exists.
        dplus (ExtendedReal): Right-hand derivative.
        dminus (ExtendedReal): Left-hand derivative.
    """

    status: SpecularStatus
    value: Optional[float]
    dplus: ExtendedReal
    dminus: ExtendedReal

    @property
    def exists(self) -> bool:
        return self.status is SpecularStatus.EXISTS

    def unwrap(self) -> float:
        """Returns the value, raising if the derivative does not exist.

        Raises:
            SpecularNonExistenceError: If the derivative does not exist.
        """

        if not self.exists:
            raise SpecularNonExistenceError(
                f"Specular derivative does not exist: one-sided derivatives "
                f"are {self.dplus} and {self.dminus}")
        return self.value


def _check_finite(*args: float) -> None:
    for x in args:
        if not math.isfinite(x):
            raise ValueError(f"Finite arguments expected, but given {args}")


def _combine(a: float, b: float, c: float) -> float:
    """Cancellation-free `((a b - c^2) + sqrt((a^2 + c^2)(b^2 + c^2)))
    / (c (a + b))` for `a >= b`."""

    if a == b:
        return a / c

    s = a + b
    if s == 0:
        return 0.0

    # B is homogeneous of degree 0; scale so the products cannot overflow.
    m = max(abs(a), abs(b), c)
    x, y, z = a / m, b / m, c / m
    rx = math.hypot(x, z)
    ry = math.hypot(y, z)
    if (a >= 0) == (b >= 0) or a == 0 or b == 0:
        value = (x * ry + y * rx) / (rx + ry) * (m / c)
    else:
        # Opposite signs: rationalise so that a + b is the only small factor.
        value = (s / m / (rx + ry)) * ((x - y) / (x * ry - y * rx)) * z

    # Rounding must not leave the interval [b, a].
    return min(max(value, b / c), a / c)


def eval_A(alpha: float, beta: float) -> float:
    """Specular combination of two slopes.

    `A(alpha, beta) = tan((arctan alpha + arctan beta) / 2)`, evaluated without
    trigonometry and without cancellation. The result is exactly symmetric and
    antisymmetric, lies between its arguments, and `A(x, x) == x`.

    Args:
        alpha (float): First slope.
        beta (float): Second slope.

    Returns:
        value (float): Combined slope.

    Raises:
        ValueError: If an argument is not finite.
    """

    _check_finite(alpha, beta)
    hi, lo = (alpha, beta) if alpha >= beta else (beta, alpha)
    return _combine(hi, lo, 1.0)


def eval_B(a: float, b: float, c: float) -> float:
    """Scaled specular combination.

    `B(a, b, c) = A(a / c, b / c)` mathematically; computed directly from `a`,
    `b` and `c` so no quotient is rounded first.

    Args:
        a (float): First numerator.
        b (float): Second numerator.
        c (float): Positive common denominator.

    Returns:
        value (float): Combined value.

    Raises:
        ValueError: If `c <= 0` or an argument is not finite.
    """

    _check_finite(a, b, c)
    if not c > 0:
        raise ValueError(f"Scale must be positive, but given c={c}")
    hi, lo = (a, b) if a >= b else (b, a)
    return _combine(hi, lo, c)


def eval_B_trig(a: float, b: float, c: float) -> float:
    """Trigonometric form of `eval_B`, used as an oracle."""

    _check_finite(a, b, c)
    if not c > 0:
        raise ValueError(f"Scale must be positive, but given c={c}")
    return math.tan(0.5 * math.atan2(a, c) + 0.5 * math.atan2(b, c))


def half_angle_shift(x: float, sign: int) -> float:
    """Returns `x + sign * sqrt(1 + x^2)` without cancellation.

    This is the specular combination of a finite slope `x` with a vertical
    one of the given sign.

    Args:
        x (float): Finite slope.
        sign (int): `+1` or `-1`.

    Returns:
        value (float): Shifted value.
    """

    if sign not in (1, -1):
        raise ValueError(f"Sign must be +1 or -1, but given {sign}")
    r = math.hypot(1.0, x)
    if sign > 0:
        return x + r if x >= 0 else 1.0 / (r - x)
    return x - r if x <= 0 else -1.0 / (x + r)


def _result(value: float, dplus: ExtendedReal, dminus: ExtendedReal
            ) -> SpecularResult:
    return SpecularResult(SpecularStatus.EXISTS, value, dplus, dminus)


def specular_from_one_sided(dplus: ExtendedReal, dminus: ExtendedReal
                            ) -> SpecularResult:
    """Specular derivative from one-sided derivatives.

    Args:
        dplus (ExtendedReal): Right-hand derivative.
        dminus (ExtendedReal): Left-hand derivative.

    Returns:
        result (SpecularResult): Derivative; it does not exist iff both
            one-sided derivatives are the same infinity.
    """

    if dplus.is_finite and dminus.is_finite:
        return _result(eval_A(dplus.value, dminus.value), dplus, dminus)
    if dplus.is_finite:
        return _result(half_angle_shift(dplus.value, dminus.sign),
                       dplus, dminus)
    if dminus.is_finite:
        return _result(half_angle_shift(dminus.value, dplus.sign),
                       dplus, dminus)
    if dplus.tag is not dminus.tag:
        return _result(0.0, dplus, dminus)
    return SpecularResult(SpecularStatus.DOES_NOT_EXIST, None, dplus, dminus)


def specular_from_one_sided_trig(dplus: ExtendedReal, dminus: ExtendedReal
                                 ) -> SpecularResult:
    """Trigonometric oracle for `specular_from_one_sided`."""

    if not dplus.is_finite and dplus.tag is dminus.tag:
        return SpecularResult(SpecularStatus.DOES_NOT_EXIST, None, dplus,
                              dminus)
    angle = 0.5 * (math.atan(dplus.value) + math.atan(dminus.value))
    return _result(math.tan(angle), dplus, dminus)


def specular_quotient(f: Callable[[float], float], x: float, h: float
                      ) -> float:
    """Symmetric specular difference quotient at offset `h`.

    Combines the forward and backward quotients of `f` at `x` with `eval_A`;
    tends to `f^s(x)` as `h -> 0+` whenever both one-sided derivatives are
    finite.

    Args:
        f (callable): Function of one variable.
        x (float): Point.
        h (float): Positive offset.

    Returns:
        quotient (float): Combined quotient.
    """

    if not h > 0:
        raise ValueError(f"Offset must be positive, but given h={h}")
    fx = _evaluate(f, x)
    forward = (_evaluate(f, x + h) - fx) / h
    backward = (fx - _evaluate(f, x - h)) / h
    return eval_A(forward, backward)


def _evaluate(f: Callable[[float], float], x: float) -> float:
    try:
        value = float(f(x))
    except (SpecularNonExistenceError, NoLimitError, EvaluationError):
        raise
    except (ArithmeticError, ValueError) as e:
        raise EvaluationError(f"Evaluation failed at x={x}: {e}") from e
    if math.isnan(value):
        raise EvaluationError(f"Function returned NaN at x={x}")
    return value


def _divergence(quotients: List[float], threshold: float) -> int:
    """Sign of a divergence over the last three levels, or 0."""

    if len(quotients) < 3:
        return 0
    q1, q2, q3 = quotients[-3:]
    if threshold < q1 < q2 < q3:
        return 1
    if -threshold > q1 > q2 > q3:
        return -1
    return 0


def estimate_one_sided(f: Callable[[float], float], x: float, side: str,
                       sched: Optional[DiffSchedule] = None) -> ExtendedReal:
    """Estimates a one-sided derivative along a schedule.

    Raw quotients are refined by repeated Richardson extrapolation. The limit
    is accepted once successive extrapolated values agree within the
    schedule's tolerance; it is reported infinite once the raw quotients of
    the last three levels grow monotonically beyond the threshold.

    Args:
        f (callable): Function of one variable.
        x (float): Point.
        side (str): `"right"` or `"left"`.
        sched (DiffSchedule, optional): Offset schedule.

    Returns:
        limit (ExtendedReal): Estimated derivative.

    Raises:
        ValueError: If `side` is unknown.
        EvaluationError: If `f` returns NaN.
        NoLimitError: If no level satisfies either criterion.
    """

    if side not in ("right", "left"):
        raise ValueError(f"Side must be 'right' or 'left', but given {side}")
    if sched is None:
        sched = DiffSchedule()

    fx = _evaluate(f, x)
    quotients = []
    prev_row: List[float] = []
    prev_est = None
    for h in sched:
        if side == "right":
            q = (_evaluate(f, x + h) - fx) / h
        else:
            q = (fx - _evaluate(f, x - h)) / h
        quotients.append(q)

        sign = _divergence(quotients, sched.inf_threshold)
        if sign:
            return POS_INF if sign > 0 else NEG_INF

        # Richardson tableau row: error terms h, h^2, ... removed in turn.
        row = [q]
        for j in range(1, min(len(prev_row), sched.extrapolation_depth) + 1):
            w = sched.shrink ** j
            row.append((row[j - 1] - w * prev_row[j - 1]) / (1 - w))
        est = row[-1]
        prev_row = row

        if not math.isfinite(est):
            continue
        if (prev_est is not None
                and abs(est - prev_est) < sched.conv_tol * max(1.0, abs(est))):
            return ExtendedReal.finite(est)
        prev_est = est

    raise NoLimitError(
        f"No {side}-hand limit at x={x} within {len(sched)} levels; last "
        f"quotients {quotients[-3:]}", quotients)


def specular_derivative(f: Callable[[float], float], x: float,
                        sched: Optional[DiffSchedule] = None
                        ) -> SpecularResult:
    """Numerical specular derivative.

    Args:
        f (callable): Function of one variable.
        x (float): Point.
        sched (DiffSchedule, optional): Offset schedule.

    Returns:
        result (SpecularResult): Derivative and its one-sided limits.

    Raises:
        NoLimitError: If a one-sided limit cannot be classified.
    """

    dplus = estimate_one_sided(f, x, "right", sched)
    dminus = estimate_one_sided(f, x, "left", sched)
    logging.getLogger().debug(
        f"One-sided derivatives at x={x}: {dplus}, {dminus}")
    return specular_from_one_sided(dplus, dminus)


def specular_derivative_k(f: Callable[[float], float], x: float, k: int,
                          sched: Optional[DiffSchedule] = None
                          ) -> SpecularResult:
    """Higher-order specular derivative by recursion.

    The innermost derivative uses `sched`; every outer differentiation uses
    `sched.nested()`.

    Args:
        f (callable): Function of one variable.
        x (float): Point.
        k (int): Order, at least 1.
        sched (DiffSchedule, optional): Offset schedule.

    Returns:
        result (SpecularResult): Derivative of order `k`.

    Raises:
        ValueError: If `k < 1`.
        SpecularNonExistenceError: If an inner derivative does not exist.
    """

    if k < 1:
        raise ValueError(f"Order must be at least 1, but given k={k}")
    if sched is None:
        sched = DiffSchedule()
    if k == 1:
        return specular_derivative(f, x, sched)

    def inner(y: float) -> float:
        return specular_derivative_k(f, y, k - 1, sched).unwrap()

    return specular_derivative(inner, x, sched.nested())
