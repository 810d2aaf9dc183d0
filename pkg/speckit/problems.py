"""Initial value problems."""

import json
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Mapping, Optional, Union

from .expression import Expression
from .specular import eval_A


Source = Callable[[float, float], float]


class ProblemConfigError(ValueError):
    """Invalid problem configuration."""


@dataclass(frozen=True)
class IvpProblem:
    """Scalar initial value problem `u' = F(t, u)`, `u(t0) = u0` on
    `[t0, T]`.

    Attributes:
        source (callable): Source function `F(t, u)`.
        t0 (float): Initial time.
        u0 (float): Initial value.
        T (float): End time, greater than `t0`.
        exact (callable or None): Exact solution, when known.
        name (str): Label used in reports.
    """

    source: Source
    t0: float
    u0: float
    T: float
    exact: Optional[Callable[[float], float]] = None
    name: str = "custom"

    def __post_init__(self) -> None:
        if not all(map(math.isfinite, (self.t0, self.u0, self.T))):
            raise ValueError(f"Finite t0, u0 and T expected, but given "
                             f"t0={self.t0}, u0={self.u0}, T={self.T}")
        if not self.T > self.t0:
            raise ValueError(f"End time must exceed initial time, but given "
                             f"t0={self.t0}, T={self.T}")
        if self.exact is not None:
            u = self.exact(self.t0)
            if abs(u - self.u0) > 1e-12 * max(1.0, abs(self.u0)):
                raise ValueError(f"Exact solution gives u(t0)={u}, but "
                                 f"u0={self.u0}")


def dahlquist(lam: float, u0: float = 1.0, t0: float = 0.0, T: float = 2.5
              ) -> IvpProblem:
    """Dahlquist test equation `u' = lam u`."""

    def source(t: float, u: float) -> float:
        return lam * u

    def exact(t: float) -> float:
        return u0 * math.exp(lam * (t - t0))

    return IvpProblem(source, t0, u0, T, exact, name="dahlquist")


def exponential_growth(u0: float = 1.0, t0: float = 0.0, T: float = 1.0
                       ) -> IvpProblem:
    """`u' = u` with solution `u0 exp(t - t0)`."""

    def source(t: float, u: float) -> float:
        return u

    def exact(t: float) -> float:
        return u0 * math.exp(t - t0)

    return IvpProblem(source, t0, u0, T, exact, name="exp")


def _circle_source(t: float, u: float) -> float:
    if abs(t) >= 1:
        raise ValueError(f"Source is singular at |t| >= 1, but given t={t}")
    return -(t * u) / (1.0 - t * t)


def circle_problem(T: float = 0.9) -> IvpProblem:
    """`u' = -t u / (1 - t^2)`, `u(0) = 1` with solution `sqrt(1 - t^2)`.

    Args:
        T (float, optional): End time in `(0, 1)`.
    """

    if not 0 < T < 1:
        raise ValueError(f"End time must be in (0, 1), but given T={T}")

    def exact(t: float) -> float:
        return math.sqrt(1.0 - t * t)

    return IvpProblem(_circle_source, 0.0, 1.0, T, exact, name="circle")


def nonsmooth_forcing(c: float) -> Callable[[float], float]:
    """Forcing term `F_c(t)` whose equation has a kink at `t = 0`.

    `F_c(t) = 3t + 1` for `t > 0` and `0` for `t < 0`. At `t = 0` the value is
    chosen so that `t + c exp(-3t)` (right) and `c exp(-3t)` (left) glue into
    a solution in the specular sense.
    """

    if c == 1.0 / 6.0:
        at_zero = 0.5
    else:
        at_zero = eval_A(1.0 - 3.0 * c, -3.0 * c) + 3.0 * c

    def forcing(t: float) -> float:
        if t > 0:
            return 3.0 * t + 1.0
        if t < 0:
            return 0.0
        return at_zero

    return forcing


def nonsmooth_linear(c: float = 0.3, t0: float = -0.2, T: float = 1.5
                     ) -> IvpProblem:
    """`u' = F_c(t) - 3u` with a solution that is only specularly
    differentiable at `t = 0`."""

    forcing = nonsmooth_forcing(c)

    def source(t: float, u: float) -> float:
        return forcing(t) - 3.0 * u

    def exact(t: float) -> float:
        if t >= 0:
            return t + c * math.exp(-3.0 * t)
        return c * math.exp(-3.0 * t)

    return IvpProblem(source, t0, exact(t0), T, exact, name="nonsmooth")


BUILTINS: Dict[str, Callable[..., IvpProblem]] = {
    "dahlquist": dahlquist,
    "circle": circle_problem,
    "nonsmooth": nonsmooth_linear,
    "exp": exponential_growth,
}

# Config keys of every builtin, mapped to keyword arguments.
_BUILTIN_KEYS = {
    "dahlquist": {"lambda": "lam", "u0": "u0", "t0": "t0", "T": "T"},
    "circle": {"T": "T"},
    "nonsmooth": {"c": "c", "t0": "t0", "T": "T"},
    "exp": {"u0": "u0", "t0": "t0", "T": "T"},
}

_REQUIRED = {"dahlquist": ("lambda",)}


def _number(config: Mapping[str, Any], key: str) -> float:
    value = config[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProblemConfigError(f"Parameter {key!r} must be a number, but "
                                 f"given {value!r}")
    return float(value)


def _check_keys(config: Mapping[str, Any], allowed: set,
                required: tuple) -> None:
    unknown = set(config) - allowed
    if unknown:
        raise ProblemConfigError(f"Unknown parameter(s) {sorted(unknown)}; "
                                 f"allowed are {sorted(allowed)}")
    for key in required:
        if key not in config:
            raise ProblemConfigError(f"Missing required parameter {key!r}")


def _load_builtin(config: Mapping[str, Any]) -> IvpProblem:
    name = config["builtin"]
    if not isinstance(name, str) or name not in BUILTINS:
        raise ProblemConfigError(f"Unknown builtin {name!r}; valid are "
                                 f"{sorted(BUILTINS)}")
    keys = _BUILTIN_KEYS[name]
    _check_keys(config, set(keys) | {"builtin"}, _REQUIRED.get(name, ()))
    kwargs = {keys[k]: _number(config, k) for k in keys if k in config}
    try:
        return BUILTINS[name](**kwargs)
    except ValueError as e:
        raise ProblemConfigError(f"Invalid {name} problem: {e}") from e


def _load_expression(config: Mapping[str, Any]) -> IvpProblem:
    _check_keys(config, {"source", "exact", "t0", "u0", "T", "name"},
                ("source", "u0", "T"))
    source = Expression(str(config["source"]), ("t", "u"))
    exact = None
    if config.get("exact") is not None:
        exact = Expression(str(config["exact"]), ("t",))
    t0 = _number(config, "t0") if "t0" in config else 0.0
    try:
        return IvpProblem(source, t0, _number(config, "u0"),
                          _number(config, "T"), exact,
                          name=str(config.get("name", "custom")))
    except ValueError as e:
        raise ProblemConfigError(f"Invalid problem: {e}") from e


def load_problem(config: Union[str, Mapping[str, Any]]) -> IvpProblem:
    """Builds a problem from a JSON configuration.

    The configuration names either a builtin with its parameters,

        {"builtin": "dahlquist", "lambda": -3, "u0": 1, "T": 2.5}

    or expressions in `t` and `u`,

        {"source": "-(t*u)/(1 - t^2)", "exact": "sqrt(1 - t^2)",
         "t0": 0, "u0": 1, "T": 0.9}

    Args:
        config (str or dict): JSON text or its decoded mapping.

    Returns:
        problem (IvpProblem): Problem.

    Raises:
        ProblemConfigError: If the text is not valid JSON or a parameter is
            missing, unknown or invalid.
        ExpressionError: If an expression does not parse.
    """

    if isinstance(config, str):
        try:
            config = json.loads(config)
        except json.JSONDecodeError as e:
            raise ProblemConfigError(
                f"Invalid JSON: {e.msg} (line {e.lineno}, column {e.colno})"
            ) from e
    if not isinstance(config, Mapping):
        raise ProblemConfigError("Problem config must be a JSON object")

    if "builtin" in config:
        return _load_builtin(config)
    return _load_expression(config)


def load_problem_file(path: str) -> IvpProblem:
    """Reads `path` and builds a problem with `load_problem`."""

    with open(path) as f:
        return load_problem(f.read())
