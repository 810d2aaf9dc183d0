"""Base class for one-step and two-step time integrators."""

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import torch
from torch import Tensor

from .fixed_point import fixed_point_solve
from .problems import IvpProblem


class SchemeId(enum.Enum):
    EE = "ee"
    IE = "ie"
    CN = "cn"
    ST = "st"
    SE1 = "se1"
    SE2 = "se2"
    SE3 = "se3"
    SE4 = "se4"
    SE5 = "se5"
    SE6 = "se6"
    SE_EE = "se_ee"
    SE_IE = "se_ie"

    @classmethod
    def parse(cls, name: str) -> "SchemeId":
        """Parses a case-insensitive scheme name such as `"SE5"`."""

        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(s.value for s in cls)
            raise ValueError(f"Unknown scheme {name!r}; valid are {valid}"
                             ) from None

    def __str__(self) -> str:
        return self.name


class U1Policy(enum.Enum):
    EXACT = "exact"
    BOOTSTRAP_EE = "bootstrap_ee"
    BOOTSTRAP_CN = "bootstrap_cn"


class SolverError(RuntimeError):
    """Integration failed at a step.

    Args:
        msg (str): Message.
        step (int, optional): Index `n + 1` of the node being computed.
        scheme (SchemeId, optional): Scheme.
        N (int, optional): Steps per unit time of the sweep, if any.
    """

    def __init__(self, msg: str, step: Optional[int] = None,
                 scheme: Optional[SchemeId] = None, N: Optional[int] = None
                 ) -> None:
        super().__init__(msg)
        self.step = step
        self.scheme = scheme
        self.N = N


@dataclass(frozen=True)
class SchemeConfig:
    """Integration settings.

    Attributes:
        scheme (SchemeId): Scheme.
        h (float): Step size.
        eta (float): Fixed-point tolerance on successive values of `u`.
        max_iters (int): Fixed-point iteration limit per step.
        u1_policy (U1Policy or None): Start-up of two-step schemes; `None`
            uses the exact solution when known and an explicit Euler step
            otherwise.
    """

    scheme: SchemeId
    h: float
    eta: float = 1e-6
    max_iters: int = 100
    u1_policy: Optional[U1Policy] = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValueError(f"Step size must be positive, but given "
                             f"h={self.h}")
        if not self.eta > 0:
            raise ValueError(f"Tolerance must be positive, but given "
                             f"eta={self.eta}")
        if self.max_iters < 1:
            raise ValueError("Iteration limit must be positive, but given "
                             f"max_iters={self.max_iters}")


@dataclass
class Trajectory:
    """Nodes of a numerical solution.

    Attributes:
        t0 (float): Initial time.
        h (float): Step size; `times[n] == t0 + n * h`.
        times (list of float): Node times.
        values (list of float): Node values.
        fp_iterations (list of int): Fixed-point evaluations per node, 0 for
            the initial node and explicit steps.
        unconverged_steps (list of int): Nodes whose fixed-point iteration
            hit the limit.
    """

    t0: float
    h: float
    times: List[float] = field(default_factory=list)
    values: List[float] = field(default_factory=list)
    fp_iterations: List[int] = field(default_factory=list)
    unconverged_steps: List[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def nodes(self) -> List[Tuple[float, float]]:
        return list(zip(self.times, self.values))

    def as_tensor(self) -> Tuple[Tensor, Tensor]:
        """Returns times and values as float64 tensors of size `(n,)`."""

        return (torch.tensor(self.times, dtype=torch.float64),
                torch.tensor(self.values, dtype=torch.float64))


class StepResult(NamedTuple):
    value: float
    iterations: int
    converged: bool


History = Sequence[Tuple[float, float]]


def number_of_steps(t0: float, T: float, h: float) -> int:
    """Steps of size `h` from `t0` that stay within `T`.

    Raises:
        ValueError: If not even one step fits.
    """

    steps = math.floor((T - t0) / h + 1e-9)
    if steps < 1:
        raise ValueError(f"Step size h={h} exceeds the interval "
                         f"[{t0}, {T}]")
    return steps


class BaseScheme:
    """Base class for schemes.

    Subclasses implement `advance`, which maps the latest nodes to the next
    one. Two-step schemes set `two_step` and receive the last two nodes.

    Args:
        config (SchemeConfig): Integration settings.
    """

    two_step = False

    def __init__(self, config: SchemeConfig) -> None:
        self.config = config
        self.logger = logging.getLogger()

    def advance(self, problem: IvpProblem, history: History) -> StepResult:
        """Computes the next node value.

        Args:
            problem (IvpProblem): Problem.
            history (sequence of (float, float)): Nodes up to the current
                one, last entry current.

        Returns:
            result (StepResult): Next value with fixed-point statistics.
        """

        raise NotImplementedError

    def next_time(self, problem: IvpProblem, t: float) -> float:
        """Time of the node after `t`.

        On the grid `t0 + n h` this is `t0 + (n + 1) h`, the same expression
        the trajectory records; off the grid it is `t + h`.
        """

        h = self.config.h
        n = round((t - problem.t0) / h)
        if problem.t0 + n * h == t:
            return problem.t0 + (n + 1) * h
        return t + h

    def implicit(self, slope_map: Callable[[float], float], guess: float,
                 u: float) -> StepResult:
        """Solves for the slope `s` of `u_next = u + h s` by iterating
        `slope_map`.

        Iterating on the slope keeps `u + h s` the same floating-point
        expression as in an explicit step; the tolerance on `u` becomes
        `eta / h` on `s`.
        """

        h = self.config.h
        s, iters, converged = fixed_point_solve(
            slope_map, guess, self.config.eta / h, self.config.max_iters)
        return StepResult(u + h * s, iters, converged)

    def first_step(self, problem: IvpProblem) -> StepResult:
        """Produces the second node of a two-step scheme."""

        from .schemes import make_scheme

        policy = self.config.u1_policy
        if policy is None:
            policy = (U1Policy.EXACT if problem.exact is not None
                      else U1Policy.BOOTSTRAP_EE)

        if policy is U1Policy.EXACT:
            if problem.exact is None:
                raise ValueError("Exact start-up requires an exact solution")
            return StepResult(problem.exact(problem.t0 + self.config.h), 0,
                              True)

        scheme = (SchemeId.EE if policy is U1Policy.BOOTSTRAP_EE
                  else SchemeId.CN)
        bootstrap = make_scheme(SchemeConfig(
            scheme, self.config.h, self.config.eta, self.config.max_iters))
        return bootstrap.advance(problem, [(problem.t0, problem.u0)])

    def solve(self, problem: IvpProblem) -> Trajectory:
        """Integrates `problem` from `t0` while nodes stay within `T`.

        Args:
            problem (IvpProblem): Problem.

        Returns:
            trajectory (Trajectory): Numerical solution.

        Raises:
            SolverError: If a step fails.
        """

        h = self.config.h
        t0 = problem.t0
        steps = number_of_steps(t0, problem.T, h)

        traj = Trajectory(t0, h, [t0], [problem.u0], [0])
        for n in range(steps):
            try:
                if self.two_step and n == 0:
                    result = self.first_step(problem)
                else:
                    history = list(zip(traj.times[-2:], traj.values[-2:]))
                    result = self.advance(problem, history)
            except (ArithmeticError, ValueError) as e:
                raise SolverError(
                    f"{self.config.scheme} failed at step {n + 1} "
                    f"(t={t0 + (n + 1) * h}): {e}", n + 1,
                    self.config.scheme) from e

            if not math.isfinite(result.value):
                raise SolverError(
                    f"{self.config.scheme} produced {result.value} at step "
                    f"{n + 1}", n + 1, self.config.scheme)
            if not result.converged:
                self.logger.warning(
                    f"{self.config.scheme}: fixed point not converged at step "
                    f"{n + 1} after {result.iterations} iterations")
                traj.unconverged_steps.append(n + 1)

            traj.times.append(t0 + (n + 1) * h)
            traj.values.append(result.value)
            traj.fp_iterations.append(result.iterations)

        return traj
