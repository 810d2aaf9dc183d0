"""Time-stepping schemes.

Every specular Euler scheme advances by

    u_{n+1} = u_n + h A(alpha_n, beta_n)

with the slopes chosen as follows (`F_n = F(t_n, u_n)`, `D_n = (u_n -
u_{n-1}) / h`, `S = (u_{n+1} - u_n) / h`):

    SE1    F_n          F_{n-1}
    SE2    F_n          D_n
    SE_EE  F_n          F_n          (explicit Euler)
    SE3    S            F_{n-1}
    SE4    S            F_n
    SE5    F_{n+1}      F_n
    SE6    F_{n+1}      S
    SE_IE  F_{n+1}      F_{n+1}      (implicit Euler)

Implicit slopes are resolved by fixed-point iteration starting from the
explicit Euler predictor.
"""

import math
from typing import Dict, Sequence, Tuple, Type

from .base import (BaseScheme, History, SchemeConfig, SchemeId, StepResult,
                   Trajectory)
from .problems import IvpProblem
from .specular import eval_A


class TangentSingularityError(ArithmeticError):
    """Angle of the specular trigonometric scheme reached +-pi/2."""


class ExplicitEuler(BaseScheme):

    def advance(self, problem: IvpProblem, history: History) -> StepResult:
        t, u = history[-1]
        return StepResult(u + self.config.h * problem.source(t, u), 0, True)


class ImplicitEuler(BaseScheme):

    def advance(self, problem: IvpProblem, history: History) -> StepResult:
        t, u = history[-1]
        h = self.config.h
        t_next = self.next_time(problem, t)
        slope = problem.source(t, u)
        return self.implicit(lambda s: problem.source(t_next, u + h * s),
                             slope, u)


class CrankNicolson(BaseScheme):

    def advance(self, problem: IvpProblem, history: History) -> StepResult:
        t, u = history[-1]
        h = self.config.h
        t_next = self.next_time(problem, t)
        slope = problem.source(t, u)
        return self.implicit(
            lambda s: 0.5 * (slope + problem.source(t_next, u + h * s)),
            slope, u)


class SpecularTrigonometric(BaseScheme):
    """Two-step scheme `u_{n+1} = u_n + h tan(2 arctan F_n - arctan D_n)`.

    Raises:
        TangentSingularityError: If the angle comes within 1e-9 of +-pi/2.
    """

    two_step = True
    margin = 1e-9

    def advance(self, problem: IvpProblem, history: History) -> StepResult:
        (_, u_prev), (t, u) = _last_two(history, self.config.scheme)
        h = self.config.h
        angle = (2 * math.atan(problem.source(t, u))
                 - math.atan((u - u_prev) / h))
        if abs(angle) >= math.pi / 2 - self.margin:
            raise TangentSingularityError(
                f"Angle {angle} at t={t} is within {self.margin} of pi/2")
        return StepResult(u + h * math.tan(angle), 0, True)


class SpecularEuler(BaseScheme):
    """Specular Euler schemes, one class for every row of the slope table."""

    def __init__(self, config: SchemeConfig) -> None:
        super().__init__(config)
        self.two_step = config.scheme in (SchemeId.SE1, SchemeId.SE2,
                                          SchemeId.SE3)

    def advance(self, problem: IvpProblem, history: History) -> StepResult:
        kind = self.config.scheme
        h = self.config.h
        t, u = history[-1]
        t_next = self.next_time(problem, t)
        f_n = problem.source(t, u)

        if kind is SchemeId.SE_EE:
            return StepResult(u + h * eval_A(f_n, f_n), 0, True)
        if kind is SchemeId.SE4:
            return self.implicit(lambda s: eval_A(s, f_n), f_n, u)
        if kind is SchemeId.SE5:
            return self.implicit(
                lambda s: eval_A(problem.source(t_next, u + h * s), f_n),
                f_n, u)
        if kind is SchemeId.SE6:
            return self.implicit(
                lambda s: eval_A(problem.source(t_next, u + h * s), s),
                f_n, u)
        if kind is SchemeId.SE_IE:
            def slope_map(s: float) -> float:
                f_next = problem.source(t_next, u + h * s)
                return eval_A(f_next, f_next)
            return self.implicit(slope_map, f_n, u)

        (t_prev, u_prev), _ = _last_two(history, kind)
        if kind is SchemeId.SE1:
            f_prev = problem.source(t_prev, u_prev)
            return StepResult(u + h * eval_A(f_n, f_prev), 0, True)
        if kind is SchemeId.SE2:
            return StepResult(u + h * eval_A(f_n, (u - u_prev) / h), 0, True)
        if kind is SchemeId.SE3:
            f_prev = problem.source(t_prev, u_prev)
            return self.implicit(lambda s: eval_A(s, f_prev), f_n, u)

        raise ValueError(f"{kind} is not a specular Euler scheme")


def _last_two(history: History, scheme: SchemeId
              ) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    if len(history) < 2:
        raise ValueError(f"{scheme} needs the two latest nodes, but given "
                         f"{len(history)}")
    return history[-2], history[-1]


SCHEMES: Dict[SchemeId, Type[BaseScheme]] = {
    SchemeId.EE: ExplicitEuler,
    SchemeId.IE: ImplicitEuler,
    SchemeId.CN: CrankNicolson,
    SchemeId.ST: SpecularTrigonometric,
}
SCHEMES.update({s: SpecularEuler for s in SchemeId if s not in SCHEMES})


def make_scheme(config: SchemeConfig) -> BaseScheme:
    """Instantiates the scheme selected by `config`."""

    return SCHEMES[config.scheme](config)


def step(scheme: SchemeId, problem: IvpProblem, config: SchemeConfig,
         history: Sequence[Tuple[float, float]]) -> float:
    """Advances one step.

    Args:
        scheme (SchemeId): Scheme, overriding `config.scheme`.
        problem (IvpProblem): Problem.
        config (SchemeConfig): Settings.
        history (sequence of (float, float)): Latest nodes, current last;
            two-step schemes need two.

    Returns:
        u_next (float): Value at `t_n + h`.
    """

    if config.scheme is not scheme:
        config = SchemeConfig(scheme, config.h, config.eta, config.max_iters,
                              config.u1_policy)
    return make_scheme(config).advance(problem, history).value


def solve_ivp(problem: IvpProblem, config: SchemeConfig) -> Trajectory:
    """Integrates `problem` with the scheme selected by `config`.

    Args:
        problem (IvpProblem): Problem.
        config (SchemeConfig): Settings.

    Returns:
        trajectory (Trajectory): Nodes `t0 + n h` up to the last one within
            `T`.

    Raises:
        SolverError: If a step fails.
    """

    scheme = make_scheme(config)
    scheme.logger.debug(f"Solving {problem.name} with {config.scheme}, "
                        f"h={config.h}")
    return scheme.solve(problem)
