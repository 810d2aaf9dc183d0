
__version__ = "0.1"

from .base import (BaseScheme, SchemeConfig, SchemeId, SolverError,
                   Trajectory, U1Policy, number_of_steps)
from .convergence import (ErrorReport, accumulated_error, convergence_sweep,
                          error_ratio, fit_order, local_truncation_error,
                          parse_markdown, read_reports_csv, render_markdown,
                          write_reports_csv)
from .expression import Expression, ExpressionError, compile_expression
from .fixed_point import (FixedPointDivergenceError, FixedPointResult,
                          fixed_point_solve)
from .probes import (Bracket, BracketNotFoundError, FermatVerdict,
                     LipschitzVerdict, interior_grid,
                     lipschitz_from_bounded_sd, quasi_fermat_probe,
                     quasi_mvt_bracket, quasi_rolle_bracket)
from .problems import (BUILTINS, IvpProblem, ProblemConfigError,
                       circle_problem, dahlquist, exponential_growth,
                       load_problem, load_problem_file, nonsmooth_forcing,
                       nonsmooth_linear)
from .scheduler import DiffSchedule
from .schemes import (CrankNicolson, ExplicitEuler, ImplicitEuler,
                      SpecularEuler, SpecularTrigonometric,
                      TangentSingularityError, make_scheme, solve_ivp, step)
from .specular import (NEG_INF, POS_INF, EvaluationError, ExtendedReal,
                       NoLimitError, SpecularNonExistenceError,
                       SpecularResult, SpecularStatus, eval_A, eval_B,
                       eval_B_trig, estimate_one_sided, half_angle_shift,
                       specular_derivative, specular_derivative_k,
                       specular_from_one_sided, specular_from_one_sided_trig,
                       specular_quotient)
from .utils import a_function, b_function, b_function_trig, lp_error
