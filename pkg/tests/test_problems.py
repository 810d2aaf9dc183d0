import json
import math
import os
import tempfile
import unittest

import torch

import speckit


def interior_times(problem, n, seed, skip=None):
    generator = torch.Generator().manual_seed(seed)
    width = problem.T - problem.t0
    t = problem.t0 + 0.02 * width + 0.96 * width * torch.rand(
        n, generator=generator, dtype=torch.float64)
    times = t.tolist()
    if skip is not None:
        times = [s for s in times if abs(s - skip) > 0.02]
    return times


class TestBuiltins(unittest.TestCase):

    def test_dahlquist(self):
        problem = speckit.dahlquist(-3.0)
        self.assertEqual(problem.exact(0.0), 1.0)
        self.assertAlmostEqual(problem.exact(1.0), math.exp(-3),
                               delta=1e-15)
        self.assertEqual(problem.T, 2.5)
        self.assertEqual(problem.source(0.5, 2.0), -6.0)

        flat = speckit.dahlquist(0.0, u0=2.0)
        self.assertEqual(flat.exact(1.7), 2.0)

    def test_circle(self):
        problem = speckit.circle_problem(0.9)
        self.assertEqual(problem.exact(0.0), 1.0)
        self.assertAlmostEqual(problem.exact(0.6), 0.8, delta=1e-15)
        self.assertAlmostEqual(problem.exact(0.9), math.sqrt(0.19),
                               delta=1e-15)
        self.assertAlmostEqual(problem.source(0.6, 0.8), -0.75, delta=1e-15)
        with self.assertRaises(ValueError):
            problem.source(1.0, 0.0)
        for T in (0.0, 1.0, 1.5):
            with self.assertRaises(ValueError):
                speckit.circle_problem(T)

    def test_nonsmooth(self):
        problem = speckit.nonsmooth_linear(0.3)
        self.assertEqual(problem.exact(0.0), 0.3)
        self.assertEqual(problem.u0, problem.exact(-0.2))
        forcing = speckit.nonsmooth_forcing(0.3)
        self.assertAlmostEqual(forcing(0.0),
                               speckit.eval_A(0.1, -0.9) + 0.9, delta=1e-15)
        self.assertEqual(forcing(-0.1), 0.0)
        self.assertEqual(forcing(0.5), 2.5)
        self.assertEqual(speckit.nonsmooth_forcing(1 / 6)(0.0), 0.5)

    def test_nonsmooth_kink_identity(self):
        for c in (0.3, 0.1, 1 / 6, 0.5):
            problem = speckit.nonsmooth_linear(c)
            res = speckit.specular_derivative(problem.exact, 0.0)
            self.assertAlmostEqual(res.dplus.value, 1 - 3 * c, delta=1e-10)
            self.assertAlmostEqual(res.dminus.value, -3 * c, delta=1e-10)
            self.assertAlmostEqual(res.value + 3 * problem.exact(0.0),
                                   speckit.nonsmooth_forcing(c)(0.0),
                                   delta=1e-10)

    def test_exact_solutions_solve_odes(self):
        problems = [speckit.dahlquist(-3.0), speckit.circle_problem(0.9),
                    speckit.nonsmooth_linear(0.3),
                    speckit.exponential_growth()]
        for i, problem in enumerate(problems):
            skip = 0.0 if problem.name == "nonsmooth" else None
            for t in interior_times(problem, 1000, i, skip):
                du = speckit.estimate_one_sided(problem.exact, t, "right")
                self.assertAlmostEqual(
                    du.value, problem.source(t, problem.exact(t)),
                    delta=1e-8 * max(1.0, abs(du.value)))

    def test_invalid(self):
        with self.assertRaises(ValueError):
            speckit.IvpProblem(lambda t, u: u, 1.0, 1.0, 0.5)
        with self.assertRaises(ValueError):
            speckit.IvpProblem(lambda t, u: u, 0.0, 2.0, 1.0,
                               exact=math.exp)


class TestLoadProblem(unittest.TestCase):

    def test_builtin(self):
        problem = speckit.load_problem(
            '{"builtin": "dahlquist", "lambda": -3, "u0": 1, "t0": 0, '
            '"T": 2.5}')
        self.assertEqual(problem.name, "dahlquist")
        self.assertEqual(problem.source(0.0, 1.0), -3.0)
        self.assertEqual(problem.T, 2.5)

    def test_expression(self):
        problem = speckit.load_problem(
            {"source": "u", "u0": 1, "t0": 0, "T": 1})
        self.assertIsNone(problem.exact)
        self.assertEqual(problem.source(0.3, 2.0), 2.0)

    def test_expression_matches_circle(self):
        loaded = speckit.load_problem({
            "source": "-(t*u)/(1 - t^2)", "u0": 1, "t0": 0, "T": 0.9,
            "exact": "sqrt(1 - t^2)"})
        circle = speckit.circle_problem(0.9)
        self.assertEqual((loaded.t0, loaded.u0, loaded.T),
                         (circle.t0, circle.u0, circle.T))
        for i in range(91):
            t = i / 100
            u = circle.exact(t)
            self.assertAlmostEqual(loaded.exact(t), u, delta=1e-15)
            self.assertAlmostEqual(loaded.source(t, u), circle.source(t, u),
                                   delta=1e-14 * max(1.0, abs(u)))

    def test_errors(self):
        with self.assertRaises(speckit.ProblemConfigError) as ctx:
            speckit.load_problem('{"builtin": "dahlquist",\n "lambda": }')
        self.assertIn("line 2", str(ctx.exception))
        with self.assertRaises(speckit.ProblemConfigError):
            speckit.load_problem({"builtin": "lorenz"})
        for name in (["circle"], {"circle": 1}, 3, None):
            with self.assertRaises(speckit.ProblemConfigError):
                speckit.load_problem({"builtin": name})
        with self.assertRaises(speckit.ProblemConfigError):
            speckit.load_problem({"builtin": "dahlquist", "u0": 1})
        with self.assertRaises(speckit.ProblemConfigError):
            speckit.load_problem({"builtin": "circle", "lambda": 1})
        with self.assertRaises(speckit.ProblemConfigError):
            speckit.load_problem({"builtin": "circle", "T": 2})
        with self.assertRaises(speckit.ProblemConfigError):
            speckit.load_problem({"source": "u", "u0": 1})
        with self.assertRaises(speckit.ExpressionError):
            speckit.load_problem({"source": "u +", "u0": 1, "T": 1})

    def test_file(self):
        with tempfile.TemporaryDirectory() as root:
            path = os.path.join(root, "problem.json")
            with open(path, "w") as f:
                json.dump({"builtin": "nonsmooth", "c": 0.3}, f)
            problem = speckit.load_problem_file(path)
        self.assertEqual(problem.name, "nonsmooth")
        self.assertEqual((problem.t0, problem.T), (-0.2, 1.5))


if __name__ == "__main__":
    unittest.main()
